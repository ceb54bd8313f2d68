#pragma once

// Independent verification of constructed states: residuals against the
// defining differential equations, Z4 parity identities, Bargmann norms via
// factorial-weighted Taylor sums, and degeneracy counting on the truncated
// sector spectra.
//
// Derivatives entering the residuals are always algebraic (series derivative
// plus the second-order equation of the basis functions, or polynomial
// recursion under the Gaussian) — never finite differences — so a residual
// measures the state against the target equation, not the quality of a
// numerical differentiator.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tprabi/exact.hpp"
#include "tprabi/judd.hpp"
#include "tprabi/model.hpp"
#include "tprabi/sector.hpp"

namespace tprabi {

// --------------------------------------------------------------------------
// State access: derivative bundles and plain values.
// --------------------------------------------------------------------------

struct StateDerivatives {
  std::array<complexd, 5> psi1{};  // d^k/dz^k psi_1, k = 0..4
  std::array<complexd, 3> psi2{};  // d^k/dz^k psi_2, k = 0..2
};

using StateEvaluator = std::function<StateDerivatives(complexd)>;
using StateValues = std::function<std::array<complexd, 2>(complexd)>;

inline StateEvaluator make_evaluator(const ExactState& st) {
  return [st](complexd z) {
    StateDerivatives d;
    d.psi1 = eval_expansion_derivatives(st.psi1, st.kappa, z);
    const auto d2 = eval_expansion_derivatives(st.psi2, st.kappa, z);
    d.psi2 = {d2[0], d2[1], d2[2]};
    return d;
  };
}

inline StateEvaluator make_evaluator(const JuddState& st, Parity parity) {
  const GaussianPolyPair f1 = judd_projection_form(st, parity, 0);
  const GaussianPolyPair f2 = judd_projection_form(st, parity, 1);
  return [f1, f2](complexd z) {
    StateDerivatives d;
    const auto a = gaussian_poly_derivatives(f1.b1, f1.R1, z, 4);
    const auto b = gaussian_poly_derivatives(f1.b2, f1.R2, z, 4);
    for (int k = 0; k <= 4; ++k) d.psi1[k] = a[k] + b[k];
    const auto c = gaussian_poly_derivatives(f2.b1, f2.R1, z, 2);
    const auto e = gaussian_poly_derivatives(f2.b2, f2.R2, z, 2);
    for (int k = 0; k <= 2; ++k) d.psi2[k] = c[k] + e[k];
    return d;
  };
}

inline StateValues make_values(const ExactState& st) {
  return [st](complexd z) -> std::array<complexd, 2> {
    return {eval_expansion(st.psi1, st.kappa, z),
            eval_expansion(st.psi2, st.kappa, z)};
  };
}

inline StateValues make_values(const JuddState& st, Parity parity) {
  return [st, parity](complexd z) { return eval_judd_projection(st, parity, z); };
}

// Default residual/parity grid: 24 real points on [-2,2] plus 8 points on the
// unit circle (absolute residuals are meaningless next to Gaussian growth, so
// every check below normalizes per point; the circle points exercise the
// complex evaluation path).
inline std::vector<complexd> default_grid() {
  std::vector<complexd> g;
  for (int i = 0; i < 24; ++i) g.emplace_back(-2.0 + 4.0 * i / 23.0, 0.0);
  for (int i = 0; i < 8; ++i) {
    const double t = 2.0 * M_PI * (i + 0.5) / 8.0;
    g.emplace_back(std::cos(t), std::sin(t));
  }
  return g;
}

// --------------------------------------------------------------------------
// Residuals.
// --------------------------------------------------------------------------

struct ResidualReport {
  double max_residual = 0.0;
  std::string grid_description;
  std::string equation_tag;       // "fourth-order" | "system" | "factor"
  bool degenerate_input = false;  // the state vanished on the whole grid
};

struct OdeResidualReport {
  ResidualReport fourth_order;
  ResidualReport system;
};

// Residuals of the eigenproblem in its two equivalent forms: the coupled
// second-order system
//   psi1'' + 2 x z psi1' + (z^2 - E) psi1 + mu psi2 = 0
//   psi2'' - 2 x z psi2' + (z^2 + E) psi2 - mu psi1 = 0
// and the fourth-order equation obtained by eliminating psi2,
//   phi'''' + ((2-4x^2) z^2 + 4x) phi'' + 4 z (1 + E x - x^2) phi'
//          + (2 - E^2 + mu^2 - 4 x z^2 + z^4) phi = 0,  phi = psi1.
// Each residual is normalized per grid point by the largest term magnitude.
inline OdeResidualReport ode_residual(const StateEvaluator& state,
                                      const ModelParams& m, double E,
                                      const std::vector<complexd>& grid =
                                          default_grid()) {
  const double x = m.x();
  const double mu = m.mu;
  OdeResidualReport rep;
  rep.fourth_order.equation_tag = "fourth-order";
  rep.system.equation_tag = "system";
  const std::string gdesc = std::to_string(grid.size()) + "-point grid";
  rep.fourth_order.grid_description = gdesc;
  rep.system.grid_description = gdesc;

  double state_mag = 0.0;
  for (const complexd& z : grid) {
    const StateDerivatives d = state(z);
    state_mag = std::max(state_mag, std::abs(d.psi1[0]) + std::abs(d.psi2[0]));

    const complexd z2 = z * z;
    const std::array<complexd, 4> t4 = {
        d.psi1[4],
        ((2.0 - 4.0 * x * x) * z2 + 4.0 * x) * d.psi1[2],
        4.0 * z * (1.0 + E * x - x * x) * d.psi1[1],
        (2.0 - E * E + mu * mu - 4.0 * x * z2 + z2 * z2) * d.psi1[0]};
    complexd r4 = 0.0;
    double s4 = 0.0;
    for (const complexd& t : t4) { r4 += t; s4 = std::max(s4, std::abs(t)); }
    if (s4 > 0.0)
      rep.fourth_order.max_residual =
          std::max(rep.fourth_order.max_residual, std::abs(r4) / s4);

    const std::array<complexd, 4> e1 = {d.psi1[2], 2.0 * x * z * d.psi1[1],
                                        (z2 - E) * d.psi1[0], mu * d.psi2[0]};
    const std::array<complexd, 4> e2 = {d.psi2[2], -2.0 * x * z * d.psi2[1],
                                        (z2 + E) * d.psi2[0], -mu * d.psi1[0]};
    for (const auto& terms : {e1, e2}) {
      complexd r = 0.0;
      double s = 0.0;
      for (const complexd& t : terms) { r += t; s = std::max(s, std::abs(t)); }
      if (s > 0.0)
        rep.system.max_residual = std::max(rep.system.max_residual, std::abs(r) / s);
    }
  }
  if (state_mag == 0.0) {
    rep.fourth_order.degenerate_input = true;
    rep.system.degenerate_input = true;
  }
  return rep;
}

// --------------------------------------------------------------------------
// Parity.
// --------------------------------------------------------------------------

// Max scale-normalized deviation of the Z4 identities
//   psi1(i z) = s psi2(z),   psi2(i z) = s psi1(z)
// over the grid; < 1e-9 for a state of definite parity s, O(1) otherwise.
inline double parity_check(const StateValues& state, Parity s,
                           const std::vector<complexd>& grid = default_grid()) {
  const complexd sv = parity_value(s);
  const complexd rot(0.0, 1.0);
  double dev = 0.0;
  for (const complexd& z : grid) {
    const auto at_z = state(z);
    const auto at_iz = state(rot * z);
    const double scale = std::abs(at_z[0]) + std::abs(at_z[1]) +
                         std::abs(at_iz[0]) + std::abs(at_iz[1]) + 1e-300;
    dev = std::max(dev, std::abs(at_iz[0] - sv * at_z[1]) / scale);
    dev = std::max(dev, std::abs(at_iz[1] - sv * at_z[0]) / scale);
  }
  return dev;
}

// The parity sector a state actually lives in: the s minimizing the deviation.
inline std::pair<Parity, double> determine_parity(const StateValues& state,
                                                  const std::vector<complexd>& grid =
                                                      default_grid()) {
  Parity best = Parity::plus_one;
  double best_dev = std::numeric_limits<double>::infinity();
  for (Parity s : all_parities) {
    const double d = parity_check(state, s, grid);
    if (d < best_dev) { best_dev = d; best = s; }
  }
  return {best, best_dev};
}

// --------------------------------------------------------------------------
// Bargmann norms.
// --------------------------------------------------------------------------

enum class NormVerdict { convergent, divergent, inconclusive };

inline const char* norm_verdict_name(NormVerdict v) {
  switch (v) {
    case NormVerdict::convergent: return "convergent";
    case NormVerdict::divergent: return "divergent";
    default: return "inconclusive";
  }
}

struct NormReport {
  std::vector<double> partial_sums;  // S_k = sum_{j<=k} j! (|f1_j|^2 + |f2_j|^2)
  NormVerdict verdict = NormVerdict::inconclusive;
  double tail_ratio = 0.0;  // trailing median of t_j / t_{j-2}
  double sigma_hat = 0.0;   // growth-type estimate from the tail ratio
  double norm_sq = 0.0;
  int last_valid_term = -1;
};

using cld = std::complex<long double>;

// Factorial-weighted norm of a two-component entire function from its Taylor
// coefficients: ||f||^2 = sum_j j! (|f1_j|^2 + |f2_j|^2). For a function of
// growth type sigma at order 2 the ladder ratio t_j / t_{j-2} approaches
// 4 sigma^2 (1 - 1/j), so the series converges iff sigma < 1/2; the verdict
// demands the ratio stay below one over the trailing hundred terms, and a
// ratio pinned at one is reported inconclusive rather than divergent.
inline NormReport bargmann_norm(const std::vector<cld>& f1,
                                const std::vector<cld>& f2) {
  const std::size_t K = std::max(f1.size(), f2.size());
  NormReport rep;
  rep.partial_sums.reserve(K);

  std::vector<double> log_term(K, -std::numeric_limits<double>::infinity());
  double sum = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    long double m2 = 0.0L;
    if (j < f1.size()) m2 += std::norm(f1[j]);
    if (j < f2.size()) m2 += std::norm(f2[j]);
    if (m2 > 0.0L) {
      const long double lt = lgammal(j + 1.0L) + logl(m2);
      log_term[j] = static_cast<double>(lt);
      sum += static_cast<double>(expl(lt));
      rep.last_valid_term = static_cast<int>(j);
    }
    rep.partial_sums.push_back(sum);
  }
  rep.norm_sq = sum;

  std::vector<double> ratios;
  std::vector<std::size_t> ratio_at;
  for (std::size_t j = 2; j < K; ++j)
    if (std::isfinite(log_term[j]) && std::isfinite(log_term[j - 2])) {
      ratios.push_back(std::exp(log_term[j] - log_term[j - 2]));
      ratio_at.push_back(j);
    }

  const std::size_t window = 100;
  if (ratios.size() < 10) {
    // Terminating (or nearly empty) series: convergent by inspection.
    rep.verdict = NormVerdict::convergent;
    rep.tail_ratio = 0.0;
    return rep;
  }
  const std::size_t take = std::min(window, ratios.size());
  std::vector<double> tail(ratios.end() - take, ratios.end());
  double tail_max = *std::max_element(tail.begin(), tail.end());
  std::nth_element(tail.begin(), tail.begin() + take / 2, tail.end());
  rep.tail_ratio = tail[take / 2];
  const std::size_t jlast = ratio_at.back();
  rep.sigma_hat =
      0.5 * std::sqrt(rep.tail_ratio * double(jlast) / double(jlast - 1));

  if (tail_max < 1.0 && rep.tail_ratio <= 1.0 - 1e-6)
    rep.verdict = NormVerdict::convergent;
  else if (rep.tail_ratio >= 1.0 + 1e-6)
    rep.verdict = NormVerdict::divergent;
  else
    rep.verdict = NormVerdict::inconclusive;
  return rep;
}

// --------------------------------------------------------------------------
// Taylor coefficients of constructed states (long double throughout: the
// late terms underflow double well before the ratio window closes).
// --------------------------------------------------------------------------

namespace detail {

// z-Taylor coefficients of sum_j c_j D_{n_j}(sqrt(2 kappa) z) to K terms via
// the basis recurrence (k+1)(k+2) c_{k+2} = c_{k-2}/4 - (n+1) c_k.
inline std::vector<cld> expansion_taylor(const DExpansion& e, double kappa, int K) {
  std::vector<cld> f(K, cld(0.0L));
  const long double s = sqrtl(2.0L * (long double)kappa);
  for (std::size_t j = 0; j < e.coefficients.size(); ++j) {
    const int n = e.l_start + 2 * static_cast<int>(j);
    const DValue at0 = eval_D({n, e.branch}, complexd(0.0, 0.0));
    std::vector<long double> c(K, 0.0L);
    if (K > 0) c[0] = (long double)at0.value.real();
    if (K > 1) c[1] = (long double)at0.derivative.real();
    for (int k = 0; k + 2 < K; ++k) {
      long double v = -(n + 1.0L) * c[k];
      if (k >= 2) v += 0.25L * c[k - 2];
      c[k + 2] = v / ((k + 1.0L) * (k + 2.0L));
    }
    long double pw = 1.0L;
    const long double cj = (long double)e.coefficients[j];
    for (int k = 0; k < K; ++k, pw *= s) f[k] += cld(cj * c[k] * pw);
  }
  return f;
}

// z-Taylor coefficients of e^{b z^2} R(z) to K terms.
inline std::vector<cld> gaussian_poly_taylor(complexd b, const std::vector<complexd>& R,
                                             int K) {
  std::vector<cld> f(K, cld(0.0L));
  const cld bl((long double)b.real(), (long double)b.imag());
  cld gm(1.0L);  // b^m / m!
  for (int m = 0; 2 * m < K; ++m) {
    for (std::size_t r = 0; r < R.size(); ++r) {
      const int k = 2 * m + static_cast<int>(r);
      if (k < K)
        f[k] += gm * cld((long double)R[r].real(), (long double)R[r].imag());
    }
    gm *= bl / cld((long double)(m + 1));
  }
  return f;
}

}  // namespace detail

inline std::pair<std::vector<cld>, std::vector<cld>> state_taylor(const ExactState& st,
                                                                  int K = 400) {
  return {detail::expansion_taylor(st.psi1, st.kappa, K),
          detail::expansion_taylor(st.psi2, st.kappa, K)};
}

inline std::pair<std::vector<cld>, std::vector<cld>> state_taylor(const JuddState& st,
                                                                  Parity parity,
                                                                  int K = 400) {
  std::pair<std::vector<cld>, std::vector<cld>> out;
  for (int comp = 0; comp < 2; ++comp) {
    const GaussianPolyPair g = judd_projection_form(st, parity, comp);
    std::vector<cld> f = detail::gaussian_poly_taylor(g.b1, g.R1, K);
    const std::vector<cld> f2 = detail::gaussian_poly_taylor(g.b2, g.R2, K);
    for (int k = 0; k < K; ++k) f[k] += f2[k];
    (comp == 0 ? out.first : out.second) = std::move(f);
  }
  return out;
}

// Independent low-accuracy cross-check of the norm: radial-angular quadrature
// of (1/pi) \int (|f1|^2+|f2|^2) e^{-|z|^2} dA. Three-digit agreement is the
// goal; the series above is the precise path.
inline double norm_quadrature(const StateValues& state, double R = 6.0,
                              int radial = 240, int angular = 16) {
  if (radial % 2 != 0) ++radial;
  auto ring_mean = [&](double r) {
    double acc = 0.0;
    for (int a = 0; a < angular; ++a) {
      const double t = 2.0 * M_PI * a / angular;
      const auto v = state(complexd(r * std::cos(t), r * std::sin(t)));
      acc += std::norm(v[0]) + std::norm(v[1]);
    }
    return acc / angular;
  };
  // Simpson over r of 2 r e^{-r^2} * ring mean.
  const double h = R / radial;
  double acc = 0.0;
  for (int i = 0; i <= radial; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == radial) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * 2.0 * r * std::exp(-r * r) * ring_mean(r);
  }
  return acc * h / 3.0;
}

// --------------------------------------------------------------------------
// Degeneracy counting.
// --------------------------------------------------------------------------

struct DegeneracyReport {
  int count = 0;                 // eigenvalues with |E - E_star| < window, all sectors
  std::array<int, 4> per_sector{};
  int near_count = 0;            // additional levels inside the 10x window
  double window = 0.0;
};

// Sturm-count the truncated sector spectra inside the energy window; exact
// integer answers, no eigenvalue extraction. near_count > 0 warns that an
// unrelated level sits close enough to make the window choice delicate.
inline DegeneracyReport degeneracy_count(double kappa, double mu, double E_star,
                                         int truncation = 240, double window = 1e-7) {
  if (window <= 0) throw std::invalid_argument("degeneracy_count: window must be positive");
  const ModelParams m(kappa, mu);
  DegeneracyReport rep;
  rep.window = window;
  int wide = 0;
  for (std::size_t si = 0; si < all_parities.size(); ++si) {
    const SectorMatrix sm = build_sector_matrix(m, all_parities[si], truncation);
    const int in_window = eigenvalue_count_below(sm.matrix, E_star + window) -
                          eigenvalue_count_below(sm.matrix, E_star - window);
    const int in_wide = eigenvalue_count_below(sm.matrix, E_star + 10 * window) -
                        eigenvalue_count_below(sm.matrix, E_star - 10 * window);
    rep.per_sector[si] = in_window;
    rep.count += in_window;
    wide += in_wide;
  }
  rep.near_count = wide - rep.count;
  return rep;
}

}  // namespace tprabi
