#pragma once

// The doubly-infinite parabolic-cylinder basis
//
//   D_n^{(+)}(z) = D_{n+1/2}(z) + D_{n+1/2}(-z)   (even in z)
//   D_n^{(-)}(z) = D_{n+1/2}(z) - D_{n+1/2}(-z)   (odd in z)
//
// for integer n of either sign, in Whittaker's normalization. Both branches
// satisfy u'' + (n + 1 - z^2/4) u = 0 and are entire.
//
// Evaluation routes:
//   * power series through M(a,b,z^2/2) with exact seed constants built from
//     Gamma at quarter-integer arguments (any complex z);
//   * asymptotic expansion of D_nu(+-z) for real |z| >= 12 (the two routes
//     must agree on the overlap band, which the tests enforce).
//
// The ladder maps b+ = z/2 - d/dz and b = z/2 + d/dz shift n by one and FLIP
// the branch (multiplication by z swaps parity):
//   b+ D_n^{(s)} = D_{n+1}^{(-s)},   b D_n^{(s)} = (n+1/2) D_{n-1}^{(-s)}.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "tprabi/kummer.hpp"

namespace tprabi {

enum class Branch { plus, minus };

inline Branch flip(Branch b) { return b == Branch::plus ? Branch::minus : Branch::plus; }
inline const char* branch_name(Branch b) { return b == Branch::plus ? "+" : "-"; }

struct DIndex {
  int n;
  Branch branch;
};

struct DValue {
  complexd value;
  complexd derivative;
  double condition;  // >= 1; multiples of 1/eps mean the digits are gone
};

namespace detail {

constexpr double kOverflowGuard = 52.0;  // e^{|z|^2/4} must stay representable

inline void check_guard(complexd z) {
  if (!(std::abs(z) < kOverflowGuard))
    throw std::invalid_argument("eval_D: |z| exceeds the overflow guard");
}

}  // namespace detail

// Seed constants: D_n^{(+)}(0) and d/dz D_n^{(-)}(0), from the value and
// slope of D_{n+1/2} at the origin. Gamma never hits a pole (the arguments
// are quarter-integers).
inline double seed_even(int n) {
  return 2.0 * std::sqrt(M_PI) * std::pow(2.0, 0.5 * n + 0.25) /
         std::tgamma(0.25 - 0.5 * n);
}

inline double seed_odd(int n) {
  return -2.0 * std::sqrt(M_PI) * std::pow(2.0, 0.5 * n + 0.75) /
         std::tgamma(-0.25 - 0.5 * n);
}

// Constant Wronskian W[D^{(+)}, D^{(-)}] = D+ D-' - D+' D-. Used to validate
// the seed constants against the ODE rather than trusting Gamma tables.
inline double wronskian_reference(int n) {
  return -2.0 * std::sqrt(2.0 * M_PI) / std::tgamma(-double(n) - 0.5);
}

// Power-series route, valid for any complex z within the overflow guard.
inline DValue eval_D_series(DIndex i, complexd z) {
  detail::check_guard(z);
  const complexd u = 0.5 * z * z;
  const complexd E = std::exp(-0.25 * z * z);
  if (i.branch == Branch::plus) {
    const double a = -0.5 * i.n - 0.25, b = 0.5;
    const SeriesValue m = kummer_m(a, b, u);
    const SeriesValue mp = kummer_m(a + 1.0, b + 1.0, u);
    const double s = seed_even(i.n);
    const complexd val = s * E * m.value;
    const complexd der = s * E * z * (-0.5 * m.value + (a / b) * mp.value);
    return {val, der, std::max(m.condition, mp.condition)};
  }
  const double a = 0.25 - 0.5 * i.n, b = 1.5;
  const SeriesValue m = kummer_m(a, b, u);
  const SeriesValue mp = kummer_m(a + 1.0, b + 1.0, u);
  const double s = seed_odd(i.n);
  const complexd val = s * z * E * m.value;
  const complexd der =
      s * E * ((1.0 - 0.5 * z * z) * m.value + z * z * (a / b) * mp.value);
  return {val, der, std::max(m.condition, mp.condition)};
}

namespace detail {

// Asymptotic data for D_nu(t) and D_nu(-t) at large real t > 0, with
// term-wise derivatives. Series are truncated at the smallest term.
struct AsymptoticPair {
  double recessive, recessive_d;  // D_nu(t), d/dt D_nu(t)
  double dominant, dominant_d;    // D_nu(-t), d/dt [D_nu(-t)]
};

inline AsymptoticPair asymptotic_D(double nu, double t) {
  const int smax = 24;
  // A = sum a_s t^{-2s}, a_{s+1}/a_s = -(-nu+2s)(-nu+2s+1)/(2(s+1)).
  double A = 0.0, Ad = 0.0, a = 1.0;
  for (int s = 0; s < smax; ++s) {
    const double contrib = a * std::pow(t, -2.0 * s);
    A += contrib;
    Ad += -2.0 * s * a * std::pow(t, -2.0 * s - 1.0);
    const double next = -a * (-nu + 2 * s) * (-nu + 2 * s + 1) / (2.0 * (s + 1));
    if (std::abs(next * std::pow(t, -2.0 * (s + 1))) > std::abs(contrib)) break;
    a = next;
  }
  // B = sum b_s t^{-2s}, b_{s+1}/b_s = (nu+1+2s)(nu+2+2s)/(2(s+1)).
  double B = 0.0, Bd = 0.0, b = 1.0;
  for (int s = 0; s < smax; ++s) {
    const double contrib = b * std::pow(t, -2.0 * s);
    B += contrib;
    Bd += -2.0 * s * b * std::pow(t, -2.0 * s - 1.0);
    const double next = b * (nu + 1 + 2 * s) * (nu + 2 + 2 * s) / (2.0 * (s + 1));
    if (std::abs(next * std::pow(t, -2.0 * (s + 1))) > std::abs(contrib)) break;
    b = next;
  }
  const double Eneg = std::exp(-0.25 * t * t), Epos = std::exp(0.25 * t * t);
  const double tp = std::pow(t, nu), tm = std::pow(t, -nu - 1.0);
  const double C = std::sqrt(2.0 * M_PI) / std::tgamma(-nu);
  AsymptoticPair r;
  r.recessive = Eneg * tp * A;
  r.recessive_d = Eneg * (tp * (-0.5 * t) * A + nu * tp / t * A + tp * Ad);
  r.dominant = C * Epos * tm * B;
  r.dominant_d = C * Epos * (tm * (0.5 * t) * B + (-nu - 1.0) * tm / t * B + tm * Bd);
  return r;
}

}  // namespace detail

// Asymptotic route, real z with |z| >= ~10.
inline DValue eval_D_asymptotic(DIndex i, double z) {
  if (!(std::abs(z) < detail::kOverflowGuard))
    throw std::invalid_argument("eval_D: |z| exceeds the overflow guard");
  const double t = std::abs(z);
  const double nu = double(i.n) + 0.5;
  const auto p = detail::asymptotic_D(nu, t);
  double val, der;
  if (i.branch == Branch::plus) {
    val = p.recessive + p.dominant;
    der = p.recessive_d + p.dominant_d;
    if (z < 0.0) der = -der;  // even function
  } else {
    val = p.recessive - p.dominant;
    der = p.recessive_d - p.dominant_d;
    if (z < 0.0) val = -val;  // odd function
  }
  const double cond =
      std::max(std::abs(p.recessive), std::abs(p.dominant)) /
      std::max(std::abs(val), 1e-300);
  return {complexd(val, 0.0), complexd(der, 0.0), std::max(cond, 1.0)};
}

constexpr double kAsymptoticSwitch = 12.0;

// Dispatching evaluator: series everywhere, asymptotics on the real axis
// beyond the switch radius.
inline DValue eval_D(DIndex i, complexd z) {
  if (z.imag() == 0.0 && std::abs(z.real()) >= kAsymptoticSwitch)
    return eval_D_asymptotic(i, z.real());
  return eval_D_series(i, z);
}

inline DValue eval_D(DIndex i, double z) { return eval_D(i, complexd(z, 0.0)); }

// ---------------------------------------------------------------------------
// Ladder maps
// ---------------------------------------------------------------------------

enum class Ladder { raise, lower };

// Returns the *normalized* neighbour D_{n+-1}^{(flipped)} as a DValue; its
// derivative is reconstructed through the ODE so no second evaluation runs.
inline DValue ladder(DIndex i, Ladder dir, complexd z) {
  const DValue d = eval_D(i, z);
  const double n = i.n;
  if (dir == Ladder::raise) {
    const complexd val = 0.5 * z * d.value - d.derivative;
    const complexd der =
        (n + 1.5 - 0.25 * z * z) * d.value + 0.5 * z * d.derivative;
    return {val, der, d.condition};
  }
  const double c = n + 0.5;  // never zero for integer n
  const complexd val = (0.5 * z * d.value + d.derivative) / c;
  const complexd der =
      ((0.25 * z * z - n - 0.5) * d.value + 0.5 * z * d.derivative) / c;
  return {val, der, d.condition};
}

inline DIndex ladder_target(DIndex i, Ladder dir) {
  return {i.n + (dir == Ladder::raise ? 1 : -1), flip(i.branch)};
}

// ---------------------------------------------------------------------------
// Connection formula: D_n^{(s)}(iz) expressed through D_{-n-2}^{(s)}(-+z).
// Powers of i are principal: i^w = exp(i pi w / 2).
// ---------------------------------------------------------------------------

inline complexd connection(DIndex i, complexd z) {
  const complexd I(0.0, 1.0);
  auto ipow = [&](double w) { return std::exp(I * (0.5 * M_PI * w)); };
  const double n = i.n;
  const complexd pre = I * std::tgamma(n + 1.5) / std::sqrt(2.0 * M_PI);
  const DIndex j{-i.n - 2, i.branch};
  const complexd lhs_from_rhs =
      pre * (ipow(n - 0.5) * eval_D(j, -z).value - ipow(0.5 - n) * eval_D(j, z).value);
  return lhs_from_rhs;
}

// ---------------------------------------------------------------------------
// Taylor expansion about the origin
// ---------------------------------------------------------------------------

struct TaylorSeries {
  DIndex index;
  std::vector<double> c;  // c[k] multiplies z^k

  complexd eval(complexd z) const {
    complexd acc(0.0, 0.0), zp(1.0, 0.0);
    for (double ck : c) {
      acc += ck * zp;
      zp *= z;
    }
    return acc;
  }

  complexd eval_derivative(complexd z) const {
    complexd acc(0.0, 0.0), zp(1.0, 0.0);
    for (std::size_t k = 1; k < c.size(); ++k) {
      acc += double(k) * c[k] * zp;
      zp *= z;
    }
    return acc;
  }
};

// Coefficients obey (k+1)(k+2) c_{k+2} = c_{k-2}/4 - (n+1) c_k, seeded by the
// value and slope at the origin.
inline TaylorSeries taylor(DIndex i, int K) {
  if (K < 2) throw std::invalid_argument("taylor: need K >= 2");
  const DValue at0 = eval_D(i, complexd(0.0, 0.0));
  TaylorSeries t;
  t.index = i;
  t.c.assign(static_cast<std::size_t>(K) + 1, 0.0);
  t.c[0] = at0.value.real();
  t.c[1] = at0.derivative.real();
  for (int k = 0; k + 2 <= K; ++k) {
    const double prev = (k >= 2) ? t.c[static_cast<std::size_t>(k) - 2] : 0.0;
    t.c[static_cast<std::size_t>(k) + 2] =
        (0.25 * prev - double(i.n + 1) * t.c[static_cast<std::size_t>(k)]) /
        (double(k + 1) * double(k + 2));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Cross-representation checks
// ---------------------------------------------------------------------------

struct RatioCheck {
  double ratio;          // mean of pointwise ratios over the grid
  double max_deviation;  // max |ratio_j - mean|
};

// Independent Bessel-series evaluation of
//   d^{(+-)}(z) = z^{3/2} [ I_{+-1/4}(k z^2/2) - I_{-+3/4}(k z^2/2) ]
// against D_0^{(+-)}(sqrt(2k) z): the pointwise ratio must be a constant.
inline RatioCheck bessel_crosscheck(Branch branch, double kappa,
                                    const std::vector<double>& z_grid) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("bessel_crosscheck: kappa must lie in (0,1)");
  const double sign = (branch == Branch::plus) ? +1.0 : -1.0;
  std::vector<double> ratios;
  for (double z : z_grid) {
    if (!(z > 0.0)) throw std::invalid_argument("bessel_crosscheck: z must be > 0");
    const double y = 0.5 * kappa * z * z;
    const double d_bessel =
        std::pow(z, 1.5) * (bessel_i(sign * 0.25, y) - bessel_i(-sign * 0.75, y));
    const double denom =
        eval_D({0, branch}, complexd(std::sqrt(2.0 * kappa) * z, 0.0)).value.real();
    if (std::abs(denom) < 1e-12) continue;  // skip near-zeros of the basis
    ratios.push_back(d_bessel / denom);
  }
  if (ratios.empty()) throw std::runtime_error("bessel_crosscheck: empty grid");
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= double(ratios.size());
  double dev = 0.0;
  for (double r : ratios) dev = std::max(dev, std::abs(r - mean));
  return {mean, dev};
}

// ---------------------------------------------------------------------------
// Growth order estimate
// ---------------------------------------------------------------------------

// Fit log |D_n(sqrt(2 kappa) z)| ~ sigma z^2 + p ln z + q over z in [8,15]
// and return sigma; for a finite-Bargmann-norm candidate sigma must come out
// below 1/2, and the expansion predicts sigma = kappa/2. The ln z regressor
// absorbs the algebraic z^{-3/2} prefactor so it cannot bias the slope.
inline double growth_type(DIndex i, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("growth_type: kappa must lie in (0,1)");
  const int npts = 29;
  double M[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (int j = 0; j < npts; ++j) {
    const double z = 8.0 + 7.0 * double(j) / double(npts - 1);
    const double y = std::log(std::abs(eval_D(i, std::sqrt(2.0 * kappa) * z).value));
    const double reg[3] = {z * z, std::log(z), 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) M[r][c] += reg[r] * reg[c];
      rhs[r] += reg[r] * y;
    }
  }
  // 3x3 Gaussian elimination with partial pivoting.
  int piv[3] = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    int p = k;
    for (int r = k + 1; r < 3; ++r)
      if (std::abs(M[piv[r]][k]) > std::abs(M[piv[p]][k])) p = r;
    std::swap(piv[k], piv[p]);
    for (int r = k + 1; r < 3; ++r) {
      const double f = M[piv[r]][k] / M[piv[k]][k];
      for (int c = k; c < 3; ++c) M[piv[r]][c] -= f * M[piv[k]][c];
      rhs[piv[r]] -= f * rhs[piv[k]];
    }
  }
  double sol[3];
  for (int k = 2; k >= 0; --k) {
    double acc = rhs[piv[k]];
    for (int c = k + 1; c < 3; ++c) acc -= M[piv[k]][c] * sol[c];
    sol[k] = acc / M[piv[k]][k];
  }
  return sol[0];
}

}  // namespace tprabi
