#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "tprabi/exact.hpp"
#include "tprabi/judd.hpp"
#include "tprabi/sector.hpp"
#include "tprabi/verify.hpp"

using namespace tprabi;
using Catch::Approx;

TEST_CASE("residuals vanish at the exact point and nowhere else") {
  const double mu = 3.0;
  const double k = 3.0 - 2.0 * std::sqrt(2.0);
  const ExactState st = build_state(1, k, mu, Branch::plus);
  const ModelParams m(k, mu);

  const OdeResidualReport at = ode_residual(make_evaluator(st), m, st.energy);
  REQUIRE_FALSE(at.system.degenerate_input);
  REQUIRE(at.system.equation_tag == "system");
  REQUIRE(at.fourth_order.equation_tag == "fourth-order");
  REQUIRE(at.system.max_residual < 1e-9);
  REQUIRE(at.fourth_order.max_residual < 1e-9);

  // The residual must actually discriminate: a milli-unit energy shift is
  // visible orders of magnitude above the pass level.
  const OdeResidualReport off =
      ode_residual(make_evaluator(st), m, st.energy + 1e-3);
  REQUIRE(off.system.max_residual > 1e-6);
}

TEST_CASE("identically zero input is flagged, not passed") {
  const StateEvaluator zero = [](complexd) { return StateDerivatives{}; };
  const OdeResidualReport rep = ode_residual(zero, ModelParams(0.3, 3.0), 1.0);
  REQUIRE(rep.system.degenerate_input);
  REQUIRE(rep.fourth_order.degenerate_input);
}

TEST_CASE("parity measurement sorts the constructed states") {
  const double mu = 3.0;
  {
    const double k = 3.0 - 2.0 * std::sqrt(2.0);
    const auto [p_plus, d_plus] =
        determine_parity(make_values(build_state(1, k, mu, Branch::plus)));
    REQUIRE(p_plus == Parity::plus_one);
    REQUIRE(d_plus < 1e-9);
    const auto [p_minus, d_minus] =
        determine_parity(make_values(build_state(1, k, mu, Branch::minus)));
    REQUIRE(p_minus == Parity::minus_i);
    REQUIRE(d_minus < 1e-9);
  }
  {
    const double k = std::sqrt(5.0) - 2.0;
    const auto [p_minus, d_minus] =
        determine_parity(make_values(build_state(2, k, mu, Branch::minus)));
    REQUIRE(p_minus == Parity::plus_i);
    REQUIRE(d_minus < 1e-9);
  }
  // A function with no symmetry at all fails every sector by a wide margin.
  const StateValues skew = [](complexd z) {
    return std::array<complexd, 2>{z + 1.0, z * z + 0.3};
  };
  for (Parity s : all_parities) REQUIRE(parity_check(skew, s) > 0.05);
}

TEST_CASE("norm verdicts: constructed state, growth-type estimate, quadrature") {
  const double mu = 3.0;
  const double k = 3.0 - 2.0 * std::sqrt(2.0);
  const ExactState st = build_state(1, k, mu, Branch::plus);
  const auto [f1, f2] = state_taylor(st);
  const NormReport rep = bargmann_norm(f1, f2);
  REQUIRE(rep.verdict == NormVerdict::convergent);
  REQUIRE(rep.norm_sq > 0.0);
  REQUIRE(rep.sigma_hat == Approx(k / 2.0).epsilon(0.05));
  // Independent contour quadrature agrees on the value.
  const double quad_norm = norm_quadrature(make_values(st));
  REQUIRE(quad_norm == Approx(rep.norm_sq).epsilon(1e-4));
}

TEST_CASE("norm verdicts: half-integer projection converges the same way") {
  const std::vector<JuddState> st = judd_states(4, 3.0);
  REQUIRE_FALSE(st.empty());
  const auto [f1, f2] = state_taylor(st[0], Parity::plus_one);
  const NormReport rep = bargmann_norm(f1, f2);
  REQUIRE(rep.verdict == NormVerdict::convergent);
  REQUIRE(rep.sigma_hat == Approx(st[0].kappa / 2.0).epsilon(0.05));
  const double quad_norm = norm_quadrature(make_values(st[0], Parity::plus_one));
  REQUIRE(quad_norm == Approx(rep.norm_sq).epsilon(1e-4));
}

TEST_CASE("norm verdicts: synthetic growth-type-one series is divergent") {
  // Coefficients of e^{z^2}: growth type 1, so the factorial-weighted tail
  // ratio approaches 4 and the sum diverges.
  std::vector<cld> f1(401, cld(0.0L)), f2;
  for (std::size_t j = 0; j < f1.size(); j += 2)
    f1[j] = expl(-lgammal(static_cast<long double>(j) / 2.0L + 1.0L));
  const NormReport rep = bargmann_norm(f1, f2);
  REQUIRE(rep.verdict == NormVerdict::divergent);
  REQUIRE(rep.tail_ratio == Approx(4.0).epsilon(0.05));
  REQUIRE(rep.sigma_hat == Approx(1.0).epsilon(0.05));
}

TEST_CASE("norm verdicts: a ratio pinned at one is inconclusive") {
  std::vector<cld> f1(401, cld(0.0L)), f2;
  for (std::size_t j = 0; j < f1.size(); ++j)
    f1[j] = expl(-0.5L * lgammal(static_cast<long double>(j) + 1.0L));
  const NormReport rep = bargmann_norm(f1, f2);
  REQUIRE(rep.verdict == NormVerdict::inconclusive);
}

TEST_CASE("norm verdicts: a terminating series is trivially convergent") {
  const std::vector<cld> f1 = {cld(1.0L)};
  const NormReport rep = bargmann_norm(f1, {});
  REQUIRE(rep.verdict == NormVerdict::convergent);
  REQUIRE(rep.norm_sq == Approx(1.0));
}

TEST_CASE("degeneracy counts: exactly two on a crossing, one off it") {
  const double mu = 3.0;
  {
    const double k = 3.0 - 2.0 * std::sqrt(2.0);
    const double E = 4.0 * std::sqrt(2.0) - 3.0;
    const DegeneracyReport rep = degeneracy_count(k, mu, E);
    REQUIRE(rep.count == 2);
    REQUIRE(rep.per_sector == std::array<int, 4>{1, 0, 0, 1});
  }
  {
    const double k = std::sqrt(5.0) - 2.0;
    const double E = 2.0 * (1.0 / k - k) * 0.75 - k;  // chi = 7/4
    const DegeneracyReport rep = degeneracy_count(k, mu, E);
    REQUIRE(rep.count == 2);
    REQUIRE(rep.per_sector == std::array<int, 4>{1, 0, 1, 0});
  }
  {
    // A generic eigenvalue away from the lattice is simple.
    const ModelParams m(0.3, mu);
    const SectorMatrix sm = build_sector_matrix(m, Parity::plus_one, 240);
    const double E = eigenvalue_by_index(sm.matrix, 2, 1e-13);
    const DegeneracyReport rep = degeneracy_count(0.3, mu, E);
    REQUIRE(rep.count == 1);
    REQUIRE(rep.per_sector[0] == 1);
  }
  REQUIRE_THROWS_AS(degeneracy_count(0.3, mu, 1.0, 240, 0.0),
                    std::invalid_argument);
}

TEST_CASE("closure roots land on truncated eigenvalues of the lattice energy") {
  // E(kappa) = 2 (1/kappa - kappa)(chi - 1) - kappa must agree with the
  // truncated spectrum at every scanned root: at least the predicted pair in
  // a 1e-6 window.
  const double mu = 3.0;
  for (int ell = 1; ell <= 3; ++ell) {
    for (const KappaRoot& r : find_kappa_roots(ell, mu)) {
      const double chi = exact_chi(ell);
      const double E = 2.0 * (1.0 / r.kappa - r.kappa) * (chi - 1.0) - r.kappa;
      const DegeneracyReport rep = degeneracy_count(r.kappa, mu, E, 240, 1e-6);
      CAPTURE(ell, r.kappa);
      REQUIRE(rep.count == 2);
    }
  }
}

TEST_CASE("full chain: scanned root to verified state in one pass") {
  // mu = 3, second root of the fourth window: construct both branches,
  // check the residual, the parity split, and norm convergence together.
  const double mu = 3.0;
  const std::vector<KappaRoot> roots = find_kappa_roots(4, mu);
  REQUIRE(roots.size() == 2);
  const double k = roots[1].kappa;
  const ModelParams m(k, mu);
  std::array<Parity, 2> seen{};
  for (Branch br : {Branch::plus, Branch::minus}) {
    const ExactState st = build_state(4, k, mu, br);
    const OdeResidualReport rep = ode_residual(make_evaluator(st), m, st.energy);
    REQUIRE(rep.system.max_residual < 1e-8);
    REQUIRE(rep.fourth_order.max_residual < 1e-8);
    const auto [p, dev] = determine_parity(make_values(st));
    REQUIRE(dev < 1e-8);
    seen[br == Branch::plus ? 0 : 1] = p;
    const auto [f1, f2] = state_taylor(st);
    REQUIRE(bargmann_norm(f1, f2).verdict == NormVerdict::convergent);
  }
  // Cross pair: one branch lands in {+1,-1}, the other in {+i,-i}.
  REQUIRE(parity_is_even(seen[0]) != parity_is_even(seen[1]));
}
