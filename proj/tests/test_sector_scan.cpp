#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tprabi/model.hpp"
#include "tprabi/scan.hpp"
#include "tprabi/sector.hpp"

using namespace tprabi;
using Catch::Approx;

TEST_CASE("sector bases: index ladders and alternating spins") {
  const SectorBasis even = build_sector_basis(Parity::plus_one, 240);
  REQUIRE(even.indices.size() == 121);
  REQUIRE(even.indices.front() == 0);
  REQUIRE(even.indices.back() == 240);

  const SectorBasis odd = build_sector_basis(Parity::minus_i, 240);
  REQUIRE(odd.indices.size() == 120);
  REQUIRE(odd.indices.front() == 1);
  REQUIRE(odd.indices.back() == 239);

  for (Parity s : all_parities) {
    const SectorBasis b = build_sector_basis(s, 40);
    // lambda_{n+2} = -lambda_n, and the head spin follows the sector label.
    const int head = (s == Parity::plus_one || s == Parity::plus_i) ? +1 : -1;
    for (std::size_t k = 0; k < b.spins.size(); ++k) {
      REQUIRE(b.spins[k] == ((k % 2 == 0) ? head : -head));
      REQUIRE((b.indices[k] % 2 == 0) == parity_is_even(s));
    }
  }
  REQUIRE_THROWS_AS(build_sector_basis(Parity::plus_one, 1), std::invalid_argument);
}

TEST_CASE("sector matrix entries at a hand-evaluated point") {
  // kappa = 1/2 gives x = 5/4; s = +1, N = 2 keeps n in {0,2}:
  // diag [mu, 2x*2 - mu] = [3, 2], coupling sqrt(1*2).
  const ModelParams m(0.5, 3.0);
  const SectorMatrix sm = build_sector_matrix(m, Parity::plus_one, 2);
  REQUIRE(sm.matrix.diag.size() == 2);
  REQUIRE(sm.matrix.diag[0] == Approx(3.0));
  REQUIRE(sm.matrix.diag[1] == Approx(2.0));
  REQUIRE(sm.matrix.off[0] == Approx(std::sqrt(2.0)));
  const auto ev = sector_eigenvalues(sm, 2);
  REQUIRE(ev[0] == Approx(1.0).margin(1e-12));
  REQUIRE(ev[1] == Approx(4.0).margin(1e-12));
}

TEST_CASE("decoupled spin limit and fixed quadratic couplings") {
  // mu = 0: diagonal is the pure photon ladder 2 x n.
  const ModelParams m(0.4, 0.0);
  const SectorMatrix sm = build_sector_matrix(m, Parity::plus_one, 8);
  for (std::size_t k = 0; k < sm.basis.indices.size(); ++k)
    REQUIRE(sm.matrix.diag[k] == Approx(2.0 * m.x() * sm.basis.indices[k]));
  REQUIRE(sm.matrix.diag[0] == 0.0);  // 1x1 head block is exactly zero

  // The n=2 <-> n=4 coupling is sqrt(12) in every sector holding both.
  for (Parity s : {Parity::plus_one, Parity::minus_one}) {
    const SectorMatrix t = build_sector_matrix(ModelParams(0.7, 2.0), s, 8);
    REQUIRE(t.basis.indices[1] == 2);
    REQUIRE(t.basis.indices[2] == 4);
    REQUIRE(t.matrix.off[1] == Approx(std::sqrt(12.0)));
  }

  REQUIRE_THROWS_AS(sector_eigenvalues(sm, 100), std::invalid_argument);
}

TEST_CASE("truncation convergence and interlacing on sector matrices") {
  const ModelParams m(0.5, 3.0);
  for (Parity s : {Parity::plus_one, Parity::plus_i}) {
    // The monotonicity margin is the certification width, so solve tight.
    const auto a = sector_eigenvalues(build_sector_matrix(m, s, 200), 10, 1e-15);
    const auto b = sector_eigenvalues(build_sector_matrix(m, s, 240), 10, 1e-15);
    for (int i = 0; i < 10; ++i) {
      REQUIRE(std::abs(a[i] - b[i]) < 1e-9);
      // Adding a basis state can only lower each eigenvalue.
      REQUIRE(b[i] <= a[i] + 1e-12);
    }
  }
}

TEST_CASE("relabeling s -> -s flips the spins and nothing else") {
  const ModelParams m(0.37, 2.5);
  for (Parity s : all_parities) {
    const SectorMatrix a = build_sector_matrix(m, s, 30);
    const SectorMatrix b = build_sector_matrix(m, parity_negate(s), 30);
    REQUIRE(a.basis.indices == b.basis.indices);
    for (std::size_t k = 0; k < a.basis.spins.size(); ++k) {
      REQUIRE(b.basis.spins[k] == -a.basis.spins[k]);
      REQUIRE(b.matrix.diag[k] ==
              Approx(2.0 * m.x() * a.basis.indices[k] - m.mu * a.basis.spins[k]));
    }
    REQUIRE(a.matrix.off == b.matrix.off);
  }
}

TEST_CASE("spectrum scan shape, ordering, and input validation") {
  REQUIRE_THROWS_AS(scan_spectrum(3.0, {}, 4, 40), std::invalid_argument);
  REQUIRE_THROWS_AS(scan_spectrum(3.0, {0.5, 0.3}, 4, 40), std::invalid_argument);
  REQUIRE_THROWS_AS(scan_spectrum(3.0, {0.0, 0.5}, 4, 40), std::invalid_argument);
  REQUIRE_THROWS_AS(scan_spectrum(3.0, {0.5, 1.0}, 4, 40), std::invalid_argument);

  // Single-point grid: one column per sector.
  const SpectrumTable one = scan_spectrum(3.0, {0.5}, 4, 60);
  for (std::size_t si = 0; si < 4; ++si) {
    REQUIRE(one.energies[si].size() == 1);
    REQUIRE(one.energies[si][0].size() == 4);
  }
  REQUIRE(one.failures.empty());

  std::vector<double> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(0.1 + 0.5 * i / 39.0);
  const SpectrumTable t = scan_spectrum(3.0, grid, 6, 140);
  for (std::size_t si = 0; si < 4; ++si) {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      REQUIRE(std::is_sorted(t.energies[si][p].begin(), t.energies[si][p].end()));
      if (p > 0) {
        // Curves are continuous: steps bounded by grid spacing times the
        // diagonal slope bound n_max (1/kappa^2 - 1), doubled because level
        // repulsion mixes photon numbers and inflates slopes by O(1).
        const double h = grid[p] - grid[p - 1];
        const double slope = 2.0 * 24.0 * (1.0 / (grid[p - 1] * grid[p - 1]) - 1.0);
        for (int l = 0; l < 6; ++l)
          REQUIRE(std::abs(t.energies[si][p][l] - t.energies[si][p - 1][l]) <
                  h * slope);
      }
    }
  }
}

TEST_CASE("crossing classification lattice rules") {
  auto classify_chi = [](double chi) {
    CrossingRecord r;
    r.chi_star = chi;
    detail::classify(r);
    return r;
  };
  const CrossingRecord judd = classify_chi(2.0);  // m = 8
  REQUIRE(judd.family == Family::juddian);
  REQUIRE(judd.index == 4);
  const CrossingRecord trans = classify_chi(1.25);  // m = 5
  REQUIRE(trans.family == Family::transcendental);
  REQUIRE(trans.index == 1);
  const CrossingRecord low = classify_chi(0.75);  // m = 3: no such family
  REQUIRE(low.family == Family::unclassified);
  const CrossingRecord off = classify_chi(1.2503);  // outside the window
  REQUIRE(off.family == Family::unclassified);
  REQUIRE(off.index == -1);
}

TEST_CASE("detected crossings: location, classification, parity pairing") {
  // mu = 3 on a window that brackets the quarter-lattice crossing whose
  // location is known in closed form: kappa* = 3 - 2 sqrt(2), E* = 4 sqrt(2) - 3.
  std::vector<double> grid;
  for (int i = 0; i < 6; ++i) grid.push_back(0.12 + 0.10 * i / 5.0);
  const SpectrumTable t = scan_spectrum(3.0, grid, 5, 160);
  REQUIRE_THROWS_AS(find_crossings(SpectrumTable{{0.5}, 3.0, 40, 2, {}, {}}, 1e-10),
                    std::invalid_argument);

  const auto records = find_crossings(t, 1e-10);
  REQUIRE(!records.empty());

  const double kappa_exact = 3.0 - 2.0 * std::sqrt(2.0);
  const CrossingRecord* target = nullptr;
  for (const auto& r : records) {
    REQUIRE(r.parity_pair[0] != r.parity_pair[1]);
    if (std::abs(r.kappa_star - kappa_exact) < 1e-6) target = &r;
    // Family-dependent parity pairing: equal-|n|-parity for half-integer chi,
    // mixed for quarter-integer chi.
    const bool even0 = parity_is_even(r.parity_pair[0]);
    const bool even1 = parity_is_even(r.parity_pair[1]);
    if (r.family == Family::juddian) REQUIRE(even0 == even1);
    if (r.family == Family::transcendental) REQUIRE(even0 != even1);
    if (r.family != Family::unclassified)
      REQUIRE(std::abs(r.chi_offset) < 1e-4);
  }
  REQUIRE(target != nullptr);
  REQUIRE(target->kappa_star == Approx(kappa_exact).margin(1e-8));
  REQUIRE(target->E_star == Approx(4.0 * std::sqrt(2.0) - 3.0).margin(1e-7));
  REQUIRE(target->chi_star == Approx(1.25).margin(1e-5));
  REQUIRE(target->family == Family::transcendental);
  REQUIRE(target->index == 1);
  REQUIRE(parity_is_even(target->parity_pair[0]) !=
          parity_is_even(target->parity_pair[1]));

  // Exactly two levels meet: the third-closest eigenvalue over all four
  // sectors stays separated by far more than the refinement width.
  const ModelParams at_star(target->kappa_star, 3.0);
  std::vector<double> gaps;
  for (Parity s : all_parities) {
    const auto ev = sector_eigenvalues(build_sector_matrix(at_star, s, 160), 5);
    for (double E : ev) gaps.push_back(std::abs(E - target->E_star));
  }
  std::sort(gaps.begin(), gaps.end());
  REQUIRE(gaps[0] < 1e-6);
  REQUIRE(gaps[1] < 1e-6);
  REQUIRE(gaps[2] > 1e-7 * 1e3);
}
