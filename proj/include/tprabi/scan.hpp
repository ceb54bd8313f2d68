#pragma once

// kappa-grid spectrum scans per parity sector, and detection + refinement of
// level crossings between sectors.
//
// Within one sector the tridiagonal matrix has strictly positive couplings,
// so its eigenvalues are simple at every kappa: the sorted index IS the
// continuous curve label, and crossings can only happen between different
// sectors. Sign changes of E_i^{(r)} - E_j^{(s)} over the grid are bracketed,
// each bracket is subdivided to catch close pairs, and every crossing is
// refined by bisection on freshly solved eigenvalues.

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "tprabi/model.hpp"
#include "tprabi/sector.hpp"
#include "tprabi/tridiag.hpp"

namespace tprabi {

struct SpectrumTable {
  std::vector<double> grid;  // kappa values, ascending, inside (0,1)
  double mu = 0.0;
  int truncation = 0;
  int levels = 0;
  // energies[sector][grid point][level index], sector order = all_parities.
  std::array<std::vector<std::vector<double>>, 4> energies;
  std::vector<std::string> failures;  // per-point solver diagnostics
};

inline SpectrumTable scan_spectrum(double mu, const std::vector<double>& grid,
                                   int k, int N) {
  if (grid.empty()) throw std::invalid_argument("scan_spectrum: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0))
      throw std::invalid_argument("scan_spectrum: grid must lie in (0,1)");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("scan_spectrum: grid must be ascending");
  }
  SpectrumTable t;
  t.grid = grid;
  t.mu = mu;
  t.truncation = N;
  t.levels = k;
  for (std::size_t si = 0; si < all_parities.size(); ++si) {
    t.energies[si].reserve(grid.size());
    for (double kappa : grid) {
      try {
        const ModelParams m(kappa, mu);
        const SectorMatrix sm = build_sector_matrix(m, all_parities[si], N);
        t.energies[si].push_back(sector_eigenvalues(sm, k));
      } catch (const std::exception& e) {
        t.energies[si].push_back(
            std::vector<double>(static_cast<std::size_t>(k), NAN));
        t.failures.push_back("sector " +
                             std::string(parity_name(all_parities[si])) +
                             " kappa=" + std::to_string(kappa) + ": " + e.what());
      }
    }
  }
  return t;
}

enum class Family { juddian, transcendental, unclassified };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::juddian: return "juddian";
    case Family::transcendental: return "transcendental";
    default: return "unclassified";
  }
}

struct CrossingRecord {
  double kappa_star = 0.0;
  double E_star = 0.0;
  double chi_star = 0.0;
  std::array<Parity, 2> parity_pair{Parity::plus_one, Parity::plus_one};
  Family family = Family::unclassified;
  int index = -1;        // n for a half-integer-chi crossing, ell for quarter
  double chi_offset = 0.0;  // chi_star minus the nearest lattice point m/4
  std::string diagnostics;
};

namespace detail {

// Threshold on |chi - m/4| inside which a crossing is classified.
constexpr double kLatticeWindow = 1e-4;

inline void classify(CrossingRecord& r) {
  const int m = static_cast<int>(std::lround(4.0 * r.chi_star));
  r.chi_offset = r.chi_star - 0.25 * m;
  if (std::abs(r.chi_offset) >= kLatticeWindow) {
    r.family = Family::unclassified;
    r.index = -1;
    return;
  }
  if (m % 2 == 0) {
    r.family = Family::juddian;
    r.index = m / 2;  // chi = n/2
  } else if (m >= 5) {
    r.family = Family::transcendental;
    r.index = (m - 3) / 2;  // chi = (2 ell + 3)/4
  } else {
    r.family = Family::unclassified;
    r.index = -1;
  }
}

}  // namespace detail

// Refines and classifies all sign changes of inter-sector level differences.
inline std::vector<CrossingRecord> find_crossings(const SpectrumTable& t,
                                                  double refine_tol = 1e-10) {
  if (t.grid.size() < 2)
    throw std::invalid_argument("find_crossings: need at least 2 grid points");

  auto level_at = [&](std::size_t sector, int level, double kappa) {
    const ModelParams m(kappa, t.mu);
    const SectorMatrix sm = build_sector_matrix(m, all_parities[sector], t.truncation);
    return eigenvalue_by_index(sm.matrix, level, 1e-13);
  };

  std::vector<CrossingRecord> out;

  auto refine = [&](std::size_t sr, std::size_t ss, int i, int j, double ka,
                    double kb, double fa, double fb) {
    int iter = 0;
    while (kb - ka > refine_tol && ++iter < 200) {
      const double km = 0.5 * (ka + kb);
      const double fm = level_at(sr, i, km) - level_at(ss, j, km);
      if ((fa < 0.0) == (fm < 0.0)) {
        ka = km;
        fa = fm;
      } else {
        kb = km;
        fb = fm;
      }
    }
    CrossingRecord r;
    r.kappa_star = 0.5 * (ka + kb);
    r.E_star = 0.5 * (level_at(sr, i, r.kappa_star) + level_at(ss, j, r.kappa_star));
    r.chi_star = chi_from_energy(r.E_star, ModelParams(r.kappa_star, t.mu));
    r.parity_pair = {all_parities[sr], all_parities[ss]};
    if (iter >= 200) {
      r.family = Family::unclassified;
      r.diagnostics = "bisection stalled";
    } else {
      detail::classify(r);
    }
    // Deduplicate: same sector pair within a few refinement widths.
    for (const auto& prev : out) {
      if (prev.parity_pair == r.parity_pair &&
          std::abs(prev.kappa_star - r.kappa_star) < 10.0 * refine_tol)
        return;
    }
    out.push_back(r);
  };

  // Two level curves can meet without the sign of their difference changing:
  // at a double root of the closure determinant both curves pass through the
  // same (kappa, E) point and separate again on the same side.  Such contacts
  // are invisible to bracketing, so interior local minima of |difference| with
  // constant sign are refined by golden-section and accepted only if the gap
  // closes to kTangencyAccept (energies are O(1), absolute scale).
  constexpr double kTangencyScreen = 5e-3;
  constexpr double kTangencyAccept = 1e-7;
  auto probe_tangency = [&](std::size_t sr, std::size_t ss, int i, int j,
                            double ka, double kb) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = ka, b = kb;
    auto gap = [&](double k) {
      return std::abs(level_at(sr, i, k) - level_at(ss, j, k));
    };
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double g1 = gap(x1), g2 = gap(x2);
    int iter = 0;
    while (b - a > refine_tol && ++iter < 200) {
      if (g1 < g2) {
        b = x2; x2 = x1; g2 = g1;
        x1 = b - gr * (b - a);
        g1 = gap(x1);
      } else {
        a = x1; x1 = x2; g1 = g2;
        x2 = a + gr * (b - a);
        g2 = gap(x2);
      }
    }
    const double k_hat = 0.5 * (a + b);
    if (gap(k_hat) >= kTangencyAccept) return;
    CrossingRecord r;
    r.kappa_star = k_hat;
    r.E_star = 0.5 * (level_at(sr, i, k_hat) + level_at(ss, j, k_hat));
    r.chi_star = chi_from_energy(r.E_star, ModelParams(r.kappa_star, t.mu));
    r.parity_pair = {all_parities[sr], all_parities[ss]};
    detail::classify(r);
    r.diagnostics = "tangential";
    for (const auto& prev : out) {
      if (prev.parity_pair == r.parity_pair &&
          std::abs(prev.kappa_star - r.kappa_star) < 10.0 * refine_tol)
        return;
    }
    out.push_back(r);
  };

  // Scan one kappa interval for one (sector, level) x (sector, level) pair,
  // with an 8-fold subdivision so close crossings in one cell are separated.
  auto scan_interval = [&](std::size_t sr, std::size_t ss, int i, int j,
                           double ka, double kb, double fa, double fb) {
    const int sub = 8;
    double left_k = ka, left_f = fa;
    for (int c = 1; c <= sub; ++c) {
      const double right_k = (c == sub) ? kb : ka + (kb - ka) * c / double(sub);
      const double right_f = (c == sub)
                                 ? fb
                                 : level_at(sr, i, right_k) - level_at(ss, j, right_k);
      if ((left_f < 0.0) != (right_f < 0.0))
        refine(sr, ss, i, j, left_k, right_k, left_f, right_f);
      left_k = right_k;
      left_f = right_f;
    }
  };

  const std::size_t np = t.grid.size();
  std::vector<double> d(np);
  for (std::size_t sr = 0; sr < 4; ++sr) {
    for (std::size_t ss = sr + 1; ss < 4; ++ss) {
      for (int i = 0; i < t.levels; ++i) {
        for (int j = 0; j < t.levels; ++j) {
          for (std::size_t p = 0; p < np; ++p)
            d[p] = t.energies[sr][p][static_cast<std::size_t>(i)] -
                   t.energies[ss][p][static_cast<std::size_t>(j)];
          for (std::size_t p = 0; p + 1 < np; ++p) {
            if (std::isnan(d[p]) || std::isnan(d[p + 1])) continue;
            if ((d[p] < 0.0) != (d[p + 1] < 0.0))
              scan_interval(sr, ss, i, j, t.grid[p], t.grid[p + 1], d[p], d[p + 1]);
          }
          for (std::size_t p = 1; p + 1 < np; ++p) {
            if (std::isnan(d[p - 1]) || std::isnan(d[p]) || std::isnan(d[p + 1]))
              continue;
            const bool same_sign = (d[p - 1] < 0.0) == (d[p] < 0.0) &&
                                   (d[p] < 0.0) == (d[p + 1] < 0.0);
            if (same_sign && std::abs(d[p]) < kTangencyScreen &&
                std::abs(d[p]) <= std::abs(d[p - 1]) &&
                std::abs(d[p]) <= std::abs(d[p + 1]))
              probe_tangency(sr, ss, i, j, t.grid[p - 1], t.grid[p + 1]);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace tprabi
