#pragma once

// Fock realization of the four parity sectors.
//
// tau acts on photon-number states as multiplication by (-i)^n combined with
// the spin flip sigma_x, so a tau-eigenstate with eigenvalue s pairs |n> with
// the sigma_x eigenvector of eigenvalue lambda_n = s (-i)^n. Sectors with
// s = +-1 live on even n, s = +-i on odd n, and the quadratic coupling
// (a+)^2 + a^2 moves n by two, keeping each sector closed and tridiagonal.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "tprabi/model.hpp"
#include "tprabi/tridiag.hpp"

namespace tprabi {

struct SectorBasis {
  Parity s;
  std::vector<int> indices;  // photon numbers, ascending, step 2
  std::vector<int> spins;    // lambda_n = s (-i)^n, each +-1
};

inline SectorBasis build_sector_basis(Parity s, int N) {
  if (N < 2) throw std::invalid_argument("build_sector_basis: need N >= 2");
  SectorBasis b;
  b.s = s;
  const int n0 = parity_is_even(s) ? 0 : 1;
  // (-i)^n cycles with period four; components stay exact.
  const complexd minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  for (int n = n0; n <= N; n += 2) {
    const complexd lam = parity_value(s) * minus_i_pow[n % 4];
    if (lam.imag() != 0.0)
      throw std::runtime_error("build_sector_basis: spin not real");
    b.indices.push_back(n);
    b.spins.push_back(lam.real() > 0.0 ? +1 : -1);
  }
  return b;
}

struct SectorMatrix {
  SectorBasis basis;
  SymTridiag matrix;
  int truncation;
};

// K restricted to the sector: diagonal 2 x n + mu lambda_n, off-diagonal
// sqrt((n+1)(n+2)) between n and n+2.
inline SectorMatrix build_sector_matrix(const ModelParams& m, Parity s, int N) {
  SectorMatrix sm;
  sm.basis = build_sector_basis(s, N);
  sm.truncation = N;
  const double x = m.x();
  for (std::size_t k = 0; k < sm.basis.indices.size(); ++k) {
    const int n = sm.basis.indices[k];
    sm.matrix.diag.push_back(2.0 * x * n + m.mu * sm.basis.spins[k]);
    if (k + 1 < sm.basis.indices.size())
      sm.matrix.off.push_back(std::sqrt(double(n + 1) * double(n + 2)));
  }
  return sm;
}

inline std::vector<double> sector_eigenvalues(const SectorMatrix& sm, int k,
                                              double tol = 1e-12) {
  if (k < 1 || static_cast<std::size_t>(k) > sm.matrix.size())
    throw std::invalid_argument("sector_eigenvalues: k exceeds dimension");
  return smallest_eigenvalues(sm.matrix, k, tol);
}

}  // namespace tprabi
