#pragma once

// Symmetric tridiagonal eigenvalue tools.
//
// The primary solver is Sturm-sequence bisection: eigenvalue_count(x) is the
// number of eigenvalues strictly below x, obtained from the signs of the
// leading-principal-minor ratios. Bisection on that count gives the k-th
// smallest eigenvalue with a certified bracket, which is what crossing
// detection needs (trustworthy ordering, not raw speed). A QL sweep is kept
// as an independent full-spectrum fallback.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tprabi {

struct SymTridiag {
  std::vector<double> diag;  // d[0..n-1]
  std::vector<double> off;   // e[0..n-2], coupling i <-> i+1

  std::size_t size() const { return diag.size(); }
};

inline void check_shape(const SymTridiag& t) {
  if (t.diag.empty()) throw std::invalid_argument("SymTridiag: empty matrix");
  if (t.off.size() + 1 != t.diag.size())
    throw std::invalid_argument("SymTridiag: off.size() must be diag.size()-1");
}

// Gershgorin interval containing the whole spectrum.
inline std::pair<double, double> gershgorin_bounds(const SymTridiag& t) {
  check_shape(t);
  const std::size_t n = t.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  return {lo, hi};
}

// Number of eigenvalues strictly less than x. The recurrence
//   q_i = d_i - x - e_{i-1}^2 / q_{i-1}
// counts negative q_i; pivmin guards division by a vanishing pivot.
inline int eigenvalue_count_below(const SymTridiag& t, double x) {
  const std::size_t n = t.size();
  double pivmin = std::numeric_limits<double>::min();
  for (double e : t.off) pivmin = std::max(pivmin, e * e);
  pivmin *= std::numeric_limits<double>::epsilon() * std::numeric_limits<double>::epsilon();
  pivmin = std::max(pivmin, std::numeric_limits<double>::min());

  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e2 = (i == 0) ? 0.0 : t.off[i - 1] * t.off[i - 1];
    q = t.diag[i] - x - e2 / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (0-based), certified: the returned value is the
// midpoint of a bracket of width below tol that contains it.
inline double eigenvalue_by_index(const SymTridiag& t, int k, double tol = 1e-12) {
  check_shape(t);
  if (k < 0 || static_cast<std::size_t>(k) >= t.size())
    throw std::invalid_argument("eigenvalue_by_index: index out of range");
  auto [lo, hi] = gershgorin_bounds(t);
  // Widen by one ulp-scale step so counts at the ends are 0 and n.
  const double span = hi - lo;
  lo -= 1e-12 * (1.0 + std::abs(lo)) + 1e-15 * span;
  hi += 1e-12 * (1.0 + std::abs(hi)) + 1e-15 * span;
  const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  const int max_iter = 200;
  int iter = 0;
  while (hi - lo > tol * scale) {
    if (++iter > max_iter)
      throw std::runtime_error("eigenvalue_by_index: bisection failed to converge at index " +
                               std::to_string(k));
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at rounding resolution
    if (eigenvalue_count_below(t, mid) <= k)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// k smallest eigenvalues, ascending.
inline std::vector<double> smallest_eigenvalues(const SymTridiag& t, int k,
                                                double tol = 1e-12) {
  check_shape(t);
  if (k < 1 || static_cast<std::size_t>(k) > t.size())
    throw std::invalid_argument("smallest_eigenvalues: bad count");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(eigenvalue_by_index(t, i, tol));
  return out;
}

// Full spectrum by the implicit-shift QL algorithm. Independent of the Sturm
// path; used as a cross-check and for small dense-ish problems.
inline std::vector<double> ql_eigenvalues(const SymTridiag& t) {
  check_shape(t);
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = t.off[i];

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (++iter == 50) throw std::runtime_error("ql_eigenvalues: too many iterations");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (r == 0.0 && m > l + 1) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

// ---------------------------------------------------------------------------
// General (possibly nonsymmetric) tridiagonal linear algebra, used by inverse
// iteration on the exact-state band matrices.
// ---------------------------------------------------------------------------

template <class T>
struct Tridiag {
  std::vector<T> diag;   // d[0..n-1]
  std::vector<T> sub;    // a[0..n-2], row i+1 column i
  std::vector<T> super;  // c[0..n-2], row i column i+1

  std::size_t size() const { return diag.size(); }
};

// Solve (A - shift I) x = b by LU with partial pivoting (fill-in one extra
// superdiagonal). Returns false when a pivot collapses below pivot_floor.
template <class T>
bool solve_shifted(const Tridiag<T>& A, const T& shift, std::vector<T> b,
                   std::vector<T>& x, double pivot_floor = 0.0) {
  const std::size_t n = A.size();
  if (n == 0 || b.size() != n) throw std::invalid_argument("solve_shifted: shape");
  std::vector<T> d(n), u1(n, T(0)), u2(n, T(0));
  for (std::size_t i = 0; i < n; ++i) d[i] = A.diag[i] - shift;
  for (std::size_t i = 0; i + 1 < n; ++i) u1[i] = A.super[i];
  std::vector<T> l = (n > 1) ? A.sub : std::vector<T>{};

  using std::abs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    T low = l[i];
    if (abs(d[i]) < abs(low)) {  // swap rows i, i+1
      std::swap(d[i], low);
      std::swap(u1[i], d[i + 1]);
      if (i + 2 < n) std::swap(u2[i], u1[i + 1]);
      std::swap(b[i], b[i + 1]);
    }
    if (abs(d[i]) <= pivot_floor) return false;
    const T m = low / d[i];
    d[i + 1] -= m * u1[i];
    if (i + 2 < n) u1[i + 1] -= m * u2[i];
    b[i + 1] -= m * b[i];
  }
  if (abs(d[n - 1]) <= pivot_floor) return false;

  x.assign(n, T(0));
  for (std::size_t ii = n; ii-- > 0;) {
    T acc = b[ii];
    if (ii + 1 < n) acc -= u1[ii] * x[ii + 1];
    if (ii + 2 < n) acc -= u2[ii] * x[ii + 2];
    x[ii] = acc / d[ii];
  }
  return true;
}

}  // namespace tprabi
