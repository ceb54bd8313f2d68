#pragma once

// Degenerate eigenstates on the even lattice points chi = n/2: the classic
// family of the form psi = e^{a z^2} (P(z), Q(z)) with polynomial components.
// Normalizability forces 2a = -kappa (the other Gaussian exponent has growth
// type above 1/2). Substituting into the coupled system turns the first
// equation into a map Q = Q[P] and the second into a square linear system for
// the coefficients of P on a single parity ladder; its determinant vanishes on
// the same kappa set where the sector spectra cross at chi = n/2.
//
// deg P = n-2 with parity(P) = parity(n); deg Q = n-4. For n = 2 and n = 3
// the system degenerates to a 1x1 matrix with constant nonzero entry, so
// those lattice points carry no states of this form — an empty result, not a
// failure.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "tprabi/exact.hpp"
#include "tprabi/model.hpp"

namespace tprabi {

struct JuddState {
  int n = 0;            // lattice index, chi = n/2
  double kappa = 0.0;
  double mu = 0.0;
  double energy = 0.0;  // (1/kappa - kappa)(n-2) - kappa
  std::vector<double> P;  // P[j] z^j, degree n-2, leading coefficient 1
  std::vector<double> Q;  // Q[j] z^j, degree n-4 (empty below n = 4)
};

namespace detail {

// Minimal dense LU with partial pivoting; enough for the small parity-ladder
// systems (dimension <= n/2).
template <class T>
struct DenseLU {
  std::vector<std::vector<T>> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

template <class T>
DenseLU<T> lu_decompose(std::vector<std::vector<T>> A) {
  using std::abs;
  const std::size_t n = A.size();
  DenseLU<T> f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (abs(A[r][col]) > abs(A[piv][col])) piv = r;
    if (piv != col) {
      std::swap(A[piv], A[col]);
      std::swap(f.perm[piv], f.perm[col]);
      f.sign = -f.sign;
    }
    if (A[col][col] == 0) { f.singular = true; continue; }
    for (std::size_t r = col + 1; r < n; ++r) {
      const T m = A[r][col] / A[col][col];
      A[r][col] = m;
      for (std::size_t c = col + 1; c < n; ++c) A[r][c] -= m * A[col][c];
    }
  }
  f.lu = std::move(A);
  return f;
}

template <class T>
T lu_determinant(const DenseLU<T>& f) {
  T det = T(f.sign);
  for (std::size_t i = 0; i < f.lu.size(); ++i) det *= f.lu[i][i];
  return det;
}

template <class T>
bool lu_solve(const DenseLU<T>& f, const std::vector<T>& b, std::vector<T>& x) {
  if (f.singular) return false;
  const std::size_t n = f.lu.size();
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu[i][j] * x[j];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= f.lu[ii][j] * x[j];
    x[ii] /= f.lu[ii][ii];
  }
  return true;
}

// Parity ladder of P-coefficient indices: j == n (mod 2), 0 <= j <= n-2.
inline std::vector<int> judd_ladder(int n) {
  std::vector<int> js;
  for (int j = (n % 2 == 0) ? 0 : 1; j <= n - 2; j += 2) js.push_back(j);
  return js;
}

// The square closure system over the ladder. With 2 delta = 1/k - k and
// 2 w = 3k + 1/k, the first transformed equation
//   P'' + 2 delta z P' - (k+E) P + mu Q = 0
// determines Q coefficientwise,
//   q_j = [ (k + E - 2 delta j) p_j - (j+2)(j+1) p_{j+2} ] / mu,
// and the second,
//   Q'' - 2 w z Q' + (E-k) Q + (2+2k^2) z^2 Q - mu P = 0,
// read at each ladder power of z, yields the matrix.
template <class T>
std::vector<std::vector<T>> judd_closure_matrix(int n, const T& kappa, const T& mu) {
  const T E = (1 / kappa - kappa) * (n - 2) - kappa;
  const T two_delta = 1 / kappa - kappa;
  const T two_w = 3 * kappa + 1 / kappa;

  const std::vector<int> js = judd_ladder(n);
  const std::size_t M = js.size();
  std::vector<std::size_t> col(n + 1, M);  // p-index -> column
  for (std::size_t c = 0; c < M; ++c) col[js[c]] = c;

  // Linear form of q_j over the p unknowns (zero form off the valid range).
  auto q_form = [&](int jq) {
    std::vector<T> f(M, T(0));
    if (jq < 0 || jq > n - 4 || ((jq - n) % 2 != 0)) return f;
    f[col[jq]] += (kappa + E - two_delta * jq) / mu;
    if (jq + 2 <= n - 2) f[col[jq + 2]] -= T((jq + 2) * (jq + 1)) / mu;
    return f;
  };

  std::vector<std::vector<T>> A(M, std::vector<T>(M, T(0)));
  for (std::size_t r = 0; r < M; ++r) {
    const int j = js[r];
    const std::vector<T> q2 = q_form(j + 2);
    const std::vector<T> q0 = q_form(j);
    const std::vector<T> qm = q_form(j - 2);
    const T c2 = T((j + 2) * (j + 1));
    const T c0 = (E - kappa) - two_w * j;
    const T cm = 2 + 2 * kappa * kappa;
    for (std::size_t c = 0; c < M; ++c)
      A[r][c] = c2 * q2[c] + c0 * q0[c] + cm * qm[c];
    A[r][col[j]] -= mu;
  }
  return A;
}

// Determinant with rows scaled to unit max: O(1) values for root scanning,
// same sign as the raw determinant.
template <class T>
T judd_det_normalized(int n, const T& kappa, const T& mu) {
  using std::abs;
  std::vector<std::vector<T>> A = judd_closure_matrix<T>(n, kappa, mu);
  for (auto& row : A) {
    T m(0);
    for (const T& v : row) m = (std::max)(m, abs(v));
    if (m == 0) return T(0);
    for (T& v : row) v /= m;
  }
  return lu_determinant(lu_decompose(std::move(A)));
}

template <class T>
double dense_residual(const std::vector<std::vector<T>>& A, const std::vector<T>& p) {
  using std::abs;
  T rmax(0), mmax(0), pmax(0);
  for (std::size_t r = 0; r < A.size(); ++r) {
    T acc(0), row(0);
    for (std::size_t c = 0; c < A.size(); ++c) {
      acc += A[r][c] * p[c];
      row += abs(A[r][c]);
    }
    rmax = (std::max)(rmax, abs(acc));
    mmax = (std::max)(mmax, row);
  }
  for (const T& v : p) pmax = (std::max)(pmax, abs(v));
  if (mmax == 0 || pmax == 0) return 0.0;
  return static_cast<double>(rmax / (mmax * pmax));
}

template <class T>
std::vector<T> dense_inverse_iteration(const std::vector<std::vector<T>>& A, unsigned seed) {
  using std::abs;
  const std::size_t M = A.size();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<T> v(M);
  for (auto& c : v) c = T(uni(rng));
  DenseLU<T> f = lu_decompose(A);
  if (f.singular) {
    // Exact zero pivot: displace the diagonal relative to the matrix scale;
    // the null direction still dominates the solve overwhelmingly.
    T mmax(0);
    for (const auto& row : A)
      for (const T& e : row) mmax = (std::max)(mmax, abs(e));
    std::vector<std::vector<T>> Ashift = A;
    for (std::size_t i = 0; i < M; ++i) Ashift[i][i] += T(1e-14) * mmax;
    f = lu_decompose(std::move(Ashift));
    if (f.singular)
      throw std::runtime_error("judd: closure matrix exactly singular in LU");
  }
  for (int round = 0; round < 2; ++round) {
    T norm(0);
    for (const T& c : v) norm = (std::max)(norm, abs(c));
    for (T& c : v) c /= norm;
    std::vector<T> w;
    lu_solve(f, v, w);
    v = std::move(w);
  }
  return v;
}

}  // namespace detail

// All Gaussian-polynomial states at chi = n/2 for the given mu: one state per
// kappa root of the ladder determinant. n = 2, 3 legitimately return nothing.
inline std::vector<JuddState> judd_states(int n, double mu,
                                          RootScanOptions opt = {}) {
  if (n < 2) throw std::invalid_argument("judd_states: n must be >= 2");
  if (mu <= 0) throw std::invalid_argument("judd_states: mu must be positive");

  auto f_d = [n, mu](double k) { return detail::judd_det_normalized<double>(n, k, mu); };
  auto f_q = [n, mu](const quad& k) { return detail::judd_det_normalized<quad>(n, k, quad(mu)); };
  auto f_r = [n, mu](const rational& k) {
    using detail::judd_closure_matrix;
    return detail::lu_determinant(detail::lu_decompose(
        judd_closure_matrix<rational>(n, k, rational(mu))));
  };
  const std::vector<KappaRoot> roots = detail::scan_roots(f_d, f_q, f_r, opt);

  std::vector<JuddState> out;
  const std::vector<int> js = detail::judd_ladder(n);
  for (const KappaRoot& root : roots) {
    JuddState st;
    st.n = n;
    st.kappa = root.kappa;
    st.mu = mu;
    st.energy = (1.0 / root.kappa - root.kappa) * (n - 2) - root.kappa;

    const auto A = detail::judd_closure_matrix<double>(n, root.kappa, mu);
    std::vector<double> p = detail::dense_inverse_iteration<double>(A, 5150u + n);
    double top = p.back();
    double pmax = 0.0;
    for (double c : p) pmax = std::max(pmax, std::abs(c));
    if (std::abs(top) < 1e-8 * pmax)
      throw std::runtime_error("judd_states: vanishing leading coefficient");
    for (double& c : p) c /= top;

    if (detail::dense_residual<double>(A, p) >= 1e-9) {
      const auto Aq = detail::judd_closure_matrix<quad>(n, quad(root.kappa), quad(mu));
      std::vector<quad> pq(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) pq[i] = quad(p[i]);
      const auto fq = detail::lu_decompose(Aq);
      std::vector<quad> wq;
      if (detail::lu_solve(fq, pq, wq)) {
        for (std::size_t i = 0; i < p.size(); ++i)
          p[i] = (wq[i] / wq.back()).convert_to<double>();
      }
      if (detail::dense_residual<double>(A, p) >= 1e-9)
        throw std::runtime_error("judd_states: residual target missed");
    }

    st.P.assign(n - 1, 0.0);  // degree n-2
    for (std::size_t c = 0; c < js.size(); ++c) st.P[js[c]] = p[c];

    // Q from the first transformed equation.
    const double E = st.energy;
    const double two_delta = 1.0 / st.kappa - st.kappa;
    if (n >= 4) {
      st.Q.assign(n - 3, 0.0);  // degree n-4
      for (int j = (n % 2 == 0) ? 0 : 1; j <= n - 4; j += 2) {
        double v = (st.kappa + E - two_delta * j) * st.P[j];
        if (j + 2 <= n - 2) v -= (j + 2.0) * (j + 1.0) * st.P[j + 2];
        st.Q[j] = v / mu;
      }
    }
    out.push_back(std::move(st));
  }
  return out;
}

// --------------------------------------------------------------------------
// Evaluation and parity projections.
// --------------------------------------------------------------------------

namespace detail {

inline complexd poly_eval(const std::vector<double>& p, complexd z) {
  complexd acc = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
  return acc;
}

}  // namespace detail

// psi(z) = e^{-kappa z^2/2} (P(z), Q(z)).
inline std::array<complexd, 2> eval_judd(const JuddState& s, complexd z) {
  const complexd g = std::exp(-0.5 * s.kappa * z * z);
  return {g * detail::poly_eval(s.P, z), g * detail::poly_eval(s.Q, z)};
}

// The parity image tau psi(z) = sigma_x psi(iz) = e^{+kappa z^2/2} (Q(iz), P(iz)).
inline std::array<complexd, 2> eval_judd_tau(const JuddState& s, complexd z) {
  const complexd iz = complexd(0.0, 1.0) * z;
  const complexd g = std::exp(0.5 * s.kappa * z * z);
  return {g * detail::poly_eval(s.Q, iz), g * detail::poly_eval(s.P, iz)};
}

// tau^2 psi = (-1)^n psi, so the degenerate pair {psi, tau psi} carries the
// parity eigenvectors u = psi + c tau psi with c = s for even n (s in {+1,-1})
// and c = -s for odd n (s in {+i,-i}).
inline complexd judd_projection_coefficient(const JuddState& s, Parity parity) {
  if (parity_is_even(parity) != (s.n % 2 == 0))
    throw std::invalid_argument("judd projection: parity sector does not match n");
  const complexd sv = parity_value(parity);
  return (s.n % 2 == 0) ? sv : -sv;
}

inline std::array<complexd, 2> eval_judd_projection(const JuddState& s, Parity parity,
                                                    complexd z) {
  const complexd c = judd_projection_coefficient(s, parity);
  const auto base = eval_judd(s, z);
  const auto tau = eval_judd_tau(s, z);
  return {base[0] + c * tau[0], base[1] + c * tau[1]};
}

// --------------------------------------------------------------------------
// Gaussian-polynomial calculus, shared with the verification module.
// --------------------------------------------------------------------------

// Derivatives 0..kmax of e^{b z^2} R(z): differentiating maps R -> R' + 2bz R,
// a pure polynomial recursion, so every derivative is exact.
inline std::vector<complexd> gaussian_poly_derivatives(complexd b,
                                                       const std::vector<complexd>& R,
                                                       complexd z, int kmax) {
  std::vector<std::vector<complexd>> rk(kmax + 1);
  rk[0] = R;
  for (int k = 1; k <= kmax; ++k) {
    const auto& prev = rk[k - 1];
    std::vector<complexd> next(std::max<std::size_t>(prev.size() + 1, 1), complexd(0.0));
    for (std::size_t j = 1; j < prev.size(); ++j) next[j - 1] += double(j) * prev[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j + 1] += 2.0 * b * prev[j];
    rk[k] = std::move(next);
  }
  const complexd g = std::exp(b * z * z);
  std::vector<complexd> out(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    complexd acc = 0.0;
    for (std::size_t j = rk[k].size(); j-- > 0;) acc = acc * z + rk[k][j];
    out[k] = g * acc;
  }
  return out;
}

// A projection component as a sum of two Gaussian-polynomial pieces:
//   comp 0:  e^{-k z^2/2} P(z) + c e^{+k z^2/2} Q(iz)
//   comp 1:  e^{-k z^2/2} Q(z) + c e^{+k z^2/2} P(iz)
struct GaussianPolyPair {
  complexd b1;
  std::vector<complexd> R1;
  complexd b2;
  std::vector<complexd> R2;
};

inline GaussianPolyPair judd_projection_form(const JuddState& s, Parity parity,
                                             int comp) {
  if (comp != 0 && comp != 1)
    throw std::invalid_argument("judd_projection_form: component must be 0 or 1");
  const complexd c = judd_projection_coefficient(s, parity);
  const std::vector<double>& direct = (comp == 0) ? s.P : s.Q;
  const std::vector<double>& rotated = (comp == 0) ? s.Q : s.P;

  GaussianPolyPair g;
  g.b1 = complexd(-0.5 * s.kappa, 0.0);
  g.R1.assign(direct.begin(), direct.end());
  g.b2 = complexd(0.5 * s.kappa, 0.0);
  g.R2.resize(rotated.size());
  complexd ipow(1.0, 0.0);
  for (std::size_t j = 0; j < rotated.size(); ++j) {
    g.R2[j] = c * ipow * rotated[j];  // coefficient of z^j in c * Rot(iz)
    ipow *= complexd(0.0, 1.0);
  }
  return g;
}

}  // namespace tprabi
