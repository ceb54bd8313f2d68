#pragma once

// Confluent hypergeometric M(a,b,x) = sum_k (a)_k / (b)_k x^k / k! and the
// modified Bessel function of the first kind, both by direct power series
// with a running condition estimate (largest term over final sum). For
// Re(x) < 0 the series alternates destructively; the Kummer transformation
// M(a,b,x) = e^x M(b-a,b,-x) moves the work to a benign argument.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace tprabi {

using complexd = std::complex<double>;

struct SeriesValue {
  complexd value;
  double condition;  // max |term| / |sum|; large => cancellation ate digits
};

inline SeriesValue kummer_m(double a, double b, complexd x) {
  if (b <= 0.0 && b == std::floor(b))
    throw std::invalid_argument("kummer_m: b at a non-positive integer pole");
  if (x.real() < 0.0) {
    SeriesValue r = kummer_m(b - a, b, -x);
    r.value *= std::exp(x);
    return r;
  }
  complexd term(1.0, 0.0), sum(1.0, 0.0);
  double peak = 1.0;
  const int kmax = 4000;
  for (int k = 0; k < kmax; ++k) {
    term *= (a + k) / (b + k) * x / double(k + 1);
    sum += term;
    peak = std::max(peak, std::abs(term));
    if ((a + k) == 0.0) break;  // polynomial case terminated exactly
    if (std::abs(term) < 1e-18 * std::abs(sum) && double(k) > std::abs(x)) {
      return {sum, peak / std::max(std::abs(sum), 1e-300)};
    }
  }
  if (std::abs(term) < 1e-18 * std::abs(sum) || term == complexd(0.0, 0.0))
    return {sum, peak / std::max(std::abs(sum), 1e-300)};
  throw std::runtime_error("kummer_m: series did not converge (|x| too large)");
}

// d/dx M(a,b,x) = (a/b) M(a+1,b+1,x).
inline SeriesValue kummer_m_derivative(double a, double b, complexd x) {
  SeriesValue r = kummer_m(a + 1.0, b + 1.0, x);
  r.value *= a / b;
  return r;
}

// I_nu(y) for real order and real y >= 0 (small-argument regime only; the
// cross-checks need |y| of order a few).
inline double bessel_i(double nu, double y) {
  if (y < 0.0) throw std::invalid_argument("bessel_i: y must be >= 0");
  if (y == 0.0) return (nu == 0.0) ? 1.0 : (nu > 0.0 ? 0.0 : INFINITY);
  const double h = 0.5 * y;
  double term = std::pow(h, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= h * h / (double(k) * (nu + double(k)));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) return sum;
  }
  throw std::runtime_error("bessel_i: series did not converge");
}

}  // namespace tprabi
