#pragma once

// Model parameters and parity algebra for the two-photon Rabi model in the
// Bargmann representation.
//
// Conventions used throughout the library:
//   x   = (kappa + 1/kappa) / 2,   kappa in (0,1)  =>  x > 1
//   E   = 2 (1/kappa - kappa) (chi - 1) - kappa     (bijective E <-> chi)
//   Z4 parity: tau psi(z) = sigma_x psi(iz), eigenvalues s in {+1,-1,+i,-i}

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace tprabi {

using complexd = std::complex<double>;

struct PhysicalParams {
  double omega;   // field-mode frequency
  double omega0;  // level splitting
  double g;       // coupling strength
};

// Dimensionless parameters. Invariants: 0 < kappa < 1, mu >= 0.
struct ModelParams {
  double kappa;
  double mu;

  ModelParams(double kappa_, double mu_) : kappa(kappa_), mu(mu_) {
    if (!(kappa > 0.0) || !(kappa < 1.0))
      throw std::invalid_argument("ModelParams: kappa must lie in (0,1), got " +
                                  std::to_string(kappa_));
    if (!(mu >= 0.0))
      throw std::invalid_argument("ModelParams: mu must be >= 0, got " +
                                  std::to_string(mu_));
  }

  double x() const { return 0.5 * (kappa + 1.0 / kappa); }
};

struct ConversionResult {
  ModelParams params;
  // Relative sensitivity of kappa to x, |d ln kappa / d ln x| = x/sqrt(x^2-1).
  // Large values mean the kappa extraction is ill-conditioned (x near 1).
  double kappa_condition;
};

// x = omega/(4g); kappa is the root of kappa + 1/kappa = 2x inside (0,1).
// The subtraction-safe form 1/(x + sqrt(x^2-1)) avoids cancellation at large x.
inline ConversionResult to_model_params(const PhysicalParams& p) {
  if (!(p.g > 0.0)) throw std::invalid_argument("to_model_params: g must be > 0");
  if (!(p.omega > 0.0)) throw std::invalid_argument("to_model_params: omega must be > 0");
  const double x = p.omega / (4.0 * p.g);
  if (!(x > 1.0))
    throw std::invalid_argument(
        "to_model_params: omega/(4g) must exceed 1 (got " + std::to_string(x) +
        "); kappa would leave (0,1)");
  const double root = std::sqrt(x * x - 1.0);
  const double kappa = 1.0 / (x + root);
  const double mu = p.omega0 / (4.0 * p.g);
  return {ModelParams(kappa, mu), x / root};
}

inline double energy_from_chi(double chi, const ModelParams& m) {
  return 2.0 * (1.0 / m.kappa - m.kappa) * (chi - 1.0) - m.kappa;
}

inline double chi_from_energy(double E, const ModelParams& m) {
  return (E + m.kappa) / (2.0 * (1.0 / m.kappa - m.kappa)) + 1.0;
}

// ---------------------------------------------------------------------------
// Z4 parity
// ---------------------------------------------------------------------------

enum class Parity { plus_one, minus_one, plus_i, minus_i };

inline constexpr std::array<Parity, 4> all_parities = {
    Parity::plus_one, Parity::minus_one, Parity::plus_i, Parity::minus_i};

inline complexd parity_value(Parity s) {
  switch (s) {
    case Parity::plus_one: return {1.0, 0.0};
    case Parity::minus_one: return {-1.0, 0.0};
    case Parity::plus_i: return {0.0, 1.0};
    case Parity::minus_i: return {0.0, -1.0};
  }
  throw std::logic_error("parity_value: invalid enum");
}

inline std::string parity_name(Parity s) {
  switch (s) {
    case Parity::plus_one: return "+1";
    case Parity::minus_one: return "-1";
    case Parity::plus_i: return "+i";
    case Parity::minus_i: return "-i";
  }
  throw std::logic_error("parity_name: invalid enum");
}

inline Parity parity_from_name(const std::string& name) {
  for (Parity s : all_parities)
    if (parity_name(s) == name) return s;
  throw std::invalid_argument("parity_from_name: unknown parity '" + name + "'");
}

// Group product in Z4 (multiplication of the eigenvalues).
inline Parity parity_multiply(Parity a, Parity b) {
  const complexd v = parity_value(a) * parity_value(b);
  for (Parity s : all_parities)
    if (std::abs(v - parity_value(s)) < 0.5) return s;
  throw std::logic_error("parity_multiply: product left Z4");
}

inline Parity parity_negate(Parity s) {
  return parity_multiply(s, Parity::minus_one);
}

// Even parities (s = +-1) have even psi1, psi2; odd parities (s = +-i) odd.
inline bool parity_is_even(Parity s) {
  return s == Parity::plus_one || s == Parity::minus_one;
}

struct InitialConditions {
  std::array<complexd, 2> psi;    // (psi1, psi2)(0)
  std::array<complexd, 2> dpsi;   // (psi1', psi2')(0)
};

// s in {+1,-1}: psi(0) = (1, s),  psi'(0) = (0, 0).
// s in {+i,-i}: psi(0) = (0, 0),  psi'(0) = (1, -i s).
inline InitialConditions parity_initial_conditions(Parity s) {
  const complexd sv = parity_value(s);
  const complexd i(0.0, 1.0);
  if (parity_is_even(s)) return {{complexd(1.0), sv}, {complexd(0.0), complexd(0.0)}};
  return {{complexd(0.0), complexd(0.0)}, {complexd(1.0), -i * sv}};
}

}  // namespace tprabi
