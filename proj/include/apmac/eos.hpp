#pragma once

/// @file eos.hpp
/// @brief Barotropic pressure law p = rho^gamma and the associated energy
/// functions (Helmholtz function psi and relative internal energy Pi).

#include <cmath>
#include <stdexcept>
#include <string>

#include "apmac/grid.hpp"

namespace apmac {

namespace detail {
inline void require_positive_density(double rho) {
  if (!(rho > 0.0)) {
    throw std::domain_error("non-positive density " + std::to_string(rho));
  }
}
}  // namespace detail

struct PressureLaw {
  double gamma = 2.0;

  explicit PressureLaw(double g = 2.0) : gamma(g) {
    if (!(g >= 1.0)) throw std::invalid_argument("pressure law needs gamma >= 1");
  }

  double operator()(double rho) const {
    detail::require_positive_density(rho);
    if (gamma == 1.0) return rho;
    if (gamma == 2.0) return rho * rho;
    return std::pow(rho, gamma);
  }

  double derivative(double rho) const {
    if (gamma == 1.0) return 1.0;
    if (gamma == 2.0) return 2.0 * rho;
    return gamma * std::pow(rho, gamma - 1.0);
  }

  /// p(b) - p(a) evaluated without cancellation in the pressure values; the
  /// difference of nearly equal densities is exact, so the result keeps full
  /// relative accuracy even when b - a is tiny compared with a.
  double difference(double a, double b) const {
    const double d = b - a;
    if (gamma == 1.0) return d;
    if (gamma == 2.0) return d * (a + b);
    return std::pow(a, gamma) * std::expm1(gamma * std::log1p(d / a));
  }

  double sound_speed(double rho) const { return std::sqrt(derivative(rho)); }
};

/// psi_gamma, Pi_gamma and psi_gamma'(1).
struct EnergyFunctions {
  double gamma = 2.0;

  explicit EnergyFunctions(double g = 2.0) : gamma(g) {
    if (!(g >= 1.0)) throw std::invalid_argument("energy functions need gamma >= 1");
  }

  double psi(double rho) const {
    detail::require_positive_density(rho);
    if (gamma == 1.0) return rho * std::log(rho);
    return std::pow(rho, gamma) / (gamma - 1.0);
  }

  double dpsi_at_one() const { return gamma == 1.0 ? 1.0 : gamma / (gamma - 1.0); }
  double psi_at_one() const { return gamma == 1.0 ? 0.0 : 1.0 / (gamma - 1.0); }

  /// Pi(rho) = psi(rho) - psi(1) - psi'(1)(rho - 1), written in forms that
  /// stay accurate for rho close to 1.
  double relative_internal_energy(double rho) const {
    detail::require_positive_density(rho);
    const double d = rho - 1.0;
    if (gamma == 2.0) return d * d;
    if (std::abs(d) < 1e-2) {
      // Taylor series about rho = 1; avoids the cancellation below.
      // gamma == 1: sum_k (-1)^k d^k / (k (k-1)); otherwise binom(gamma,k) d^k / (gamma-1).
      double sum = 0.0;
      double dk = d;
      double binom = gamma;  // binom(gamma, 1)
      for (int k = 2; k <= 14; ++k) {
        dk *= d;
        if (gamma == 1.0) {
          sum += ((k % 2 == 0) ? 1.0 : -1.0) * dk / (k * (k - 1.0));
        } else {
          binom *= (gamma - (k - 1)) / k;
          sum += binom * dk;
        }
      }
      return gamma == 1.0 ? sum : sum / (gamma - 1.0);
    }
    if (gamma == 1.0) {
      // rho ln rho - (rho - 1)
      return rho * std::log1p(d) - d;
    }
    // (rho^g - 1 - g (rho - 1)) / (g - 1)
    const double powm1 = std::expm1(gamma * std::log1p(d));
    return (powm1 - gamma * d) / (gamma - 1.0);
  }
};

inline CellField pressure(const PressureLaw& law, const CellField& rho) {
  CellField p = rho;
  for (auto& v : p.values) v = law(v);
  return p;
}

}  // namespace apmac
