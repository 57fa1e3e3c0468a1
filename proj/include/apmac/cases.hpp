#pragma once

/// @file cases.hpp
/// @brief Benchmark catalogue: initial data, pressure laws, domains and final
/// times of the low-Mach test problems.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apmac/grid.hpp"

namespace apmac {

enum class Comparison { None, Reference, Exact, LimitingScheme };

inline std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::None: return "none";
    case Comparison::Reference: return "reference";
    case Comparison::Exact: return "exact";
    case Comparison::LimitingScheme: return "limiting-scheme";
  }
  return "none";
}

/// f(x, y, eps)
using CaseFunction = std::function<double(double, double, double)>;

struct BenchmarkCase {
  std::string name;
  int dim = 1;
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> extents{1.0, 1.0};
  Index mesh = 100;
  double gamma = 2.0;
  std::vector<double> eps_list;
  double t_final = 1.0;
  std::array<bool, 2> periodic{true, true};
  Comparison comparison = Comparison::None;
  CaseFunction rho0;
  std::array<CaseFunction, 2> u0;
  /// Background velocity removed when forming the flow Mach number.
  double background_u = 0.0;
  /// Constant density of the incompressible limit, when the case has one.
  std::optional<double> limit_density;
  /// Fine-mesh reference settings (Comparison::Reference).
  Index reference_mesh = 0;
  double reference_dt = 0.0;

  MacGrid grid(Index n = 0) const {
    const Index m = n > 0 ? n : mesh;
    return MacGrid(dim, {m, dim == 2 ? m : 1}, extents, origin, periodic);
  }
};

namespace cases {

inline BenchmarkCase riemann_1d() {
  BenchmarkCase c;
  c.name = "riemann_1d";
  c.dim = 1;
  c.extents = {1.0, 1.0};
  c.mesh = 200;
  c.gamma = 2.0;
  c.eps_list = {0.8, 0.3, 0.05, 0.001};
  c.t_final = 0.05;
  c.comparison = Comparison::Reference;
  c.reference_mesh = 500;
  c.reference_dt = 1.0 / 20000.0;
  // Piecewise states; the first region takes precedence on shared end points.
  auto rho = [](double x, double, double eps) {
    if (x <= 0.2 || x >= 0.8) return 1.0;
    if (x <= 0.3) return 1.0 + eps * eps;
    if (x <= 0.7) return 1.0;
    return 1.0 - eps * eps;
  };
  auto q = [](double x, double, double eps) {
    if (x <= 0.2 || x >= 0.8) return 1.0 - 0.5 * eps * eps;
    if (x <= 0.3) return 1.0;
    if (x <= 0.7) return 1.0 + 0.5 * eps * eps;
    return 1.0;
  };
  c.rho0 = rho;
  c.u0 = {[rho, q](double x, double y, double eps) { return q(x, y, eps) / rho(x, y, eps); }, nullptr};
  return c;
}

inline BenchmarkCase riemann_extreme() {
  BenchmarkCase c;
  c.name = "riemann_extreme";
  c.dim = 1;
  c.origin = {-1.0, 0.0};
  c.extents = {2.0, 1.0};
  c.mesh = 100;
  c.gamma = 2.0;
  c.eps_list = {1.0};
  c.t_final = 0.15;
  c.comparison = Comparison::Reference;
  c.reference_mesh = 1000;
  c.rho0 = [](double, double, double) { return 1.0; };
  // The face on the discontinuity gets the mean of the two states.
  c.u0 = {[](double x, double, double) { return x < 0.0 ? -3.0 : (x > 0.0 ? 3.0 : 0.0); }, nullptr};
  return c;
}

inline BenchmarkCase acoustic_pulses() {
  BenchmarkCase c;
  c.name = "acoustic_pulses";
  c.dim = 1;
  c.origin = {-1.0, 0.0};
  c.extents = {2.0, 1.0};
  c.mesh = 100;
  c.gamma = 1.4;
  c.eps_list = {0.1, 0.01};
  c.t_final = 0.08;
  c.comparison = Comparison::Reference;
  c.reference_mesh = 2000;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto rho = [](double x, double, double eps) { return 0.955 + 0.5 * eps * (1.0 - std::cos(two_pi * x)); };
  c.rho0 = rho;
  c.u0 = {[rho](double x, double y, double eps) {
            const double s = (x > 0.0) - (x < 0.0);
            return -s * std::sqrt(1.4) * (1.0 - std::cos(two_pi * x)) / rho(x, y, eps);
          },
          nullptr};
  return c;
}

inline double vortex_k(double r) {
  return 2.0 * std::cos(r) + 2.0 * r * std::sin(r) + 0.125 * std::cos(2.0 * r) + 0.25 * r * std::sin(2.0 * r) +
         0.75 * r * r;
}

inline BenchmarkCase vortex() {
  BenchmarkCase c;
  c.name = "vortex";
  c.dim = 2;
  c.extents = {1.0, 1.0};
  c.mesh = 100;
  c.gamma = 2.0;
  c.eps_list = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  c.t_final = 5.0 / 3.0;
  c.comparison = Comparison::None;
  c.background_u = 0.1;
  constexpr double pi = std::numbers::pi;
  constexpr double big_gamma = 1.5;
  constexpr double omega = 4.0 * pi;
  auto radius = [](double x, double y) { return std::hypot(x - 0.5, y - 0.5); };
  c.rho0 = [radius](double x, double y, double eps) {
    const double r = radius(x, y);
    if (omega * r > pi) return 110.0;
    const double zeta = eps * std::sqrt(110.0) / 0.1;
    const double a = zeta * big_gamma / omega;
    return 110.0 + a * a * (vortex_k(omega * r) - vortex_k(pi));
  };
  c.u0 = {[radius](double x, double y, double) {
            const double r = radius(x, y);
            if (omega * r > pi) return 0.1;
            return 0.1 + big_gamma * (1.0 + std::cos(omega * r)) * (0.5 - y);
          },
          [radius](double x, double y, double) {
            const double r = radius(x, y);
            if (omega * r > pi) return 0.0;
            return big_gamma * (1.0 + std::cos(omega * r)) * (x - 0.5);
          }};
  return c;
}

inline BenchmarkCase cyl_explosion() {
  BenchmarkCase c;
  c.name = "cyl_explosion";
  c.dim = 2;
  c.origin = {-1.0, -1.0};
  c.extents = {2.0, 2.0};
  c.mesh = 100;
  c.gamma = 1.0;
  c.eps_list = {1.0, 1e-4};
  c.t_final = 0.05;
  c.comparison = Comparison::Reference;
  c.reference_mesh = 400;
  c.reference_dt = 1.0 / 10000.0;
  auto rho = [](double x, double y, double eps) { return x * x + y * y <= 0.25 ? 1.0 + eps * eps : 1.0; };
  auto alpha = [](double r) { return std::max(0.0, 1.0 - r) * (1.0 - std::exp(-16.0 * r * r)); };
  c.rho0 = rho;
  c.u0 = {[rho, alpha](double x, double y, double eps) {
            const double r = std::hypot(x, y);
            return r > 1e-15 ? -alpha(r) / rho(x, y, eps) * x / r : 0.0;
          },
          [rho, alpha](double x, double y, double eps) {
            const double r = std::hypot(x, y);
            return r > 1e-15 ? -alpha(r) / rho(x, y, eps) * y / r : 0.0;
          }};
  return c;
}

inline BenchmarkCase taylor_green() {
  BenchmarkCase c;
  c.name = "taylor_green";
  c.dim = 2;
  c.extents = {2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
  c.mesh = 32;
  c.gamma = 2.0;
  c.eps_list = {0.01};
  c.t_final = 2.0;
  c.comparison = Comparison::Exact;
  c.limit_density = 1.0;
  c.rho0 = [](double, double, double) { return 1.0; };
  c.u0 = {[](double x, double y, double) { return -std::sin(x) * std::cos(y); },
          [](double x, double y, double) { return std::cos(x) * std::sin(y); }};
  return c;
}

/// Steady vorticity of the Taylor-Green data, omega = -2 sin x sin y.
inline double taylor_green_vorticity(double x, double y) { return -2.0 * std::sin(x) * std::sin(y); }

inline BenchmarkCase shear_flow() {
  BenchmarkCase c;
  c.name = "shear_flow";
  c.dim = 2;
  c.extents = {2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
  c.mesh = 256;
  c.gamma = 2.0;
  c.eps_list = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  c.t_final = 10.0;
  c.comparison = Comparison::LimitingScheme;
  constexpr double pi = std::numbers::pi;
  c.limit_density = pi / 15.0;
  c.rho0 = [](double, double, double) { return pi / 15.0; };
  c.u0 = {[](double, double y, double) {
            return y <= pi ? std::tanh((y - 0.5 * pi) / (pi / 15.0)) : std::tanh((1.5 * pi - y) / (pi / 15.0));
          },
          [](double x, double, double) { return 0.05 * std::sin(x); }};
  return c;
}

}  // namespace cases

inline std::vector<BenchmarkCase> case_catalog() {
  return {cases::riemann_1d(),    cases::riemann_extreme(), cases::acoustic_pulses(), cases::vortex(),
          cases::cyl_explosion(), cases::taylor_green(),    cases::shear_flow()};
}

inline BenchmarkCase find_case(const std::string& name) {
  for (auto& c : case_catalog()) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("unknown case '" + name + "'");
}

}  // namespace apmac
