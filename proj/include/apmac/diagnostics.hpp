#pragma once

/// @file diagnostics.hpp
/// @brief Energy bookkeeping, derived fields and the a-posteriori audit of the
/// entropy-stability conditions.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "apmac/eos.hpp"
#include "apmac/grid.hpp"
#include "apmac/operators.hpp"

namespace apmac {

/// Relative slack allowed on a per-step entropy increase (round-off).
inline constexpr double kEntropySlack = 1e-10;

struct EnergyLedger {
  double internal = 0.0;  ///< (1/eps^2) sum |K| Pi(rho_K)
  double kinetic = 0.0;   ///< sum |D_sigma| rho_D u_sigma^2 / 2
  double total() const { return internal + kinetic; }
};

inline double internal_energy(const MacGrid& g, const CellField& rho, double epsilon, double gamma) {
  const EnergyFunctions e(gamma);
  double s = 0.0;
  for (double r : rho.values) s += e.relative_internal_energy(r);
  return s * g.cell_volume() / (epsilon * epsilon);
}

inline double kinetic_energy(const MacGrid& g, const CellField& rho, const EdgeField& u) {
  const EdgeField rd = dual_average(g, rho);
  double s = 0.0;
  for (int d = 0; d < g.dim(); ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (g.is_external(d, f)) continue;
      s += g.dual_volume(d) * 0.5 * rd(d, f) * u(d, f) * u(d, f);
    }
  }
  return s;
}

inline EnergyLedger energy_ledger(const MacGrid& g, const State& s, double epsilon, double gamma) {
  return {internal_energy(g, s.rho, epsilon, gamma), kinetic_energy(g, s.rho, s.velocity)};
}

/// (1/eps^2) sum |K| Pi(rho_K) + sum |D_sigma| rho_D u_sigma^2 / 2.
inline double entropy_total(const MacGrid& g, const State& s, double epsilon, double gamma) {
  return energy_ledger(g, s, epsilon, gamma).total();
}

/// pi_K = (p_K - m(p)) / eps^2, mean-free. Pressure differences are taken
/// against the first cell so that O(eps^2) variations survive.
inline CellField second_order_pressure(const MacGrid& g, const CellField& rho, double epsilon, double gamma) {
  check_shape(g, rho);
  const PressureLaw law(gamma);
  CellField pi(g);
  const double ref = rho[0];
  double mean = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) {
    pi[c] = law.difference(ref, rho[c]);
    mean += pi[c];
  }
  mean /= static_cast<double>(g.num_cells());
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  for (double& v : pi.values) v = (v - mean) * inv_eps2;
  return pi;
}

/// Field on grid nodes (cell corners); x fastest. A periodic axis has n nodes,
/// a bounded one n + 1.
struct NodeField {
  Index nx = 0;
  Index ny = 0;
  std::vector<double> values;

  double& operator()(Index i, Index j) { return values[static_cast<std::size_t>(i + nx * j)]; }
  double operator()(Index i, Index j) const { return values[static_cast<std::size_t>(i + nx * j)]; }
};

/// MAC curl at nodes: (v_{i,j} - v_{i-1,j})/dx - (u_{i,j} - u_{i,j-1})/dy.
/// Nodes on a non-periodic boundary are left at zero.
inline NodeField vorticity(const MacGrid& g, const EdgeField& u) {
  if (g.dim() != 2) throw std::invalid_argument("vorticity needs a 2D grid");
  check_shape(g, u);
  NodeField w;
  w.nx = g.periodic(0) ? g.cells(0) : g.cells(0) + 1;
  w.ny = g.periodic(1) ? g.cells(1) : g.cells(1) + 1;
  w.values.assign(static_cast<std::size_t>(w.nx * w.ny), 0.0);
  const Index nx = g.cells(0);
  const Index ny = g.cells(1);
  for (Index j = 0; j < w.ny; ++j) {
    for (Index i = 0; i < w.nx; ++i) {
      const bool bx = !g.periodic(0) && (i == 0 || i == nx);
      const bool by = !g.periodic(1) && (j == 0 || j == ny);
      if (bx || by) continue;
      const Index im = (i - 1 + nx) % nx;
      const Index jm = (j - 1 + ny) % ny;
      const double dvdx = (u(1, g.face_index(1, i % nx, j)) - u(1, g.face_index(1, im, j))) / g.h(0);
      const double dudy = (u(0, g.face_index(0, i, j % ny)) - u(0, g.face_index(0, i, jm))) / g.h(1);
      w(i, j) = dvdx - dudy;
    }
  }
  return w;
}

/// Cell-centred velocity components (average of the two bounding faces).
inline std::array<CellField, 2> cell_velocity(const MacGrid& g, const EdgeField& u) {
  std::array<CellField, 2> out{CellField(g), CellField(g)};
  for (Index c = 0; c < g.num_cells(); ++c) {
    for (int d = 0; d < g.dim(); ++d) {
      out[static_cast<std::size_t>(d)][c] = 0.5 * (u(d, g.cell_face(c, d, 0)) + u(d, g.cell_face(c, d, 1)));
    }
  }
  return out;
}

/// M = sqrt((u - u_bg)^2 + v^2) / c with c = sqrt(gamma p / rho) (no 1/eps factor).
inline CellField mach_field(const MacGrid& g, const State& s, double gamma, double background_u = 0.0) {
  const PressureLaw law(gamma);
  const auto uc = cell_velocity(g, s.velocity);
  CellField m(g);
  for (Index c = 0; c < g.num_cells(); ++c) {
    const double du = uc[0][c] - background_u;
    const double dv = g.dim() == 2 ? uc[1][c] : 0.0;
    m[c] = std::sqrt(du * du + dv * dv) / law.sound_speed(s.rho[c]);
  }
  return m;
}

struct AuditCounts {
  int cond_i_violations = 0;
  int cond_ii_violations = 0;
  int ratio_violations = 0;
  bool all_hold() const { return cond_i_violations == 0 && cond_ii_violations == 0 && ratio_violations == 0; }
};

/// Per-face outcome of the stability-condition audit.
struct ConditionAudit {
  /// (i) eta_sigma >= 1 / rho_D^{n+1}
  std::array<std::vector<char>, 2> cond_i;
  /// (ii) dt/|D| sum_eps (-F_eps^-) / rho_D^{n+1} <= 1/2
  std::array<std::vector<char>, 2> cond_ii;
  /// rho_D^n / rho_D^{n+1} <= 3/2
  std::array<std::vector<char>, 2> ratio;

  AuditCounts counts() const {
    AuditCounts c;
    for (int d = 0; d < 2; ++d) {
      for (char v : cond_i[static_cast<std::size_t>(d)]) c.cond_i_violations += !v;
      for (char v : cond_ii[static_cast<std::size_t>(d)]) c.cond_ii_violations += !v;
      for (char v : ratio[static_cast<std::size_t>(d)]) c.ratio_violations += !v;
    }
    return c;
  }
};

inline ConditionAudit condition_audit(const MacGrid& g, const CellField& rho_n, const CellField& rho_np1,
                                      const EdgeField& eta, const EdgeField& fluxes, double dt) {
  constexpr double tol = 1e-12;
  const EdgeField rd_n = dual_average(g, rho_n);
  const EdgeField rd_np1 = dual_average(g, rho_np1);
  ConditionAudit a;
  for (int d = 0; d < g.dim(); ++d) {
    const auto n = static_cast<std::size_t>(g.num_faces(d));
    a.cond_i[d].assign(n, 1);
    a.cond_ii[d].assign(n, 1);
    a.ratio[d].assign(n, 1);
    const auto dual = dual_momentum_fluxes(g, fluxes, d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (g.is_external(d, f)) continue;
      const auto i = static_cast<std::size_t>(f);
      a.cond_i[d][i] = eta(d, f) * rd_np1(d, f) >= 1.0 - tol;
      double out = 0.0;
      for (const DualFace& e : dual[i]) out -= negative_part(e.flux);
      a.cond_ii[d][i] = dt / g.dual_volume(d) * out / rd_np1(d, f) <= 0.5 + tol;
      a.ratio[d][i] = rd_n(d, f) <= 1.5 * rd_np1(d, f) * (1.0 + tol);
    }
  }
  return a;
}

}  // namespace apmac
