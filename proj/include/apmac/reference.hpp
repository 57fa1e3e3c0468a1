#pragma once

/// @file reference.hpp
/// @brief Explicit Rusanov (local Lax-Friedrichs) finite-volume solver for the
/// eps-scaled barotropic Euler system on colocated cells. Used for fine-mesh
/// reference solutions and as the acoustic-CFL baseline.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "apmac/eos.hpp"
#include "apmac/grid.hpp"

namespace apmac {

/// Density and momentum q = rho u per cell.
struct ConservedState {
  CellField rho;
  std::array<CellField, 2> mom;
  double time = 0.0;
  long step = 0;
};

struct ReferenceParams {
  double epsilon = 1.0;
  double gamma = 2.0;
};

/// Builds the colocated state from cell-centred samples of rho and u.
template <class RhoFn, class UFn, class VFn>
ConservedState reference_initialise(const MacGrid& g, RhoFn&& rho0, UFn&& u0, VFn&& v0) {
  ConservedState w;
  w.rho = CellField(g);
  w.mom = {CellField(g), CellField(g)};
  for (Index c = 0; c < g.num_cells(); ++c) {
    const auto ij = g.cell_coords(c);
    const double x = g.cell_center(0, ij[0]);
    const double y = g.dim() == 2 ? g.cell_center(1, ij[1]) : 0.0;
    const double r = rho0(x, y);
    if (!(r > 0.0)) throw std::invalid_argument("reference: initial density must be positive");
    w.rho[c] = r;
    w.mom[0][c] = r * u0(x, y);
    if (g.dim() == 2) w.mom[1][c] = r * v0(x, y);
  }
  return w;
}

namespace detail {
inline double max_wave_speed(const MacGrid& g, const ConservedState& w, const PressureLaw& law, double eps) {
  double rate = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) {
    const double r = w.rho[c];
    const double cs = law.sound_speed(r) / eps;
    double cell_rate = 0.0;
    for (int d = 0; d < g.dim(); ++d) cell_rate += (std::abs(w.mom[d][c] / r) + cs) / g.h(d);
    rate = std::max(rate, cell_rate);
  }
  return rate;
}
}  // namespace detail

/// dt = cfl / max_K sum_d (|u_d| + c/eps) / h_d; in 1D this is
/// cfl * |K| / max(|u| + c/eps).
inline double acoustic_dt(const MacGrid& g, const ConservedState& w, double cfl, const ReferenceParams& p) {
  const PressureLaw law(p.gamma);
  return cfl / detail::max_wave_speed(g, w, law, p.epsilon);
}

/// Acoustic CFL number of a given dt: dt * max sum_d (|u_d| + c/eps)/h_d.
inline double acoustic_cfl(const MacGrid& g, const ConservedState& w, double dt, const ReferenceParams& p) {
  const PressureLaw law(p.gamma);
  return dt * detail::max_wave_speed(g, w, law, p.epsilon);
}

/// One unsplit Rusanov step on a fully periodic grid.
inline ConservedState rusanov_step(const MacGrid& g, const ConservedState& w, double dt, const ReferenceParams& p) {
  if (!g.fully_periodic()) throw std::invalid_argument("rusanov_step: only periodic grids are supported");
  const PressureLaw law(p.gamma);
  const double inv_eps2 = 1.0 / (p.epsilon * p.epsilon);
  if (acoustic_cfl(g, w, dt, p) > 1.0 + 1e-12) {
    throw std::invalid_argument("rusanov_step: dt violates the acoustic CFL condition");
  }
  ConservedState out = w;
  const int nvar = 1 + g.dim();
  auto state = [&](Index c, int var) { return var == 0 ? w.rho[c] : w.mom[static_cast<std::size_t>(var - 1)][c]; };
  for (int d = 0; d < g.dim(); ++d) {
    const double lam = dt / g.h(d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      const Index k = g.lower_cell(d, f);
      const Index l = g.upper_cell(d, f);
      const double rk = w.rho[k];
      const double rl = w.rho[l];
      const double uk = w.mom[d][k] / rk;
      const double ul = w.mom[d][l] / rl;
      const double smax = std::max(std::abs(uk) + law.sound_speed(rk) / p.epsilon,
                                   std::abs(ul) + law.sound_speed(rl) / p.epsilon);
      // Pressures relative to p(1): a constant offset cancels in the update
      // and the O(eps^2) variations keep their accuracy.
      const double pk = law.difference(1.0, rk) * inv_eps2;
      const double dp = law.difference(rk, rl) * inv_eps2;
      for (int var = 0; var < nvar; ++var) {
        const double wk = state(k, var);
        const double wl = state(l, var);
        // physical fluxes: rho u_d, q_j u_d + delta_jd p / eps^2
        double fk = wk * uk;
        double fl = wl * ul;
        if (var == d + 1) {
          fk += pk;
          fl += pk + dp;
        }
        const double flux = 0.5 * (fk + fl) - 0.5 * smax * (wl - wk);
        if (var == 0) {
          out.rho[k] -= lam * flux;
          out.rho[l] += lam * flux;
        } else {
          auto& m = out.mom[static_cast<std::size_t>(var - 1)];
          m[k] -= lam * flux;
          m[l] += lam * flux;
        }
      }
    }
  }
  for (double r : out.rho.values) {
    if (!(r > 0.0)) throw std::runtime_error("rusanov_step: density lost positivity");
  }
  out.time = w.time + dt;
  out.step = w.step + 1;
  return out;
}

inline double total_mass(const MacGrid& g, const CellField& rho) {
  double s = 0.0;
  for (double r : rho.values) s += r;
  return s * g.cell_volume();
}

}  // namespace apmac
