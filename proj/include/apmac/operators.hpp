#pragma once

/// @file operators.hpp
/// @brief Discrete MAC calculus and the upwind convection fluxes.
///
/// Primal mass fluxes are stored as an EdgeField of signed fluxes in the +d
/// direction, i.e. entry (d, f) holds F_{f,K} for K the lower cell of f. The
/// outward flux from the upper cell is its negative, so antisymmetry holds by
/// construction.

#include <array>
#include <cmath>
#include <vector>

#include "apmac/eos.hpp"
#include "apmac/grid.hpp"

namespace apmac {

inline double positive_part(double a) { return 0.5 * (a + std::abs(a)); }
inline double negative_part(double a) { return 0.5 * (a - std::abs(a)); }

/// (d^{(i)} q)_sigma = |sigma|/|D_sigma| (q_L - q_K) e^{(i)}.nu_{sigma,K}; zero on external faces.
inline EdgeField discrete_gradient(const MacGrid& g, const CellField& q) {
  check_shape(g, q);
  EdgeField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    const double coef = g.face_measure(d) / g.dual_volume(d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      const Index k = g.lower_cell(d, f);
      const Index l = g.upper_cell(d, f);
      out(d, f) = (k == kNoCell || l == kNoCell) ? 0.0 : coef * (q[l] - q[k]);
    }
  }
  return out;
}

/// Gradient of p(rho), with the face differences taken through
/// PressureLaw::difference so small pressure jumps keep their accuracy.
inline EdgeField pressure_gradient(const MacGrid& g, const PressureLaw& law, const CellField& rho) {
  check_shape(g, rho);
  EdgeField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    const double coef = g.face_measure(d) / g.dual_volume(d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      const Index k = g.lower_cell(d, f);
      const Index l = g.upper_cell(d, f);
      out(d, f) = (k == kNoCell || l == kNoCell) ? 0.0 : coef * law.difference(rho[k], rho[l]);
    }
  }
  return out;
}

/// (div_M v)_K = 1/|K| sum_{sigma in E(K)} |sigma| v_{sigma,K}.
inline CellField discrete_divergence(const MacGrid& g, const EdgeField& v) {
  check_shape(g, v);
  CellField out(g);
  const double inv_vol = 1.0 / g.cell_volume();
  for (Index c = 0; c < g.num_cells(); ++c) {
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      s += g.face_measure(d) * (v(d, g.cell_face(c, d, 1)) - v(d, g.cell_face(c, d, 0)));
    }
    out[c] = s * inv_vol;
  }
  return out;
}

/// |int q div v + int grad q . v| with measure-weighted sums. Zero (to
/// round-off) when v vanishes on external faces or the grid is periodic.
inline double duality_residual(const MacGrid& g, const CellField& q, const EdgeField& v) {
  const CellField div = discrete_divergence(g, v);
  const EdgeField grad = discrete_gradient(g, q);
  double s = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) s += g.cell_volume() * q[c] * div[c];
  for (int d = 0; d < g.dim(); ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (!g.is_external(d, f)) s += g.dual_volume(d) * grad(d, f) * v(d, f);
    }
  }
  return std::abs(s);
}

/// Sum of the magnitudes entering duality_residual; the natural scale for a
/// relative round-off bound.
inline double duality_scale(const MacGrid& g, const CellField& q, const EdgeField& v) {
  const CellField div = discrete_divergence(g, v);
  const EdgeField grad = discrete_gradient(g, q);
  double s = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) s += g.cell_volume() * std::abs(q[c] * div[c]);
  for (int d = 0; d < g.dim(); ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) s += g.dual_volume(d) * std::abs(grad(d, f) * v(d, f));
  }
  return s;
}

/// Upwind-biased split of the stabilised velocity v = u - du seen from a cell:
/// plus = u^+ - du^- >= 0, minus = u^- - du^+ <= 0.
struct SplitVelocity {
  double plus = 0.0;
  double minus = 0.0;
};

inline SplitVelocity stabilised_split(double u_sigma_k, double du_sigma_k) {
  return {positive_part(u_sigma_k) - negative_part(du_sigma_k),
          negative_part(u_sigma_k) - positive_part(du_sigma_k)};
}

/// Same split for a face seen from cell K with outward orientation `orientation` (+1/-1).
inline SplitVelocity stabilised_split(double u_sigma, double du_sigma, double orientation) {
  return stabilised_split(orientation * u_sigma, orientation * du_sigma);
}

/// F_{sigma,K} = |sigma| (rho_K v^+ + rho_L v^-).
inline double mass_flux(double face_measure, double rho_k, double rho_l, SplitVelocity v) {
  return face_measure * (rho_k * v.plus + rho_l * v.minus);
}

/// Primal mass fluxes in the +d direction through every face, for cell
/// density rho and stabilised velocity u - du. External faces carry zero.
inline EdgeField primal_mass_fluxes(const MacGrid& g, const CellField& rho, const EdgeField& u,
                                    const EdgeField& du) {
  EdgeField flux(g);
  for (int d = 0; d < g.dim(); ++d) {
    const double area = g.face_measure(d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      const Index k = g.lower_cell(d, f);
      const Index l = g.upper_cell(d, f);
      if (k == kNoCell || l == kNoCell) continue;
      flux(d, f) = mass_flux(area, rho[k], rho[l], stabilised_split(u(d, f), du(d, f)));
    }
  }
  return flux;
}

/// Net outward flux divergence per cell: (1/|K|) sum_sigma F_{sigma,K}.
inline CellField flux_divergence(const MacGrid& g, const EdgeField& flux) {
  CellField out(g);
  const double inv_vol = 1.0 / g.cell_volume();
  for (Index c = 0; c < g.num_cells(); ++c) {
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) s += flux(d, g.cell_face(c, d, 1)) - flux(d, g.cell_face(c, d, 0));
    out[c] = s * inv_vol;
  }
  return out;
}

/// A face of a dual cell D_sigma: the mass flux leaving D_sigma through it and
/// the face sigma' whose dual cell lies on the other side (kNoCell when the
/// dual face is on a non-periodic boundary, where the flux is zero).
struct DualFace {
  double flux = 0.0;
  Index neighbour = kNoCell;
};

/// Up to four dual faces per dual cell: {lower, upper} along x, then along y.
using DualFaces = std::array<DualFace, 4>;

/// Dual momentum fluxes for direction d. Dual faces normal to e^{(d)} sit at
/// cell centres and carry half the sum of the two d-fluxes of that cell; dual
/// faces normal to e^{(j)}, j != d, carry half the sum of the j-fluxes of the
/// two half cells they bound. Signs are outward from D_sigma. Entries for
/// external primal faces are left empty.
inline std::vector<DualFaces> dual_momentum_fluxes(const MacGrid& g, const EdgeField& primal, int d) {
  std::vector<DualFaces> out(static_cast<std::size_t>(g.num_faces(d)));
  for (Index f = 0; f < g.num_faces(d); ++f) {
    const Index k = g.lower_cell(d, f);
    const Index l = g.upper_cell(d, f);
    if (k == kNoCell || l == kNoCell) continue;
    DualFaces& df = out[static_cast<std::size_t>(f)];
    for (int a = 0; a < g.dim(); ++a) {
      DualFace& lo = df[static_cast<std::size_t>(2 * a)];
      DualFace& hi = df[static_cast<std::size_t>(2 * a + 1)];
      lo.neighbour = g.shift_face(d, f, a, -1);
      hi.neighbour = g.shift_face(d, f, a, +1);
      if (a == d) {
        lo.flux = -0.5 * (primal(d, lo.neighbour) + primal(d, f));
        hi.flux = 0.5 * (primal(d, f) + primal(d, hi.neighbour));
      } else {
        lo.flux = -0.5 * (primal(a, g.cell_face(k, a, 0)) + primal(a, g.cell_face(l, a, 0)));
        hi.flux = 0.5 * (primal(a, g.cell_face(k, a, 1)) + primal(a, g.cell_face(l, a, 1)));
      }
    }
  }
  return out;
}

/// u_{eps,up}: u_sigma when the flux leaving D_sigma is >= 0, else u_{sigma'}.
inline double upwind_edge_value(double u_sigma, double u_neighbour, double flux) {
  return flux >= 0.0 ? u_sigma : u_neighbour;
}

}  // namespace apmac
