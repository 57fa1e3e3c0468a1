#pragma once

/// @file grid.hpp
/// @brief Uniform MAC (marker-and-cell) grids in one and two dimensions, and
/// the cell / staggered-edge fields that live on them.
///
/// Indexing conventions (stable; every output file relies on them):
///   - cells are ordered lexicographically with x fastest: c = ix + nx*iy;
///   - faces normal to direction d are ordered by direction first, then
///     lexicographically with x fastest. A face normal to x at position
///     (ix, iy) lies on the line x = x0 + ix*dx and separates the "left"
///     cell (ix-1, iy) from the "right" cell (ix, iy). Faces normal to y
///     follow the same rule with the roles of the axes swapped;
///   - along a periodic axis there are n faces per row (face 0 identifies the
///     two boundary faces); along a non-periodic axis there are n+1 faces,
///     of which the first and last are external.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace apmac {

using Index = std::ptrdiff_t;
inline constexpr Index kNoCell = -1;

class MacGrid {
 public:
  MacGrid() = default;

  /// Builds a uniform grid. `cells`, `extents`, `origin` and `periodic` must
  /// have `dim` meaningful leading entries.
  MacGrid(int dim, std::array<Index, 2> cells, std::array<double, 2> extents,
          std::array<double, 2> origin, std::array<bool, 2> periodic)
      : dim_(dim), cells_(cells), extents_(extents), origin_(origin), periodic_(periodic) {
    if (dim != 1 && dim != 2) {
      throw std::invalid_argument("MacGrid: dimension must be 1 or 2, got " + std::to_string(dim));
    }
    for (int d = 0; d < dim; ++d) {
      if (cells[d] < 2) {
        throw std::invalid_argument("MacGrid: need at least 2 cells per axis");
      }
      if (!(extents[d] > 0.0) || !std::isfinite(extents[d])) {
        throw std::invalid_argument("MacGrid: extents must be positive");
      }
      h_[d] = extents[d] / static_cast<double>(cells[d]);
    }
    if (dim == 1) {
      cells_[1] = 1;
      extents_[1] = 1.0;
      origin_[1] = 0.0;
      periodic_[1] = true;
      h_[1] = 1.0;
    }
    for (int d = 0; d < 2; ++d) {
      face_dims_[d] = cells_;
      if (d < dim && !periodic_[d]) face_dims_[d][d] += 1;
    }
  }

  int dim() const { return dim_; }
  Index cells(int axis) const { return cells_[axis]; }
  Index num_cells() const { return cells_[0] * cells_[1]; }
  double h(int axis) const { return h_[axis]; }
  double extent(int axis) const { return extents_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  bool periodic(int axis) const { return periodic_[axis]; }
  bool fully_periodic() const { return periodic_[0] && (dim_ == 1 || periodic_[1]); }

  /// |K|
  double cell_volume() const { return h_[0] * (dim_ == 2 ? h_[1] : 1.0); }
  /// |sigma| for a face normal to direction d (1 in one dimension).
  double face_measure(int d) const { return dim_ == 1 ? 1.0 : h_[1 - d]; }
  /// |D_sigma| for an interior face; both half-cells have volume |K|/2.
  double dual_volume(int /*d*/) const { return cell_volume(); }
  /// |dK| = sum of the face measures of a cell.
  double perimeter() const {
    double s = 0.0;
    for (int d = 0; d < dim_; ++d) s += 2.0 * face_measure(d);
    return s;
  }
  double domain_volume() const { return extents_[0] * (dim_ == 2 ? extents_[1] : 1.0); }

  Index cell_index(Index ix, Index iy = 0) const { return ix + cells_[0] * iy; }
  std::array<Index, 2> cell_coords(Index c) const { return {c % cells_[0], c / cells_[0]}; }
  double cell_center(int axis, Index i) const {
    return origin_[axis] + extents_[axis] * (static_cast<double>(i) + 0.5) / static_cast<double>(cells_[axis]);
  }
  /// Coordinate of grid line i along an axis (face / node position).
  double node(int axis, Index i) const {
    return origin_[axis] + extents_[axis] * static_cast<double>(i) / static_cast<double>(cells_[axis]);
  }

  Index face_dim(int d, int axis) const { return face_dims_[d][axis]; }
  Index num_faces(int d) const { return face_dims_[d][0] * face_dims_[d][1]; }
  Index face_index(int d, Index ix, Index iy = 0) const { return ix + face_dims_[d][0] * iy; }
  std::array<Index, 2> face_coords(int d, Index f) const {
    return {f % face_dims_[d][0], f / face_dims_[d][0]};
  }

  bool is_external(int d, Index f) const {
    if (periodic_[d]) return false;
    const Index a = face_coords(d, f)[d];
    return a == 0 || a == cells_[d];
  }

  /// Cell on the lower side (K) of face f, or kNoCell for an external face.
  Index lower_cell(int d, Index f) const {
    auto c = face_coords(d, f);
    if (c[d] == 0) {
      if (!periodic_[d]) return kNoCell;
      c[d] = cells_[d] - 1;
    } else {
      c[d] -= 1;
    }
    return cell_index(c[0], c[1]);
  }
  /// Cell on the upper side (L) of face f, or kNoCell for an external face.
  Index upper_cell(int d, Index f) const {
    auto c = face_coords(d, f);
    if (c[d] == cells_[d]) return kNoCell;
    return cell_index(c[0], c[1]);
  }

  /// Face normal to d bounding cell c on its lower (side 0) or upper (side 1) end.
  Index cell_face(Index c, int d, int side) const {
    auto cc = cell_coords(c);
    if (side == 1) {
      cc[d] += 1;
      if (periodic_[d] && cc[d] == cells_[d]) cc[d] = 0;
    }
    return face_index(d, cc[0], cc[1]);
  }

  /// Face reached by shifting face f of direction d by `step` cells along
  /// `axis`; kNoCell if that leaves the domain across a non-periodic boundary.
  Index shift_face(int d, Index f, int axis, Index step) const {
    auto c = face_coords(d, f);
    const Index n = face_dims_[d][axis];
    Index a = c[axis] + step;
    if (periodic_[axis]) {
      a = ((a % n) + n) % n;
    } else if (a < 0 || a >= n) {
      return kNoCell;
    }
    c[axis] = a;
    return face_index(d, c[0], c[1]);
  }

  /// Physical position of a face centre.
  std::array<double, 2> face_center(int d, Index f) const {
    const auto c = face_coords(d, f);
    std::array<double, 2> x{};
    for (int a = 0; a < 2; ++a) x[a] = (a == d) ? node(a, c[a]) : cell_center(a, c[a]);
    return x;
  }

  bool operator==(const MacGrid&) const = default;

 private:
  int dim_ = 1;
  std::array<Index, 2> cells_{2, 1};
  std::array<double, 2> extents_{1.0, 1.0};
  std::array<double, 2> origin_{0.0, 0.0};
  std::array<bool, 2> periodic_{true, true};
  std::array<double, 2> h_{0.5, 1.0};
  std::array<std::array<Index, 2>, 2> face_dims_{};
};

/// Convenience builder; rejects dim outside {1,2} and non-positive extents.
inline MacGrid build_grid(int dim, std::array<Index, 2> cells, std::array<double, 2> extents,
                          std::array<bool, 2> periodic = {true, true},
                          std::array<double, 2> origin = {0.0, 0.0}) {
  return MacGrid(dim, cells, extents, origin, periodic);
}

/// Piecewise-constant scalar on primal cells.
struct CellField {
  std::vector<double> values;

  CellField() = default;
  explicit CellField(const MacGrid& g, double v = 0.0)
      : values(static_cast<std::size_t>(g.num_cells()), v) {}

  double& operator[](Index c) { return values[static_cast<std::size_t>(c)]; }
  double operator[](Index c) const { return values[static_cast<std::size_t>(c)]; }
  Index size() const { return static_cast<Index>(values.size()); }
};

/// One scalar per face for each direction: the staggered velocity layout.
struct EdgeField {
  std::array<std::vector<double>, 2> comp;

  EdgeField() = default;
  explicit EdgeField(const MacGrid& g, double v = 0.0) {
    for (int d = 0; d < g.dim(); ++d) {
      comp[d].assign(static_cast<std::size_t>(g.num_faces(d)), v);
    }
  }

  double& operator()(int d, Index f) { return comp[d][static_cast<std::size_t>(f)]; }
  double operator()(int d, Index f) const { return comp[d][static_cast<std::size_t>(f)]; }
};

struct State {
  CellField rho;
  EdgeField velocity;
  double time = 0.0;
  long step = 0;
};

inline void check_shape(const MacGrid& g, const CellField& q) {
  if (q.size() != g.num_cells()) throw std::invalid_argument("cell field does not match grid");
}

inline void check_shape(const MacGrid& g, const EdgeField& v) {
  for (int d = 0; d < g.dim(); ++d) {
    if (static_cast<Index>(v.comp[d].size()) != g.num_faces(d)) {
      throw std::invalid_argument("edge field does not match grid");
    }
  }
}

/// Dual average q_{D_sigma}: |D_sigma| q_D = |D_{sigma,K}| q_K + |D_{sigma,L}| q_L.
/// On a uniform grid the half volumes are equal, so this is the arithmetic mean.
/// External faces carry the value of their single incident cell.
inline EdgeField dual_average(const MacGrid& g, const CellField& q) {
  check_shape(g, q);
  EdgeField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) {
      const Index k = g.lower_cell(d, f);
      const Index l = g.upper_cell(d, f);
      if (k == kNoCell) {
        out(d, f) = q[l];
      } else if (l == kNoCell) {
        out(d, f) = q[k];
      } else {
        out(d, f) = 0.5 * q[k] + 0.5 * q[l];
      }
    }
  }
  return out;
}

/// Sets every external-face entry to zero (the H_{E,0} projection).
inline void zero_external(const MacGrid& g, EdgeField& v) {
  for (int d = 0; d < g.dim(); ++d) {
    if (g.periodic(d)) continue;
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (g.is_external(d, f)) v(d, f) = 0.0;
    }
  }
}

}  // namespace apmac
