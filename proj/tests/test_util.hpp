#pragma once

#include <random>

#include "apmac/grid.hpp"

namespace apmac::testing {

inline CellField random_cells(const MacGrid& g, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  CellField q(g);
  for (double& v : q.values) v = dist(rng);
  return q;
}

/// Random face field; external faces are zeroed.
inline EdgeField random_edges(const MacGrid& g, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  EdgeField v(g);
  for (int d = 0; d < g.dim(); ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) v(d, f) = g.is_external(d, f) ? 0.0 : dist(rng);
  }
  return v;
}

}  // namespace apmac::testing
