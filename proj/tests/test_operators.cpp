#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "apmac/operators.hpp"
#include "test_util.hpp"

using namespace apmac;
using apmac::testing::random_cells;
using apmac::testing::random_edges;

TEST(Gradient, ConstantIsZero) {
  const MacGrid g = build_grid(2, {4, 4}, {1.0, 1.0}, {false, true});
  const EdgeField grad = discrete_gradient(g, CellField(g, 3.7));
  for (int d = 0; d < 2; ++d) {
    for (double v : grad.comp[d]) EXPECT_EQ(v, 0.0);
  }
}

TEST(Gradient, OneDimensionalValue) {
  const MacGrid g = build_grid(1, {2, 1}, {1.0, 1.0}, {false, true});
  CellField q(g);
  q.values = {1.0, 2.0};
  const EdgeField grad = discrete_gradient(g, q);
  EXPECT_DOUBLE_EQ(grad(0, 1), 2.0);
  EXPECT_EQ(grad(0, 0), 0.0);
  EXPECT_EQ(grad(0, 2), 0.0);
}

TEST(Gradient, IndicatorIsLocal) {
  const MacGrid g = build_grid(2, {5, 5}, {1.0, 1.0});
  CellField q(g);
  const Index c = g.cell_index(2, 3);
  q[c] = 1.0;
  const EdgeField grad = discrete_gradient(g, q);
  for (int d = 0; d < 2; ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) {
      const bool own = f == g.cell_face(c, d, 0) || f == g.cell_face(c, d, 1);
      if (!own) EXPECT_EQ(grad(d, f), 0.0);
      else EXPECT_NE(grad(d, f), 0.0);
    }
  }
}

TEST(Divergence, UniformFieldIsFree) {
  const MacGrid g = build_grid(2, {6, 4}, {1.0, 2.0});
  EdgeField v(g);
  for (double& x : v.comp[0]) x = 1.3;
  for (double& x : v.comp[1]) x = -0.4;
  for (double x : discrete_divergence(g, v).values) EXPECT_NEAR(x, 0.0, 1e-14);
}

TEST(Divergence, SingleActiveFace) {
  const MacGrid g = build_grid(1, {4, 1}, {1.0, 1.0});
  EdgeField v(g);
  v(0, 1) = 1.0;  // face between cells 0 and 1
  const CellField div = discrete_divergence(g, v);
  EXPECT_DOUBLE_EQ(div[0], 4.0);
  EXPECT_DOUBLE_EQ(div[1], -4.0);
  EXPECT_EQ(div[2], 0.0);
  EXPECT_EQ(div[3], 0.0);
}

TEST(Divergence, OfGradientOfConstant) {
  const MacGrid g = build_grid(2, {4, 4}, {1.0, 1.0}, {false, false});
  for (double x : discrete_divergence(g, discrete_gradient(g, CellField(g, 2.0))).values) EXPECT_EQ(x, 0.0);
}

class Duality : public ::testing::TestWithParam<std::array<bool, 2>> {};

TEST_P(Duality, RandomFields) {
  std::mt19937 rng(1234);
  const MacGrid g = build_grid(2, {8, 8}, {1.0, 1.3}, GetParam());
  for (int trial = 0; trial < 20; ++trial) {
    const CellField q = random_cells(g, rng);
    const EdgeField v = random_edges(g, rng);
    EXPECT_LE(duality_residual(g, q, v), 1e-12 * duality_scale(g, q, v));
  }
  EXPECT_EQ(duality_residual(g, random_cells(g, rng), EdgeField(g)), 0.0);
}

INSTANTIATE_TEST_SUITE_P(Boundaries, Duality,
                         ::testing::Values(std::array<bool, 2>{true, true}, std::array<bool, 2>{false, false}));

TEST(Duality, ConstantScalarPeriodic) {
  std::mt19937 rng(7);
  const MacGrid g = build_grid(2, {8, 8}, {1.0, 1.0});
  const EdgeField v = random_edges(g, rng);
  EXPECT_LE(duality_residual(g, CellField(g, 1.0), v), 1e-14);
}

TEST(Split, Examples) {
  SplitVelocity s = stabilised_split(1.0, 2.0);
  EXPECT_EQ(s.plus, 1.0);
  EXPECT_EQ(s.minus, -2.0);
  s = stabilised_split(0.0, 0.0);
  EXPECT_EQ(s.plus, 0.0);
  EXPECT_EQ(s.minus, 0.0);
  s = stabilised_split(-1.0, -2.0);
  EXPECT_EQ(s.plus, 2.0);
  EXPECT_EQ(s.minus, -1.0);
  // seen from the other side
  s = stabilised_split(1.0, 2.0, -1.0);
  EXPECT_EQ(s.plus, 2.0);
  EXPECT_EQ(s.minus, -1.0);
}

TEST(MassFlux, Examples) {
  EXPECT_EQ(mass_flux(1.0, 2.0, 1.0, {3.0, 0.0}), 6.0);
  EXPECT_EQ(mass_flux(1.0, 2.0, 1.0, {0.0, 0.0}), 0.0);
  EXPECT_EQ(mass_flux(1.0, 2.0, 1.0, {1.0, -2.0}), 0.0);
}

TEST(MassFlux, AntisymmetricBetweenNeighbours) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0), r(0.5, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double us = u(rng), du = u(rng), rk = r(rng), rl = r(rng);
    const double fk = mass_flux(0.3, rk, rl, stabilised_split(us, du, +1.0));
    const double fl = mass_flux(0.3, rl, rk, stabilised_split(us, du, -1.0));
    EXPECT_NEAR(fk + fl, 0.0, 1e-12 * (std::abs(fk) + 1.0));
  }
}

TEST(MassFlux, DivergenceTelescopes) {
  std::mt19937 rng(5);
  const MacGrid g = build_grid(2, {8, 8}, {1.0, 1.0}, {false, true});
  const CellField rho = random_cells(g, rng, 0.5, 2.0);
  const EdgeField flux = primal_mass_fluxes(g, rho, random_edges(g, rng), random_edges(g, rng));
  double total = 0.0, scale = 0.0;
  for (double v : flux_divergence(g, flux).values) total += v, scale += std::abs(v);
  EXPECT_LE(std::abs(total), 1e-12 * scale);
}

TEST(DualFluxes, OneDimensionalHandExpansion) {
  const MacGrid g = build_grid(1, {4, 1}, {1.0, 1.0});
  EdgeField f(g);
  f.comp[0] = {1.0, 2.0, 4.0, 8.0};  // F through faces 0..3 in +x
  const auto dual = dual_momentum_fluxes(g, f, 0);
  // dual cell of face 1 spans the centres of cells 0 and 1
  EXPECT_DOUBLE_EQ(dual[1][0].flux, -0.5 * (1.0 + 2.0));
  EXPECT_DOUBLE_EQ(dual[1][1].flux, 0.5 * (2.0 + 4.0));
  EXPECT_EQ(dual[1][0].neighbour, 0);
  EXPECT_EQ(dual[1][1].neighbour, 2);
  // periodic wrap for face 0
  EXPECT_DOUBLE_EQ(dual[0][0].flux, -0.5 * (8.0 + 1.0));
  EXPECT_EQ(dual[0][0].neighbour, 3);
}

TEST(DualFluxes, UniformStateHasNoNetFlux) {
  const MacGrid g = build_grid(2, {6, 5}, {1.0, 1.0});
  const EdgeField u(g, 0.7);
  const EdgeField flux = primal_mass_fluxes(g, CellField(g, 1.2), u, EdgeField(g));
  for (int d = 0; d < 2; ++d) {
    const auto dual = dual_momentum_fluxes(g, flux, d);
    for (const auto& df : dual) {
      double s = 0.0;
      for (const auto& e : df) s += e.flux;
      EXPECT_NEAR(s, 0.0, 1e-14);
      for (int a = 0; a < 2; ++a) EXPECT_NEAR(df[2 * a + 1].flux, dual[0][2 * a + 1].flux, 1e-14);
    }
  }
}

TEST(DualFluxes, ConsistentAcrossSharedFaces) {
  std::mt19937 rng(3);
  const MacGrid g = build_grid(2, {6, 6}, {1.0, 1.0}, {false, false});
  const EdgeField flux =
      primal_mass_fluxes(g, random_cells(g, rng, 0.5, 2.0), random_edges(g, rng), random_edges(g, rng));
  for (int d = 0; d < 2; ++d) {
    const auto dual = dual_momentum_fluxes(g, flux, d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (g.is_external(d, f)) continue;
      for (int a = 0; a < 2; ++a) {
        const auto& hi = dual[f][2 * a + 1];
        if (hi.neighbour == kNoCell || g.is_external(d, hi.neighbour)) continue;
        EXPECT_NEAR(hi.flux, -dual[hi.neighbour][2 * a].flux, 1e-14);
      }
    }
  }
}

TEST(Upwind, GreaterOrEqualBranch) {
  EXPECT_EQ(upwind_edge_value(1.0, 2.0, 1.0), 1.0);
  EXPECT_EQ(upwind_edge_value(1.0, 2.0, 0.0), 1.0);
  EXPECT_EQ(upwind_edge_value(1.0, 2.0, -1.0), 2.0);
}
