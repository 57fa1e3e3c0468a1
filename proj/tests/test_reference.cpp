#include <gtest/gtest.h>

#include <cmath>

#include "apmac/reference.hpp"

using namespace apmac;

namespace {

ConservedState constant(const MacGrid& g, double rho, double u) {
  return reference_initialise(g, [rho](double, double) { return rho; }, [u](double, double) { return u; },
                              [](double, double) { return 0.0; });
}

double l1_distance(const MacGrid& coarse, const CellField& a, const MacGrid& fine, const CellField& b) {
  // average the fine field onto the coarse cells
  const Index r = fine.cells(0) / coarse.cells(0);
  double s = 0.0;
  for (Index c = 0; c < coarse.num_cells(); ++c) {
    double avg = 0.0;
    for (Index j = 0; j < r; ++j) avg += b[c * r + j];
    s += std::abs(a[c] - avg / static_cast<double>(r)) * coarse.cell_volume();
  }
  return s;
}

}  // namespace

TEST(AcousticDt, UnitState) {
  const MacGrid g = build_grid(1, {100, 1}, {1.0, 1.0});
  const auto w = constant(g, 1.0, 0.0);
  EXPECT_NEAR(acoustic_dt(g, w, 0.9, {1.0, 2.0}), 0.9 * 0.01 / std::sqrt(2.0), 1e-15);
}

TEST(AcousticDt, ScalesWithEpsilon) {
  const MacGrid g = build_grid(1, {100, 1}, {1.0, 1.0});
  const auto w = constant(g, 1.0, 0.0);
  const double ratio = acoustic_dt(g, w, 0.9, {1.0, 2.0}) / acoustic_dt(g, w, 0.9, {1e-3, 2.0});
  EXPECT_NEAR(ratio, 1e3, 1.0);
}

TEST(Rusanov, ConstantStateUnchanged) {
  const MacGrid g = build_grid(2, {8, 8}, {1.0, 1.0});
  const auto w = constant(g, 1.2, 0.3);
  const ReferenceParams p{0.5, 2.0};
  const auto out = rusanov_step(g, w, acoustic_dt(g, w, 0.9, p), p);
  for (Index c = 0; c < g.num_cells(); ++c) {
    EXPECT_NEAR(out.rho[c], 1.2, 1e-14);
    EXPECT_NEAR(out.mom[0][c], 1.2 * 0.3, 1e-14);
    EXPECT_NEAR(out.mom[1][c], 0.0, 1e-14);
  }
}

TEST(Rusanov, ConservesMassAndMomentum) {
  const MacGrid g = build_grid(2, {16, 12}, {1.0, 1.0});
  auto w = reference_initialise(
      g, [](double x, double y) { return 1.0 + 0.2 * std::sin(6.283 * x) * std::cos(6.283 * y); },
      [](double x, double) { return 0.3 * std::cos(6.283 * x); }, [](double, double y) { return 0.1 * std::sin(6.283 * y); });
  const ReferenceParams p{0.3, 1.4};
  auto sum = [&](const CellField& q) {
    double s = 0.0;
    for (double v : q.values) s += v;
    return s;
  };
  const double m0 = sum(w.rho), qx0 = sum(w.mom[0]), qy0 = sum(w.mom[1]);
  for (int n = 0; n < 20; ++n) w = rusanov_step(g, w, acoustic_dt(g, w, 0.9, p), p);
  EXPECT_NEAR(sum(w.rho), m0, 1e-12 * m0);
  EXPECT_NEAR(sum(w.mom[0]), qx0, 1e-11);
  EXPECT_NEAR(sum(w.mom[1]), qy0, 1e-11);
}

TEST(Rusanov, RejectsBoundedGridsAndLargeSteps) {
  const MacGrid bounded = build_grid(1, {10, 1}, {1.0, 1.0}, {false, true});
  const auto wb = constant(bounded, 1.0, 0.0);
  EXPECT_THROW(rusanov_step(bounded, wb, 1e-4, {1.0, 2.0}), std::invalid_argument);
  const MacGrid g = build_grid(1, {10, 1}, {1.0, 1.0});
  const auto w = constant(g, 1.0, 0.0);
  EXPECT_THROW(rusanov_step(g, w, 2.0 * acoustic_dt(g, w, 1.0, {1.0, 2.0}), {1.0, 2.0}), std::invalid_argument);
}

TEST(Rusanov, RefinementHalvesError) {
  const ReferenceParams p{1.0, 1.0};
  const double t_final = 0.1;
  auto solve = [&](Index n) {
    const MacGrid g = build_grid(1, {n, 1}, {1.0, 1.0});
    auto w = reference_initialise(g, [](double x, double) { return 1.0 + 0.2 * std::exp(-100.0 * (x - 0.5) * (x - 0.5)); },
                                  [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
    while (w.time < t_final - 1e-14) w = rusanov_step(g, w, std::min(acoustic_dt(g, w, 0.9, p), t_final - w.time), p);
    return std::make_pair(g, w.rho);
  };
  const auto [gf, rf] = solve(3200);
  const auto [g1, r1] = solve(200);
  const auto [g2, r2] = solve(400);
  const double e1 = l1_distance(g1, r1, gf, rf);
  const double e2 = l1_distance(g2, r2, gf, rf);
  EXPECT_GT(e1 / e2, 2.0 * 0.7);
  EXPECT_LT(e1 / e2, 2.0 * 1.3);
}

TEST(Rusanov, TotalMassHelper) {
  const MacGrid g = build_grid(2, {4, 5}, {2.0, 1.0});
  EXPECT_NEAR(total_mass(g, CellField(g, 3.0)), 6.0, 1e-14);
}
