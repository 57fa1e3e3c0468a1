#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "apmac/runner.hpp"

using namespace apmac;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("apmac_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

}  // namespace

TEST(Catalog, ContainsEveryBenchmark) {
  const auto cat = case_catalog();
  ASSERT_EQ(cat.size(), 7u);
  const std::map<std::string, std::pair<Index, double>> expected = {
      {"riemann_1d", {200, 2.0}},    {"riemann_extreme", {100, 2.0}}, {"acoustic_pulses", {100, 1.4}},
      {"vortex", {100, 2.0}},        {"cyl_explosion", {100, 1.0}},   {"taylor_green", {32, 2.0}},
      {"shear_flow", {256, 2.0}}};
  for (const auto& c : cat) {
    ASSERT_TRUE(expected.count(c.name)) << c.name;
    EXPECT_EQ(c.mesh, expected.at(c.name).first) << c.name;
    EXPECT_EQ(c.gamma, expected.at(c.name).second) << c.name;
    for (double e : c.eps_list) {
      EXPECT_GT(e, 0.0);
      EXPECT_LE(e, 1.0);
    }
    // initial density strictly positive on the default mesh
    const MacGrid g = c.grid(std::min<Index>(c.mesh, 64));
    for (double eps : c.eps_list) EXPECT_NO_THROW(initial_state(c, g, eps)) << c.name;
  }
  EXPECT_THROW(find_case("nope"), std::invalid_argument);
}

TEST(Catalog, RiemannData) {
  const auto c = find_case("riemann_1d");
  const double eps = 0.3, e2 = eps * eps;
  EXPECT_DOUBLE_EQ(c.rho0(0.1, 0, eps), 1.0);
  EXPECT_DOUBLE_EQ(c.rho0(0.25, 0, eps), 1.0 + e2);
  EXPECT_DOUBLE_EQ(c.rho0(0.5, 0, eps), 1.0);
  EXPECT_DOUBLE_EQ(c.rho0(0.75, 0, eps), 1.0 - e2);
  EXPECT_DOUBLE_EQ(c.rho0(0.9, 0, eps), 1.0);
  auto q = [&](double x) { return c.rho0(x, 0, eps) * c.u0[0](x, 0, eps); };
  EXPECT_NEAR(q(0.1), 1.0 - 0.5 * e2, 1e-15);
  EXPECT_NEAR(q(0.25), 1.0, 1e-15);
  EXPECT_NEAR(q(0.5), 1.0 + 0.5 * e2, 1e-15);
  EXPECT_NEAR(q(0.75), 1.0, 1e-15);
  EXPECT_NEAR(q(0.95), 1.0 - 0.5 * e2, 1e-15);
}

TEST(Catalog, VortexAndTaylorGreenData) {
  const auto v = find_case("vortex");
  const double eps = 1e-4;
  const double zeta = eps * std::sqrt(110.0) / 0.1;
  const double a = zeta * 1.5 / (4.0 * std::numbers::pi);
  EXPECT_NEAR(v.rho0(0.5, 0.5, eps), 110.0 + a * a * (cases::vortex_k(0.0) - cases::vortex_k(std::numbers::pi)), 1e-12);
  EXPECT_EQ(v.rho0(0.9, 0.9, eps), 110.0);
  EXPECT_EQ(v.u0[0](0.05, 0.05, eps), 0.1);
  const auto tg = find_case("taylor_green");
  EXPECT_EQ(tg.rho0(1.0, 2.0, 0.01), 1.0);
  EXPECT_DOUBLE_EQ(tg.u0[0](1.0, 2.0, 0.01), -std::sin(1.0) * std::cos(2.0));
  EXPECT_DOUBLE_EQ(tg.u0[1](1.0, 2.0, 0.01), std::cos(1.0) * std::sin(2.0));
}

TEST(Catalog, RoundTripReproducesInitialFieldsExactly) {
  for (const auto& c : case_catalog()) {
    const auto back = deserialize_case(serialize_case(c));
    EXPECT_EQ(back.name, c.name);
    EXPECT_EQ(back.mesh, c.mesh);
    EXPECT_EQ(back.gamma, c.gamma);
    EXPECT_EQ(back.t_final, c.t_final);
    EXPECT_EQ(back.eps_list, c.eps_list);
    const MacGrid g = c.grid(16);
    const State a = initial_state(c, g, c.eps_list.back());
    const State b = initial_state(back, back.grid(16), back.eps_list.back());
    EXPECT_EQ(a.rho.values, b.rho.values) << c.name;
    EXPECT_EQ(a.velocity.comp, b.velocity.comp) << c.name;
  }
}

TEST(Config, ParsesAllKeys) {
  const auto cfg = parse_config(
      "# comment\ncase = riemann_1d\neps = 0.3\ngamma = 2\nmesh = 50\neta1 = 1.6\ncfl_safety = 0.8\n"
      "t_final = 0.01\ndt_max = 0.001\nnewton_tol = 1e-11\noutputs = 2\noutdir = /tmp/x  # trailing\n");
  EXPECT_EQ(cfg.case_name, "riemann_1d");
  EXPECT_EQ(*cfg.eps, 0.3);
  EXPECT_EQ(*cfg.gamma, 2.0);
  EXPECT_EQ(*cfg.mesh, 50);
  EXPECT_EQ(*cfg.eta1, 1.6);
  EXPECT_EQ(*cfg.cfl_safety, 0.8);
  EXPECT_EQ(*cfg.t_final, 0.01);
  EXPECT_EQ(*cfg.dt_max, 0.001);
  EXPECT_EQ(*cfg.newton_tol, 1e-11);
  EXPECT_EQ(*cfg.outputs, 2);
  EXPECT_EQ(cfg.outdir, "/tmp/x");
  const auto again = parse_config(to_text(cfg));
  EXPECT_EQ(to_text(again), to_text(cfg));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("case = riemann_1d\nfoo = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("case = riemann_1d\neps = abc\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("case = riemann_1d\nmesh = 3.5\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("case = riemann_1d\neps = 0.1\neps = 0.2\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("eps = 0.1\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("case riemann_1d\n"), std::invalid_argument);
  RunConfig bad;
  bad.case_name = "riemann_1d";
  bad.eps = 2.0;
  EXPECT_THROW(resolve(bad), std::invalid_argument);
}

TEST(Run, DefaultsAndOutputs) {
  const fs::path dir = fresh_dir("run1d");
  RunConfig cfg = parse_config("case = riemann_1d\neps = 0.3\nmesh = 50\nt_final = 0.01\noutputs = 2\noutdir = " +
                               dir.string() + "\n");
  const RunResult r = run(cfg);
  EXPECT_EQ(r.settings.params.dt_max, 0.001);
  EXPECT_TRUE(r.summary["entropy_monotone"].get<bool>());
  EXPECT_NEAR(r.final_state.time, 0.01, 1e-15);
  EXPECT_LE(r.max_mass_drift, 1e-12);
  for (const char* t : {"0", "0.005", "0.01"}) {
    const fs::path p = dir / (std::string("riemann_1d_eps0.3_N50_t") + t + ".csv");
    ASSERT_TRUE(fs::exists(p)) << p;
    EXPECT_EQ(first_line(p), "x,rho,q,u");
  }
  const fs::path diag = dir / "riemann_1d_eps0.3_N50_diagnostics.csv";
  EXPECT_EQ(first_line(diag),
            "step,t,dt,entropy,kinetic,internal,min_rho,max_courant,newton_iters,eta_min,eta_max,cond_i_violations,"
            "cond_ii_violations");
  std::ifstream js(dir / "riemann_1d_eps0.3_N50_summary.json");
  const Json j = Json::parse(js);
  EXPECT_TRUE(j.contains("entropy_monotone"));
  EXPECT_TRUE(j.contains("max_courant"));
  EXPECT_EQ(j["steps"].get<long>(), r.steps);
}

TEST(Run, NoSliverStepBeforeOutputTimes) {
  const fs::path dir = fresh_dir("sliver");
  RunConfig cfg = parse_config("case = riemann_1d\neps = 0.3\nmesh = 50\nt_final = 0.0107\noutputs = 3\noutdir = " +
                               dir.string() + "\n");
  const RunResult r = run(cfg);
  ASSERT_GE(r.diagnostics.size(), 3u);
  for (std::size_t k = 2; k < r.diagnostics.size(); ++k) {
    EXPECT_GE(r.diagnostics[k].dt, 0.45 * r.diagnostics[k - 1].dt) << "step " << k;
  }
}

TEST(Run, SnapshotValuesUseFullPrecision) {
  const fs::path dir = fresh_dir("precision");
  RunConfig cfg = parse_config("case = riemann_1d\neps = 0.3\nmesh = 10\nt_final = 0.001\noutputs = 1\noutdir = " +
                               dir.string() + "\n");
  const RunResult r = run(cfg);
  std::ifstream f(dir / "riemann_1d_eps0.3_N10_t0.001.csv");
  std::string line;
  std::getline(f, line);
  std::getline(f, line);
  const double x = std::stod(line.substr(0, line.find(',')));
  const std::string rho_txt = line.substr(line.find(',') + 1, line.find(',', line.find(',') + 1) - line.find(',') - 1);
  EXPECT_EQ(x, r.grid.cell_center(0, 0));
  EXPECT_EQ(std::stod(rho_txt), r.final_state.rho[0]);
}

TEST(Run, TwoDimensionalFilesCarryFieldSuffix) {
  const fs::path dir = fresh_dir("run2d");
  RunConfig cfg =
      parse_config("case = taylor_green\nmesh = 8\nt_final = 0.1\noutputs = 1\noutdir = " + dir.string() + "\n");
  const RunResult r = run(cfg);
  const std::string stem = "taylor_green_eps0.01_N8_t0.1";
  EXPECT_EQ(first_line(dir / (stem + "_rho.csv")), "x,y,value");
  EXPECT_EQ(first_line(dir / (stem + "_mach.csv")), "x,y,value");
  EXPECT_EQ(first_line(dir / (stem + "_vorticity.csv")), "x,y,value");
  EXPECT_EQ(first_line(dir / (stem + "_velocity.csv")), "x,y,u,v");
  EXPECT_TRUE(r.summary.contains("vorticity_error"));
}

TEST(Studies, ExactFieldHasZeroError) {
  const std::vector<double> w = {1.0, -2.0, 0.5};
  const NormTriple e = relative_errors(w, w);
  EXPECT_EQ(e.l1, 0.0);
  EXPECT_EQ(e.l2, 0.0);
  EXPECT_EQ(e.linf, 0.0);
}

TEST(Studies, ConvergenceTableShape) {
  const auto rows = convergence_study("taylor_green", {8, 16}, std::nullopt, 0.1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].rate.has_value());
  ASSERT_TRUE(rows[1].rate.has_value());
  EXPECT_LT(rows[1].error.l2, rows[0].error.l2);
  EXPECT_THROW(convergence_study("riemann_1d", {8}), std::invalid_argument);
}

TEST(Studies, EpsilonSweepShape) {
  const auto rows = epsilon_sweep("shear_flow", {1e-1, 1e-2}, 16, 0.05);
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[1].ratio.has_value());
  EXPECT_LT(*rows[1].ratio, 0.3);
  EXPECT_THROW(epsilon_sweep("riemann_1d", {0.1}), std::invalid_argument);
}

TEST(Compare, WritesReferenceAndReusesCache) {
  const fs::path dir = fresh_dir("compare");
  RunConfig cfg = parse_config("case = riemann_1d\neps = 0.8\nmesh = 50\nt_final = 0.005\noutdir = " + dir.string() + "\n");
  const auto first = compare(cfg);
  EXPECT_FALSE(first.reference_from_cache);
  EXPECT_TRUE(fs::exists(first.reference_file));
  EXPECT_EQ(first_line(first.reference_file), "x,rho,q,u");
  const auto second = compare(cfg);
  EXPECT_TRUE(second.reference_from_cache);
  EXPECT_EQ(config_hash("a"), config_hash("a"));
  EXPECT_NE(config_hash("a"), config_hash("b"));
}

TEST(Limiting, ShortShearRunStaysBounded) {
  const auto lr = run_limiting(find_case("shear_flow"), 16, 0.1);
  EXPECT_GT(lr.steps, 0);
  EXPECT_LE(lr.max_poisson_residual, 1e-10);
}
