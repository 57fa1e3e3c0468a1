#pragma once

/// @file runner.hpp
/// @brief Experiment orchestration: single runs driven by a flat key = value
/// configuration, refinement studies, eps sweeps, reference comparisons and
/// the limiting-scheme companion run. Writes CSV snapshots, a per-step
/// diagnostics CSV and a JSON summary.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "apmac/cases.hpp"
#include "apmac/diagnostics.hpp"
#include "apmac/reference.hpp"
#include "apmac/scheme.hpp"

namespace apmac {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
  std::string case_name;
  std::optional<double> eps;
  std::optional<double> gamma;
  std::optional<Index> mesh;
  std::optional<double> eta1;
  std::optional<double> cfl_safety;
  std::optional<double> t_final;
  std::optional<double> dt_max;
  std::optional<double> newton_tol;
  std::optional<int> outputs;
  std::string outdir;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  return x;
}

inline long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

/// Shortest round-trip-safe text for a number, used in file names and hashes.
inline std::string short_number(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

inline std::string full_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment. Unknown or repeated keys
/// and malformed values are errors.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (val.empty()) throw std::invalid_argument("config: empty value for '" + key + "'");
    if (seen[key]++) throw std::invalid_argument("config: duplicate key '" + key + "'");
    if (key == "case") {
      cfg.case_name = val;
    } else if (key == "eps") {
      cfg.eps = detail::parse_double(key, val);
    } else if (key == "gamma") {
      cfg.gamma = detail::parse_double(key, val);
    } else if (key == "mesh") {
      cfg.mesh = detail::parse_int(key, val);
    } else if (key == "eta1") {
      cfg.eta1 = detail::parse_double(key, val);
    } else if (key == "cfl_safety") {
      cfg.cfl_safety = detail::parse_double(key, val);
    } else if (key == "t_final") {
      cfg.t_final = detail::parse_double(key, val);
    } else if (key == "dt_max") {
      cfg.dt_max = detail::parse_double(key, val);
    } else if (key == "newton_tol") {
      cfg.newton_tol = detail::parse_double(key, val);
    } else if (key == "outputs") {
      cfg.outputs = static_cast<int>(detail::parse_int(key, val));
    } else if (key == "outdir") {
      cfg.outdir = val;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (cfg.case_name.empty()) throw std::invalid_argument("config: missing 'case'");
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "case = " << c.case_name << "\n";
  auto put = [&](const char* k, const auto& v) {
    if (v) o << k << " = " << detail::full_number(static_cast<double>(*v)) << "\n";
  };
  put("eps", c.eps);
  put("gamma", c.gamma);
  put("mesh", c.mesh);
  put("eta1", c.eta1);
  put("cfl_safety", c.cfl_safety);
  put("t_final", c.t_final);
  put("dt_max", c.dt_max);
  put("newton_tol", c.newton_tol);
  put("outputs", c.outputs);
  if (!c.outdir.empty()) o << "outdir = " << c.outdir << "\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Case serialisation (parameters only; initial-data functions come from the
// catalogue by name).

inline std::string serialize_case(const BenchmarkCase& c) {
  std::ostringstream o;
  o << "name = " << c.name << "\n"
    << "mesh = " << c.mesh << "\n"
    << "gamma = " << detail::full_number(c.gamma) << "\n"
    << "t_final = " << detail::full_number(c.t_final) << "\n"
    << "eps_list = ";
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) o << (i ? "," : "") << detail::full_number(c.eps_list[i]);
  o << "\n";
  return o.str();
}

inline BenchmarkCase deserialize_case(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  if (!kv.count("name")) throw std::invalid_argument("case text lacks 'name'");
  BenchmarkCase c = find_case(kv["name"]);
  if (kv.count("mesh")) c.mesh = detail::parse_int("mesh", kv["mesh"]);
  if (kv.count("gamma")) c.gamma = detail::parse_double("gamma", kv["gamma"]);
  if (kv.count("t_final")) c.t_final = detail::parse_double("t_final", kv["t_final"]);
  if (kv.count("eps_list")) {
    c.eps_list.clear();
    std::istringstream l(kv["eps_list"]);
    std::string tok;
    while (std::getline(l, tok, ',')) c.eps_list.push_back(detail::parse_double("eps_list", detail::trim(tok)));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Field output

inline std::string snapshot_stem(const std::string& case_name, double eps, Index mesh, double t) {
  return case_name + "_eps" + detail::short_number(eps) + "_N" + std::to_string(mesh) + "_t" + detail::short_number(t);
}

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f.precision(17);
  return f;
}

inline double cell_x(const MacGrid& g, Index c, int axis) {
  return g.cell_center(axis, g.cell_coords(c)[static_cast<std::size_t>(axis)]);
}

}  // namespace detail

/// 1D: `x,rho,q,u` in one file. 2D: `<stem>_rho.csv`, `<stem>_mach.csv` and
/// `<stem>_vorticity.csv` (x,y,value) plus `<stem>_velocity.csv` (x,y,u,v).
/// Returns the files written.
inline std::vector<std::filesystem::path> write_snapshot(const std::filesystem::path& dir, const std::string& stem,
                                                         const MacGrid& g, const State& s, double gamma,
                                                         double background_u = 0.0) {
  std::vector<std::filesystem::path> files;
  const auto uc = cell_velocity(g, s.velocity);
  if (g.dim() == 1) {
    const auto p = dir / (stem + ".csv");
    auto f = detail::open_csv(p);
    f << "x,rho,q,u\n";
    for (Index c = 0; c < g.num_cells(); ++c) {
      f << detail::cell_x(g, c, 0) << ',' << s.rho[c] << ',' << s.rho[c] * uc[0][c] << ',' << uc[0][c] << '\n';
    }
    files.push_back(p);
    return files;
  }
  auto scalar = [&](const std::string& name, const CellField& q) {
    const auto p = dir / (stem + "_" + name + ".csv");
    auto f = detail::open_csv(p);
    f << "x,y,value\n";
    for (Index c = 0; c < g.num_cells(); ++c) {
      f << detail::cell_x(g, c, 0) << ',' << detail::cell_x(g, c, 1) << ',' << q[c] << '\n';
    }
    files.push_back(p);
  };
  scalar("rho", s.rho);
  scalar("mach", mach_field(g, s, gamma, background_u));
  {
    const auto p = dir / (stem + "_velocity.csv");
    auto f = detail::open_csv(p);
    f << "x,y,u,v\n";
    for (Index c = 0; c < g.num_cells(); ++c) {
      f << detail::cell_x(g, c, 0) << ',' << detail::cell_x(g, c, 1) << ',' << uc[0][c] << ',' << uc[1][c] << '\n';
    }
    files.push_back(p);
  }
  {
    const NodeField w = vorticity(g, s.velocity);
    const auto p = dir / (stem + "_vorticity.csv");
    auto f = detail::open_csv(p);
    f << "x,y,value\n";
    for (Index j = 0; j < w.ny; ++j) {
      for (Index i = 0; i < w.nx; ++i) f << g.node(0, i) << ',' << g.node(1, j) << ',' << w(i, j) << '\n';
    }
    files.push_back(p);
  }
  return files;
}

inline void write_reference_snapshot(const std::filesystem::path& p, const MacGrid& g, const ConservedState& w) {
  auto f = detail::open_csv(p);
  if (g.dim() == 1) {
    f << "x,rho,q,u\n";
    for (Index c = 0; c < g.num_cells(); ++c) {
      f << detail::cell_x(g, c, 0) << ',' << w.rho[c] << ',' << w.mom[0][c] << ',' << w.mom[0][c] / w.rho[c] << '\n';
    }
  } else {
    f << "x,y,u,v\n";
    for (Index c = 0; c < g.num_cells(); ++c) {
      f << detail::cell_x(g, c, 0) << ',' << detail::cell_x(g, c, 1) << ',' << w.mom[0][c] / w.rho[c] << ','
        << w.mom[1][c] / w.rho[c] << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Single run

struct DiagnosticsRow {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double entropy = 0.0;
  double kinetic = 0.0;
  double internal = 0.0;
  double min_rho = 0.0;
  double max_courant = 0.0;
  int newton_iters = 0;
  double eta_min = 0.0;
  double eta_max = 0.0;
  int cond_i_violations = 0;
  int cond_ii_violations = 0;
};

inline void write_diagnostics(const std::filesystem::path& p, const std::vector<DiagnosticsRow>& rows) {
  auto f = detail::open_csv(p);
  f << "step,t,dt,entropy,kinetic,internal,min_rho,max_courant,newton_iters,eta_min,eta_max,cond_i_violations,"
       "cond_ii_violations\n";
  for (const auto& r : rows) {
    f << r.step << ',' << r.t << ',' << r.dt << ',' << r.entropy << ',' << r.kinetic << ',' << r.internal << ','
      << r.min_rho << ',' << r.max_courant << ',' << r.newton_iters << ',' << r.eta_min << ',' << r.eta_max << ','
      << r.cond_i_violations << ',' << r.cond_ii_violations << '\n';
  }
}

struct RunSettings {
  BenchmarkCase bench;
  SchemeParams params;
  Index mesh = 0;
  double t_final = 0.0;
  int outputs = 10;
  std::string outdir;
};

inline RunSettings resolve(const RunConfig& cfg) {
  RunSettings r;
  r.bench = find_case(cfg.case_name);
  r.mesh = cfg.mesh.value_or(r.bench.mesh);
  if (r.mesh < 2) throw std::invalid_argument("mesh must be >= 2");
  r.t_final = cfg.t_final.value_or(r.bench.t_final);
  if (!(r.t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  r.params.epsilon = cfg.eps.value_or(r.bench.eps_list.front());
  if (!(r.params.epsilon > 0.0 && r.params.epsilon <= 1.0)) throw std::invalid_argument("eps must lie in (0,1]");
  r.params.gamma = cfg.gamma.value_or(r.bench.gamma);
  r.params.eta1 = cfg.eta1.value_or(r.params.eta1);
  r.params.cfl_safety = cfg.cfl_safety.value_or(r.params.cfl_safety);
  r.params.dt_max = cfg.dt_max.value_or(r.t_final / 10.0);
  r.params.newton_tol = cfg.newton_tol.value_or(r.params.newton_tol);
  r.params.validate();
  r.outputs = cfg.outputs.value_or(10);
  if (r.outputs < 1) throw std::invalid_argument("outputs must be >= 1");
  r.outdir = cfg.outdir;
  return r;
}

inline State initial_state(const BenchmarkCase& bc, const MacGrid& g, double eps) {
  auto rho = [&](double x, double y) { return bc.rho0(x, y, eps); };
  std::array<std::function<double(double, double)>, 2> u;
  for (std::size_t d = 0; d < 2; ++d) {
    if (bc.u0[d]) {
      u[d] = [&bc, d, eps](double x, double y) { return bc.u0[d](x, y, eps); };
    } else {
      u[d] = [](double, double) { return 0.0; };
    }
  }
  return initialise(g, rho, u);
}

/// Acoustic Courant number dt * max_K sum_d (|u_d| + c/eps) / h_d of a
/// staggered state (cell-averaged velocity).
inline double acoustic_courant(const MacGrid& g, const State& s, double dt, double eps, double gamma) {
  const PressureLaw law(gamma);
  const auto uc = cell_velocity(g, s.velocity);
  double rate = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) {
    double r = 0.0;
    for (int d = 0; d < g.dim(); ++d) r += (std::abs(uc[d][c]) + law.sound_speed(s.rho[c]) / eps) / g.h(d);
    rate = std::max(rate, r);
  }
  return dt * rate;
}

/// max_K |div_M (u^n - du^{n+1})|.
inline double stabilised_divergence(const MacGrid& g, const EdgeField& u, const EdgeField& du) {
  EdgeField v = u;
  for (int d = 0; d < g.dim(); ++d) {
    for (std::size_t i = 0; i < v.comp[d].size(); ++i) v.comp[d][i] -= du.comp[d][i];
  }
  return detail::max_abs(discrete_divergence(g, v));
}

struct RunResult {
  RunSettings settings;
  MacGrid grid;
  State initial;
  State final_state;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<std::filesystem::path> files;
  Json summary;
  // Aggregates over accepted steps.
  long steps = 0;
  int newton_max = 0;
  long newton_le3 = 0;
  double max_courant = 0.0;
  double max_acoustic_courant = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  double max_mass_drift = 0.0;
  bool entropy_monotone = true;
  AuditCounts audit_totals;
  double final_stabilised_divergence = 0.0;
};

namespace detail {
inline double mass_of(const MacGrid& g, const CellField& rho) { return total_mass(g, rho); }

inline double min_of(const CellField& q) { return *std::min_element(q.values.begin(), q.values.end()); }
}  // namespace detail

/// Runs one benchmark to t_final. `on_step` (optional) sees every accepted step.
inline RunResult run(const RunConfig& cfg,
                     const std::function<void(const State&, const StepReport&)>& on_step = nullptr) {
  RunSettings st = resolve(cfg);
  const BenchmarkCase& bc = st.bench;
  MacGrid g = bc.grid(st.mesh);
  const double eps = st.params.epsilon;
  RunResult res;
  res.settings = st;
  res.grid = g;
  res.initial = initial_state(bc, g, eps);
  State s = res.initial;

  std::filesystem::path dir;
  if (!st.outdir.empty()) {
    dir = st.outdir;
    std::filesystem::create_directories(dir);
  }
  auto snapshot = [&](const State& x) {
    if (dir.empty()) return;
    auto f = write_snapshot(dir, snapshot_stem(bc.name, eps, st.mesh, x.time), g, x, st.params.gamma, bc.background_u);
    res.files.insert(res.files.end(), f.begin(), f.end());
  };

  const double mass0 = detail::mass_of(g, s.rho);
  auto row_of = [&](const State& x) {
    const EnergyLedger e = energy_ledger(g, x, eps, st.params.gamma);
    DiagnosticsRow r;
    r.step = x.step;
    r.t = x.time;
    r.entropy = e.total();
    r.kinetic = e.kinetic;
    r.internal = e.internal;
    r.min_rho = detail::min_of(x.rho);
    return r;
  };
  res.diagnostics.push_back(row_of(s));
  res.min_rho = res.diagnostics.back().min_rho;
  snapshot(s);

  SemiImplicitScheme scheme(g, st.params);
  std::vector<double> out_times;
  for (int k = 1; k <= st.outputs; ++k) out_times.push_back(st.t_final * k / st.outputs);
  std::size_t next_out = 0;
  EdgeField u_prev = s.velocity;
  const double t_tol = 1e-12 * st.t_final;

  while (next_out < out_times.size()) {
    const double target = out_times[next_out];
    // split the last stretch before an output time into two equal steps
    // rather than ending with a sliver
    double limit = target - s.time;
    const double dt_stable = compute_dt(g, s, st.params);
    if (limit > dt_stable && limit < 2.0 * dt_stable) limit *= 0.5;
    auto [next, rep] = scheme.step(s, limit);
    if (std::abs(next.time - target) <= t_tol) next.time = target;

    DiagnosticsRow r = row_of(next);
    r.dt = rep.dt;
    r.max_courant = rep.max_courant;
    r.newton_iters = rep.newton_iterations;
    r.eta_min = rep.eta_min;
    r.eta_max = rep.eta_max;
    r.cond_i_violations = rep.audit.cond_i_violations;
    r.cond_ii_violations = rep.audit.cond_ii_violations;
    res.diagnostics.push_back(r);

    ++res.steps;
    res.newton_max = std::max(res.newton_max, rep.newton_iterations);
    res.newton_le3 += rep.newton_iterations <= 3;
    res.max_courant = std::max(res.max_courant, rep.max_courant);
    res.max_acoustic_courant = std::max(res.max_acoustic_courant, acoustic_courant(g, s, rep.dt, eps, st.params.gamma));
    res.min_rho = std::min(res.min_rho, r.min_rho);
    res.max_mass_drift = std::max(res.max_mass_drift, std::abs(detail::mass_of(g, next.rho) - mass0) / mass0);
    res.entropy_monotone = res.entropy_monotone && !rep.entropy_increased;
    res.audit_totals.cond_i_violations += rep.audit.cond_i_violations;
    res.audit_totals.cond_ii_violations += rep.audit.cond_ii_violations;
    res.audit_totals.ratio_violations += rep.audit.ratio_violations;
    if (on_step) on_step(next, rep);

    u_prev = s.velocity;
    s = std::move(next);
    if (s.time >= target - t_tol) {
      snapshot(s);
      ++next_out;
    }
  }
  if (scheme.last_mass()) {
    res.final_stabilised_divergence = stabilised_divergence(g, u_prev, scheme.last_mass()->delta_u);
  }
  res.final_state = s;

  Json& j = res.summary;
  j["case"] = bc.name;
  j["eps"] = eps;
  j["gamma"] = st.params.gamma;
  j["mesh"] = st.mesh;
  j["eta1"] = st.params.eta1;
  j["cfl_safety"] = st.params.cfl_safety;
  j["t_final"] = st.t_final;
  j["steps"] = res.steps;
  j["entropy_monotone"] = res.entropy_monotone;
  j["max_courant"] = res.max_courant;
  j["max_acoustic_courant"] = res.max_acoustic_courant;
  j["min_rho"] = res.min_rho;
  j["max_mass_drift"] = res.max_mass_drift;
  j["newton"] = {{"max_iterations", res.newton_max},
                 {"fraction_le_3", res.steps ? double(res.newton_le3) / double(res.steps) : 1.0}};
  j["audit"] = {{"cond_i_violations", res.audit_totals.cond_i_violations},
                {"cond_ii_violations", res.audit_totals.cond_ii_violations},
                {"ratio_violations", res.audit_totals.ratio_violations}};
  double eta_lo = std::numeric_limits<double>::infinity(), eta_hi = 0.0;
  for (std::size_t i = 1; i < res.diagnostics.size(); ++i) {
    eta_lo = std::min(eta_lo, res.diagnostics[i].eta_min);
    eta_hi = std::max(eta_hi, res.diagnostics[i].eta_max);
  }
  if (res.steps) j["eta_range"] = {eta_lo, eta_hi};
  const double ke0 = res.diagnostics.front().kinetic;
  j["kinetic_initial"] = ke0;
  j["kinetic_final"] = res.diagnostics.back().kinetic;
  j["final_stabilised_divergence"] = res.final_stabilised_divergence;
  j["final_rho_range"] = {detail::min_of(s.rho), *std::max_element(s.rho.values.begin(), s.rho.values.end())};
  if (bc.limit_density) {
    double e2 = 0.0, einf = 0.0;
    for (double r : s.rho.values) {
      e2 += (r - *bc.limit_density) * (r - *bc.limit_density);
      einf = std::max(einf, std::abs(r - *bc.limit_density));
    }
    j["density_l2_deviation"] = std::sqrt(e2 * g.cell_volume());
    j["density_max_deviation"] = einf;
  }
  if (bc.name == "taylor_green") {
    const NodeField w = vorticity(g, s.velocity);
    double n1 = 0, d1 = 0, n2 = 0, d2 = 0, ni = 0, di = 0;
    for (Index jn = 0; jn < w.ny; ++jn) {
      for (Index in = 0; in < w.nx; ++in) {
        const double ex = cases::taylor_green_vorticity(g.node(0, in), g.node(1, jn));
        const double e = w(in, jn) - ex;
        n1 += std::abs(e), d1 += std::abs(ex), n2 += e * e, d2 += ex * ex;
        ni = std::max(ni, std::abs(e)), di = std::max(di, std::abs(ex));
      }
    }
    j["vorticity_error"] = {{"L1", n1 / d1}, {"L2", std::sqrt(n2 / d2)}, {"Linf", ni / di}};
  }

  if (!dir.empty()) {
    const std::string stem = bc.name + "_eps" + detail::short_number(eps) + "_N" + std::to_string(st.mesh);
    write_diagnostics(dir / (stem + "_diagnostics.csv"), res.diagnostics);
    std::ofstream(dir / (stem + "_summary.json")) << j.dump(2) << '\n';
    res.files.push_back(dir / (stem + "_diagnostics.csv"));
    res.files.push_back(dir / (stem + "_summary.json"));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Studies

/// Relative errors of node fields: sum|a-b|/sum|b|, l2 analogue, max|a-b|/max|b|.
struct NormTriple {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

inline NormTriple relative_errors(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_errors: size mismatch");
  double n1 = 0, d1 = 0, n2 = 0, d2 = 0, ni = 0, di = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    n1 += std::abs(e), d1 += std::abs(b[i]), n2 += e * e, d2 += b[i] * b[i];
    ni = std::max(ni, std::abs(e)), di = std::max(di, std::abs(b[i]));
  }
  auto q = [](double n, double d) { return d > 0.0 ? n / d : n; };
  return {q(n1, d1), std::sqrt(q(n2, d2)), q(ni, di)};
}

struct ConvergenceRow {
  Index mesh = 0;
  NormTriple error;
  std::optional<NormTriple> rate;  ///< log2(e_coarse / e_fine)
  RunResult run;
};

/// Vorticity errors against the exact steady field (Taylor-Green).
inline std::vector<ConvergenceRow> convergence_study(const std::string& case_name, const std::vector<Index>& meshes,
                                                     std::optional<double> eps = std::nullopt,
                                                     std::optional<double> t_final = std::nullopt) {
  const BenchmarkCase bc = find_case(case_name);
  if (bc.comparison != Comparison::Exact) throw std::invalid_argument("convergence_study needs a case with an exact solution");
  std::vector<ConvergenceRow> rows;
  for (Index n : meshes) {
    RunConfig cfg;
    cfg.case_name = case_name;
    cfg.mesh = n;
    cfg.eps = eps;
    cfg.t_final = t_final;
    cfg.outputs = 1;
    ConvergenceRow row;
    row.mesh = n;
    row.run = run(cfg);
    const auto& e = row.run.summary["vorticity_error"];
    row.error = {e["L1"].get<double>(), e["L2"].get<double>(), e["Linf"].get<double>()};
    if (!rows.empty()) {
      const NormTriple& c = rows.back().error;
      const double k = std::log2(double(n) / double(rows.back().mesh));
      row.rate = NormTriple{std::log2(c.l1 / row.error.l1) / k, std::log2(c.l2 / row.error.l2) / k,
                            std::log2(c.linf / row.error.linf) / k};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct SweepRow {
  double eps = 0.0;
  double error = 0.0;                ///< ||rho - target||_{L2}
  std::optional<double> ratio;       ///< error / previous error
  RunResult run;
};

inline std::vector<SweepRow> epsilon_sweep(const std::string& case_name, const std::vector<double>& eps_list,
                                           std::optional<Index> mesh = std::nullopt,
                                           std::optional<double> t_final = std::nullopt) {
  const BenchmarkCase bc = find_case(case_name);
  if (!bc.limit_density) throw std::invalid_argument("epsilon_sweep needs a case with a limit density");
  std::vector<SweepRow> rows;
  for (double e : eps_list) {
    RunConfig cfg;
    cfg.case_name = case_name;
    cfg.eps = e;
    cfg.mesh = mesh;
    cfg.t_final = t_final;
    cfg.outputs = 1;
    SweepRow row;
    row.eps = e;
    row.run = run(cfg);
    row.error = row.run.summary["density_l2_deviation"].get<double>();
    if (!rows.empty()) row.ratio = row.error / rows.back().error;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reference and limiting-scheme companions

struct ReferenceRun {
  MacGrid grid;
  ConservedState state;
  long steps = 0;
  double max_courant = 0.0;           ///< advective, max |u| dt / h
  double max_acoustic_courant = 0.0;
  double max_mass_drift = 0.0;
};

/// Rusanov run of a case at acoustic CFL `cfl`; dt is further capped by
/// `dt_cap` when positive.
inline ReferenceRun run_reference(const BenchmarkCase& bc, double eps, Index mesh, double t_final, double cfl = 0.9,
                                  double dt_cap = 0.0) {
  MacGrid g = bc.grid(mesh);
  ReferenceParams p{eps, bc.gamma};
  auto f = [&](const CaseFunction& fn) {
    return [&fn, eps](double x, double y) { return fn ? fn(x, y, eps) : 0.0; };
  };
  ReferenceRun out{g, reference_initialise(g, f(bc.rho0), f(bc.u0[0]), f(bc.u0[1]))};
  const double mass0 = total_mass(g, out.state.rho);
  while (out.state.time < t_final * (1.0 - 1e-14)) {
    double dt = acoustic_dt(g, out.state, cfl, p);
    if (dt_cap > 0.0) dt = std::min(dt, dt_cap);
    dt = std::min(dt, t_final - out.state.time);
    out.max_acoustic_courant = std::max(out.max_acoustic_courant, acoustic_cfl(g, out.state, dt, p));
    for (Index c = 0; c < g.num_cells(); ++c) {
      for (int d = 0; d < g.dim(); ++d) {
        out.max_courant = std::max(out.max_courant, std::abs(out.state.mom[d][c] / out.state.rho[c]) * dt / g.h(d));
      }
    }
    out.state = rusanov_step(g, out.state, dt, p);
    out.max_mass_drift = std::max(out.max_mass_drift, std::abs(total_mass(g, out.state.rho) - mass0) / mass0);
    ++out.steps;
  }
  return out;
}

/// Hex digest (FNV-1a) of a configuration text, used to key cached references.
inline std::string config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct CompareResult {
  RunResult scheme;
  std::filesystem::path reference_file;
  bool reference_from_cache = false;
};

/// Runs the scheme and the fine-mesh Rusanov reference of a case and writes
/// both; the reference is cached under `<outdir>/cache`.
inline CompareResult compare(const RunConfig& cfg) {
  const RunSettings st = resolve(cfg);
  const BenchmarkCase& bc = st.bench;
  if (bc.comparison != Comparison::Reference) throw std::invalid_argument("case '" + bc.name + "' has no reference comparison");
  if (st.outdir.empty()) throw std::invalid_argument("compare needs an output directory");
  CompareResult out;
  out.scheme = run(cfg);
  const double eps = st.params.epsilon;
  const Index ref_mesh = bc.reference_mesh;
  const std::string key = "rusanov\ncase=" + bc.name + "\neps=" + detail::full_number(eps) + "\ngamma=" +
                          detail::full_number(bc.gamma) + "\nmesh=" + std::to_string(ref_mesh) + "\nt=" +
                          detail::full_number(st.t_final) + "\ndt_cap=" + detail::full_number(bc.reference_dt) +
                          "\ncfl=0.9\n";
  const std::filesystem::path cache_dir = std::filesystem::path(st.outdir) / "cache";
  std::filesystem::create_directories(cache_dir);
  const auto cached = cache_dir / ("reference_" + config_hash(key) + ".csv");
  if (std::filesystem::exists(cached)) {
    out.reference_from_cache = true;
  } else {
    const ReferenceRun ref = run_reference(bc, eps, ref_mesh, st.t_final, 0.9, bc.reference_dt);
    const auto tmp = cached.string() + ".tmp";
    write_reference_snapshot(tmp, ref.grid, ref.state);
    std::filesystem::rename(tmp, cached);
  }
  out.reference_file =
      std::filesystem::path(st.outdir) / (snapshot_stem(bc.name, eps, ref_mesh, st.t_final) + "_reference.csv");
  std::filesystem::copy_file(cached, out.reference_file, std::filesystem::copy_options::overwrite_existing);
  return out;
}

struct LimitingRun {
  MacGrid grid;
  EdgeField velocity;
  CellField pi;
  long steps = 0;
  double max_poisson_residual = 0.0;
};

/// The zero-Mach limiting scheme on a case's initial velocity, with eta = eta1.
/// When `dts` is given those step sizes are replayed instead of the
/// scheme's own time-step rule.
inline LimitingRun run_limiting(const BenchmarkCase& bc, Index mesh, double t_final, double eta1 = 1.55,
                                double cfl = 0.9, const std::vector<double>* dts = nullptr) {
  MacGrid g = bc.grid(mesh);
  const State s0 = initial_state(bc, g, 1.0);
  IncompressibleScheme scheme(g, eta1, cfl);
  LimitingRun out{g, s0.velocity, CellField(g)};
  double t = 0.0;
  const double dt_max = t_final / 10.0;
  while (t < t_final * (1.0 - 1e-14)) {
    double dt = 0.0;
    if (dts) {
      if (static_cast<std::size_t>(out.steps) >= dts->size()) break;
      dt = (*dts)[static_cast<std::size_t>(out.steps)];
    } else {
      dt = std::min(scheme.compute_dt(out.velocity, out.pi, dt_max), t_final - t);
    }
    auto r = scheme.step(out.velocity, dt);
    out.velocity = std::move(r.velocity);
    out.pi = std::move(r.pi);
    out.max_poisson_residual = std::max(out.max_poisson_residual, r.poisson_residual);
    t += dt;
    ++out.steps;
  }
  return out;
}

}  // namespace apmac
