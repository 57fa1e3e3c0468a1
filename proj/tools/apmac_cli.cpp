// Command-line front end: single runs, refinement studies, eps sweeps and
// reference comparisons.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apmac/runner.hpp"

namespace {

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    if constexpr (std::is_integral_v<T>) {
      out.push_back(static_cast<T>(std::stol(tok)));
    } else {
      out.push_back(std::stod(tok));
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + s + "'");
  return out;
}

void print_summary(const apmac::RunResult& r) { std::cout << r.summary.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-implicit low-Mach barotropic Euler solver on MAC grids"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run one benchmark from a key = value config file");
  run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  std::string case_name, meshes = "16,32,64,128,256", eps_list, outdir = "out";
  double eps = 0.0, t_final = 0.0;
  Eigen::Index mesh = 0;

  auto* conv_cmd = app.add_subcommand("convergence", "Vorticity refinement study against the exact solution");
  conv_cmd->add_option("case", case_name, "Case name")->required();
  conv_cmd->add_option("--meshes", meshes, "Comma-separated mesh sizes");
  conv_cmd->add_option("--eps", eps, "Mach number parameter");
  conv_cmd->add_option("--t-final", t_final, "Final time");
  conv_cmd->add_option("--outdir", outdir, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Density deviation from the incompressible limit over eps");
  sweep_cmd->add_option("case", case_name, "Case name")->required();
  sweep_cmd->add_option("--eps", eps_list, "Comma-separated eps values");
  sweep_cmd->add_option("--mesh", mesh, "Mesh size");
  sweep_cmd->add_option("--t-final", t_final, "Final time");
  sweep_cmd->add_option("--outdir", outdir, "Output directory");

  auto* cmp_cmd = app.add_subcommand("compare", "Run the scheme and the fine-mesh Rusanov reference");
  cmp_cmd->add_option("case", case_name, "Case name")->required();
  cmp_cmd->add_option("--eps", eps, "Mach number parameter (default: every eps of the case)");
  cmp_cmd->add_option("--mesh", mesh, "Mesh size");
  cmp_cmd->add_option("--outdir", outdir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      print_summary(apmac::run(apmac::load_config(config_path)));
    } else if (*conv_cmd) {
      const auto rows = apmac::convergence_study(case_name, parse_list<Eigen::Index>(meshes),
                                                 eps > 0.0 ? std::optional<double>(eps) : std::nullopt,
                                                 t_final > 0.0 ? std::optional<double>(t_final) : std::nullopt);
      std::filesystem::create_directories(outdir);
      const auto path = std::filesystem::path(outdir) / (case_name + "_convergence.csv");
      std::ofstream f(path);
      f.precision(17);
      f << "mesh,l1,l1_rate,l2,l2_rate,linf,linf_rate\n";
      std::printf("%6s %12s %8s %12s %8s %12s %8s\n", "mesh", "L1", "rate", "L2", "rate", "Linf", "rate");
      for (const auto& r : rows) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const apmac::NormTriple rate = r.rate.value_or(apmac::NormTriple{nan, nan, nan});
        f << r.mesh << ',' << r.error.l1 << ',' << rate.l1 << ',' << r.error.l2 << ',' << rate.l2 << ','
          << r.error.linf << ',' << rate.linf << '\n';
        std::printf("%6ld %12.6f %8.4f %12.6f %8.4f %12.6f %8.4f\n", static_cast<long>(r.mesh), r.error.l1, rate.l1,
                    r.error.l2, rate.l2, r.error.linf, rate.linf);
      }
    } else if (*sweep_cmd) {
      const auto bc = apmac::find_case(case_name);
      const auto list = eps_list.empty() ? bc.eps_list : parse_list<double>(eps_list);
      const auto rows = apmac::epsilon_sweep(case_name, list, mesh > 0 ? std::optional<Eigen::Index>(mesh) : std::nullopt,
                                             t_final > 0.0 ? std::optional<double>(t_final) : std::nullopt);
      std::filesystem::create_directories(outdir);
      std::ofstream f(std::filesystem::path(outdir) / (case_name + "_sweep.csv"));
      f.precision(17);
      f << "eps,error,ratio\n";
      std::printf("%10s %14s %10s\n", "eps", "L2 error", "ratio");
      for (const auto& r : rows) {
        const double ratio = r.ratio.value_or(std::numeric_limits<double>::quiet_NaN());
        f << r.eps << ',' << r.error << ',' << ratio << '\n';
        std::printf("%10.1e %14.6e %10.3e\n", r.eps, r.error, ratio);
      }
    } else if (*cmp_cmd) {
      const auto bc = apmac::find_case(case_name);
      const std::vector<double> list = eps > 0.0 ? std::vector<double>{eps} : bc.eps_list;
      for (double e : list) {
        apmac::RunConfig cfg;
        cfg.case_name = case_name;
        cfg.eps = e;
        if (mesh > 0) cfg.mesh = mesh;
        cfg.outdir = outdir;
        const auto r = apmac::compare(cfg);
        std::cout << "eps " << e << ": scheme steps " << r.scheme.steps << ", reference "
                  << (r.reference_from_cache ? "(cached) " : "") << r.reference_file.string() << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
