#pragma once

/// @file scheme.hpp
/// @brief Semi-implicit asymptotic-preserving time stepper for the barotropic
/// Euler system on MAC grids, and its zero-Mach limiting scheme.
///
/// One step of the compressible scheme:
///   1. dt from the explicit sufficient condition (compute_dt);
///   2. rho^{n+1} from the nonlinear mass balance with the implicitly
///      stabilised velocity v = u^n - (eta dt / eps^2) grad p(rho^{n+1}),
///      solved by a semismooth Newton method (mass_step);
///   3. u^{n+1} from the explicit dual-cell momentum balance (momentum_step).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apmac/diagnostics.hpp"
#include "apmac/eos.hpp"
#include "apmac/grid.hpp"
#include "apmac/linear_solver.hpp"
#include "apmac/operators.hpp"

namespace apmac {

struct SchemeParams {
  double epsilon = 1.0;
  double gamma = 2.0;
  double eta1 = 1.55;
  double cfl_safety = 0.9;
  double dt_max = std::numeric_limits<double>::infinity();
  double newton_tol = 1e-10;
  int newton_max_iters = 20;
  int max_dt_halvings = 10;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(eta1 > 1.5)) throw std::invalid_argument("eta1 must exceed 3/2");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0,1]");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
    if (newton_max_iters < 1) throw std::invalid_argument("newton_max_iters must be >= 1");
    if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
  }
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { NonConvergence, NonPositive };
  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct StepReport {
  double dt = 0.0;
  int newton_iterations = 0;
  std::vector<double> residual_history;
  double eta_min = 0.0;
  double eta_max = 0.0;
  double max_courant = 0.0;
  double entropy_before = 0.0;
  double entropy_after = 0.0;
  int dt_halvings = 0;
  bool entropy_increased = false;
  AuditCounts audit;
};

/// Cell and dual-cell averages of the initial data, by the midpoint rule.
inline State initialise(const MacGrid& g, const std::function<double(double, double)>& rho0,
                        const std::array<std::function<double(double, double)>, 2>& u0) {
  State s;
  s.rho = CellField(g);
  for (Index c = 0; c < g.num_cells(); ++c) {
    const auto ij = g.cell_coords(c);
    const double r = rho0(g.cell_center(0, ij[0]), g.dim() == 2 ? g.cell_center(1, ij[1]) : 0.0);
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("initial density must be positive, got " + std::to_string(r));
    }
    s.rho[c] = r;
  }
  s.velocity = EdgeField(g);
  for (int d = 0; d < g.dim(); ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (g.is_external(d, f)) continue;
      const auto x = g.face_center(d, f);
      s.velocity(d, f) = u0[static_cast<std::size_t>(d)](x[0], g.dim() == 2 ? x[1] : 0.0);
    }
  }
  return s;
}

/// eta_sigma = eta1 / rho_{D_sigma}^n.
inline EdgeField select_eta(const MacGrid& g, const CellField& rho_n, double eta1) {
  EdgeField eta = dual_average(g, rho_n);
  for (int d = 0; d < g.dim(); ++d) {
    for (auto& e : eta.comp[d]) e = eta1 / e;
  }
  return eta;
}

/// Result of the implicit mass update. `delta_u` and `fluxes` are the
/// stabilisation and primal mass fluxes evaluated at the returned density,
/// ready for the momentum update.
struct MassStepResult {
  CellField rho;
  EdgeField eta;
  EdgeField delta_u;
  EdgeField fluxes;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Scratch storage reused across steps on one grid (factorisation pattern).
struct NewtonWorkspace {
  SparseDirectSolver solver;
  std::vector<Triplet> triplets;
};

namespace detail {

struct MassSystem {
  const MacGrid& g;
  const PressureLaw& law;
  const CellField& rho_n;
  const EdgeField& u;
  EdgeField coef;  // eta dt / eps^2 * |sigma| / |D_sigma|
  double dt;

  EdgeField stabilisation(const CellField& rho) const {
    EdgeField du(g);
    for (int d = 0; d < g.dim(); ++d) {
      for (Index f = 0; f < g.num_faces(d); ++f) {
        const Index k = g.lower_cell(d, f);
        const Index l = g.upper_cell(d, f);
        if (k == kNoCell || l == kNoCell) continue;
        du(d, f) = coef(d, f) * law.difference(rho[k], rho[l]);
      }
    }
    return du;
  }

  Vector residual(const CellField& rho, EdgeField* du_out = nullptr, EdgeField* flux_out = nullptr) const {
    EdgeField du = stabilisation(rho);
    EdgeField flux = primal_mass_fluxes(g, rho, u, du);
    const CellField div = flux_divergence(g, flux);
    Vector r(g.num_cells());
    const double inv_dt = 1.0 / dt;
    for (Index c = 0; c < g.num_cells(); ++c) r[c] = (rho[c] - rho_n[c]) * inv_dt + div[c];
    if (du_out) *du_out = std::move(du);
    if (flux_out) *flux_out = std::move(flux);
    return r;
  }

  /// Generalised Jacobian, with d(a^+)/da = (1 + sign a)/2 and sign(0) = 0.
  void jacobian(const CellField& rho, std::vector<Triplet>& trip, SparseMatrix& jac) const {
    trip.clear();
    const double inv_vol = 1.0 / g.cell_volume();
    const Index n = g.num_cells();
    for (Index c = 0; c < n; ++c) trip.emplace_back(int(c), int(c), 1.0 / dt);
    for (int d = 0; d < g.dim(); ++d) {
      const double area = g.face_measure(d);
      for (Index f = 0; f < g.num_faces(d); ++f) {
        const Index k = g.lower_cell(d, f);
        const Index l = g.upper_cell(d, f);
        if (k == kNoCell || l == kNoCell) continue;
        const double a = u(d, f);
        const double b = coef(d, f) * law.difference(rho[k], rho[l]);
        const double sb = (b > 0.0) ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
        const double dflux_db = -rho[k] * 0.5 * (1.0 - sb) - rho[l] * 0.5 * (1.0 + sb);
        const double db_dk = -coef(d, f) * law.derivative(rho[k]);
        const double db_dl = coef(d, f) * law.derivative(rho[l]);
        const double df_dk = area * (positive_part(a) - negative_part(b) + dflux_db * db_dk) * inv_vol;
        const double df_dl = area * (negative_part(a) - positive_part(b) + dflux_db * db_dl) * inv_vol;
        trip.emplace_back(int(k), int(k), df_dk);
        trip.emplace_back(int(k), int(l), df_dl);
        trip.emplace_back(int(l), int(k), -df_dk);
        trip.emplace_back(int(l), int(l), -df_dl);
      }
    }
    jac.resize(n, n);
    jac.setFromTriplets(trip.begin(), trip.end());
  }
};

inline double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline double max_abs(const CellField& q) {
  double m = 0.0;
  for (double v : q.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

/// Solves, per cell,
///   (rho_K^{n+1} - rho_K^n)/dt + 1/|K| sum_sigma F_{sigma,K}(rho^{n+1}, u^n - du(rho^{n+1})) = 0
/// with du_sigma = (eta_sigma dt / eps^2) (grad p^{n+1})_sigma.
///
/// Converged when the residual max-norm is below newton_tol * max(1, |rho^n|_inf / dt),
/// or when the Newton correction has shrunk to the round-off level of rho
/// (at very small eps the residual cannot be resolved below its floating
/// point floor). Throws SolverError on failure.
/// `eta` overrides the default eta1 / rho_D^n per face when given.
inline MassStepResult mass_step(const MacGrid& g, const State& state, double dt, const SchemeParams& params,
                                NewtonWorkspace* workspace = nullptr, const EdgeField* eta = nullptr) {
  if (!(dt > 0.0)) throw std::invalid_argument("mass_step: dt must be positive");
  const PressureLaw law(params.gamma);
  NewtonWorkspace local;
  NewtonWorkspace& ws = workspace ? *workspace : local;

  MassStepResult out;
  out.eta = eta ? *eta : select_eta(g, state.rho, params.eta1);
  detail::MassSystem sys{g, law, state.rho, state.velocity, EdgeField(g), dt};
  const double eps2 = params.epsilon * params.epsilon;
  for (int d = 0; d < g.dim(); ++d) {
    const double geo = g.face_measure(d) / g.dual_volume(d);
    for (Index f = 0; f < g.num_faces(d); ++f) sys.coef(d, f) = out.eta(d, f) * dt / eps2 * geo;
  }

  const double scale = std::max(1.0, detail::max_abs(state.rho) / dt);
  const double target = params.newton_tol * scale;
  constexpr double kRoundoff = 16.0 * std::numeric_limits<double>::epsilon();

  CellField rho = state.rho;
  Vector r = sys.residual(rho);
  double rnorm = detail::max_abs(r);
  out.residual_history.push_back(rnorm);
  SparseMatrix jac;
  bool converged = rnorm <= target;
  int it = 0;
  while (!converged) {
    if (it >= params.newton_max_iters) {
      throw SolverError(SolverError::Kind::NonConvergence,
                        "Newton did not converge in " + std::to_string(it) + " iterations (residual " +
                            std::to_string(rnorm) + ")");
    }
    sys.jacobian(rho, ws.triplets, jac);
    ws.solver.factorize(jac);
    const Vector delta = ws.solver.solve(-r);
    ++it;
    if (!delta.allFinite()) throw SolverError(SolverError::Kind::NonConvergence, "Newton correction not finite");
    const double dnorm = detail::max_abs(delta);
    const double rho_norm = detail::max_abs(rho);

    double lambda = 1.0;
    bool accepted = false;
    bool any_positive_trial = false;
    CellField trial(g);
    for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
      bool positive = true;
      for (Index c = 0; c < g.num_cells(); ++c) {
        trial[c] = rho[c] + lambda * delta[c];
        if (!(trial[c] > 0.0)) positive = false;
      }
      if (!positive) continue;
      any_positive_trial = true;
      const Vector rt = sys.residual(trial);
      const double tnorm = detail::max_abs(rt);
      const bool at_roundoff = lambda * dnorm <= kRoundoff * rho_norm;
      if (tnorm < rnorm || tnorm <= target || at_roundoff) {
        rho = trial;
        r = rt;
        rnorm = tnorm;
        accepted = true;
        converged = tnorm <= target || at_roundoff;
        break;
      }
    }
    if (!accepted) {
      if (!any_positive_trial) {
        throw SolverError(SolverError::Kind::NonPositive, "Newton iterates lost positivity");
      }
      throw SolverError(SolverError::Kind::NonConvergence, "Newton line search failed");
    }
    out.residual_history.push_back(rnorm);
  }
  for (double v : rho.values) {
    if (!(v > 0.0)) throw SolverError(SolverError::Kind::NonPositive, "non-positive density after mass step");
  }
  sys.residual(rho, &out.delta_u, &out.fluxes);
  out.rho = std::move(rho);
  out.iterations = it;
  return out;
}

/// Momentum balance on the dual cells, solved explicitly for u^{n+1}:
///   (rho_D^{n+1} u^{n+1} - rho_D^n u^n)/dt + 1/|D| sum_eps F_eps u_up + 1/eps^2 (grad p^{n+1}) = 0.
inline EdgeField momentum_step(const MacGrid& g, const CellField& rho_np1, const State& state_n,
                               const EdgeField& fluxes, double dt, const SchemeParams& params) {
  const PressureLaw law(params.gamma);
  const EdgeField rho_d_np1 = dual_average(g, rho_np1);
  const EdgeField rho_d_n = dual_average(g, state_n.rho);
  const EdgeField grad_p = pressure_gradient(g, law, rho_np1);
  const double inv_eps2 = 1.0 / (params.epsilon * params.epsilon);
  const EdgeField& u = state_n.velocity;
  EdgeField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    const auto dual = dual_momentum_fluxes(g, fluxes, d);
    const double inv_dual = 1.0 / g.dual_volume(d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (g.is_external(d, f)) continue;
      double conv = 0.0;
      for (const DualFace& e : dual[static_cast<std::size_t>(f)]) {
        if (e.flux == 0.0) continue;
        conv += e.flux * upwind_edge_value(u(d, f), u(d, e.neighbour), e.flux);
      }
      out(d, f) = (rho_d_n(d, f) * u(d, f) - dt * inv_dual * conv - dt * inv_eps2 * grad_p(d, f)) / rho_d_np1(d, f);
    }
  }
  return out;
}

/// Non-conservative form of the same update, valid when the dual mass
/// balance holds:
///   (u^{n+1} - u^n)/dt + 1/|D| sum_eps F_eps^- (u_{sigma'} - u_sigma)/rho_D^{n+1}
///     + grad p^{n+1} / (eps^2 rho_D^{n+1}) = 0.
inline EdgeField velocity_update(const MacGrid& g, const CellField& rho_np1, const EdgeField& u,
                                 const EdgeField& fluxes, double dt, const SchemeParams& params) {
  const PressureLaw law(params.gamma);
  const EdgeField rho_d_np1 = dual_average(g, rho_np1);
  const EdgeField grad_p = pressure_gradient(g, law, rho_np1);
  const double inv_eps2 = 1.0 / (params.epsilon * params.epsilon);
  EdgeField out(g);
  for (int d = 0; d < g.dim(); ++d) {
    const auto dual = dual_momentum_fluxes(g, fluxes, d);
    const double inv_dual = 1.0 / g.dual_volume(d);
    for (Index f = 0; f < g.num_faces(d); ++f) {
      if (g.is_external(d, f)) continue;
      double conv = 0.0;
      for (const DualFace& e : dual[static_cast<std::size_t>(f)]) {
        const double fm = negative_part(e.flux);
        if (fm == 0.0) continue;
        conv += fm * (u(d, e.neighbour) - u(d, f));
      }
      out(d, f) = u(d, f) - dt * (inv_dual * conv + inv_eps2 * grad_p(d, f)) / rho_d_np1(d, f);
    }
  }
  return out;
}

/// Largest dt <= dt_max satisfying, on every interior face sigma = K|L,
///   dt max(|dK|/|K|, |dL|/|L|) (|u_sigma| + sqrt(eta/eps^2 |p_L - p_K|)) <= cfl_safety * min(1, mu/3),
/// mu = min(rho_K, rho_L) / max(rho_K, rho_L), all quantities at time level n
/// (if `rho_np1` is given, the max in mu uses it instead, as in the implicit form).
inline double compute_dt(const MacGrid& g, const State& state_n, const SchemeParams& params,
                         const CellField* rho_np1 = nullptr) {
  const PressureLaw law(params.gamma);
  const EdgeField eta = select_eta(g, state_n.rho, params.eta1);
  const double inv_eps2 = 1.0 / (params.epsilon * params.epsilon);
  const double geo = g.perimeter() / g.cell_volume();
  double dt = params.dt_max;
  for (int d = 0; d < g.dim(); ++d) {
    for (Index f = 0; f < g.num_faces(d); ++f) {
      const Index k = g.lower_cell(d, f);
      const Index l = g.upper_cell(d, f);
      if (k == kNoCell || l == kNoCell) continue;
      const double rk = state_n.rho[k];
      const double rl = state_n.rho[l];
      const double rmax = rho_np1 ? std::max((*rho_np1)[k], (*rho_np1)[l]) : std::max(rk, rl);
      const double mu = std::min(rk, rl) / rmax;
      const double speed =
          std::abs(state_n.velocity(d, f)) + std::sqrt(eta(d, f) * inv_eps2 * std::abs(law.difference(rk, rl)));
      if (speed == 0.0) continue;
      dt = std::min(dt, params.cfl_safety * std::min(1.0, mu / 3.0) / (geo * speed));
    }
  }
  return dt;
}

/// Advective Courant number max_sigma |u_sigma| dt / h.
inline double advective_courant(const MacGrid& g, const EdgeField& u, double dt) {
  double c = 0.0;
  for (int d = 0; d < g.dim(); ++d) {
    for (double v : u.comp[d]) c = std::max(c, std::abs(v) * dt / g.h(d));
  }
  return c;
}

/// Time stepper for one grid; keeps the Newton factorisation pattern between steps.
class SemiImplicitScheme {
 public:
  SemiImplicitScheme(MacGrid grid, SchemeParams params) : grid_(std::move(grid)), params_(params) {
    params_.validate();
  }

  const MacGrid& grid() const { return grid_; }
  const SchemeParams& params() const { return params_; }

  /// Advances one step. dt comes from compute_dt, further capped by
  /// `dt_limit` (e.g. the time left to an output instant). On a solver
  /// failure dt is halved and the step retried, at most max_dt_halvings times.
  std::pair<State, StepReport> step(const State& s, double dt_limit = std::numeric_limits<double>::infinity()) {
    StepReport rep;
    double dt = std::min(compute_dt(grid_, s, params_), dt_limit);
    if (!(dt > 0.0)) throw std::invalid_argument("step: non-positive time step");
    std::optional<MassStepResult> mass;
    for (int attempt = 0;; ++attempt) {
      try {
        mass = mass_step(grid_, s, dt, params_, &workspace_);
        break;
      } catch (const SolverError&) {
        if (attempt >= params_.max_dt_halvings) throw;
        dt *= 0.5;
        ++rep.dt_halvings;
      }
    }
    State next;
    next.velocity = momentum_step(grid_, mass->rho, s, mass->fluxes, dt, params_);
    next.rho = mass->rho;
    next.time = s.time + dt;
    next.step = s.step + 1;

    rep.dt = dt;
    rep.newton_iterations = mass->iterations;
    rep.residual_history = mass->residual_history;
    rep.eta_min = std::numeric_limits<double>::infinity();
    rep.eta_max = 0.0;
    for (int d = 0; d < grid_.dim(); ++d) {
      for (Index f = 0; f < grid_.num_faces(d); ++f) {
        if (grid_.is_external(d, f)) continue;
        rep.eta_min = std::min(rep.eta_min, mass->eta(d, f));
        rep.eta_max = std::max(rep.eta_max, mass->eta(d, f));
      }
    }
    rep.max_courant = advective_courant(grid_, s.velocity, dt);
    rep.entropy_before = entropy_total(grid_, s, params_.epsilon, params_.gamma);
    rep.entropy_after = entropy_total(grid_, next, params_.epsilon, params_.gamma);
    rep.entropy_increased =
        rep.entropy_after - rep.entropy_before > kEntropySlack * std::max(std::abs(rep.entropy_before), 1e-300);
    rep.audit = condition_audit(grid_, s.rho, next.rho, mass->eta, mass->fluxes, dt).counts();
    last_ = std::move(mass);
    return {std::move(next), std::move(rep)};
  }

  /// Mass update of the most recent accepted step, if any.
  const std::optional<MassStepResult>& last_mass() const { return last_; }

 private:
  MacGrid grid_;
  SchemeParams params_;
  NewtonWorkspace workspace_;
  std::optional<MassStepResult> last_;
};

/// Free-function form of one step (fresh workspace each call).
inline std::pair<State, StepReport> step(const MacGrid& g, const State& s, const SchemeParams& params,
                                         double dt_limit = std::numeric_limits<double>::infinity()) {
  SemiImplicitScheme scheme(g, params);
  return scheme.step(s, dt_limit);
}

/// The eps -> 0 limit of the scheme (rho == 1):
///   div_M(u^n - eta dt grad pi^{n+1}) = 0,
///   (u^{n+1} - u^n)/dt + 1/|D| sum_eps F_eps(1, u^n - du) u_up + grad pi^{n+1} = 0.
/// The Poisson operator div_M grad_E is factorised once; pi is mean-free.
class IncompressibleScheme {
 public:
  struct Result {
    EdgeField velocity;
    CellField pi;
    double dt = 0.0;
    double poisson_residual = 0.0;
  };

  IncompressibleScheme(MacGrid grid, double eta, double cfl_safety = 0.9)
      : grid_(std::move(grid)), eta_(eta), cfl_(cfl_safety) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    assemble_poisson();
  }

  const MacGrid& grid() const { return grid_; }
  double eta() const { return eta_; }

  /// Sufficient time step of the compressible scheme in the limit rho == 1,
  /// with the pressure jump measured by pi.
  double compute_dt(const EdgeField& u, const CellField& pi, double dt_max) const {
    const double geo = grid_.perimeter() / grid_.cell_volume();
    double dt = dt_max;
    for (int d = 0; d < grid_.dim(); ++d) {
      for (Index f = 0; f < grid_.num_faces(d); ++f) {
        const Index k = grid_.lower_cell(d, f);
        const Index l = grid_.upper_cell(d, f);
        if (k == kNoCell || l == kNoCell) continue;
        const double speed = std::abs(u(d, f)) + std::sqrt(eta_ * std::abs(pi[l] - pi[k]));
        if (speed == 0.0) continue;
        dt = std::min(dt, cfl_ * (1.0 / 3.0) / (geo * speed));
      }
    }
    return dt;
  }

  /// Solves div_M grad_E pi = rhs for mean-free pi. Returns the relative residual.
  double solve_poisson(const CellField& rhs, CellField& pi) const {
    const Index n = grid_.num_cells();
    Vector b(n - 1);
    for (Index c = 1; c < n; ++c) b[c - 1] = -rhs[c];
    const Vector x = solver_.solve(b);
    pi = CellField(grid_);
    for (Index c = 1; c < n; ++c) pi[c] = x[c - 1];
    double mean = 0.0;
    for (double v : pi.values) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : pi.values) v -= mean;
    const CellField lap = discrete_divergence(grid_, discrete_gradient(grid_, pi));
    double rnum = 0.0, rden = 0.0;
    for (Index c = 0; c < n; ++c) {
      rnum = std::max(rnum, std::abs(lap[c] - rhs[c]));
      rden = std::max(rden, std::abs(rhs[c]));
    }
    return rden > 0.0 ? rnum / rden : rnum;
  }

  Result step(const EdgeField& u, double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("incompressible step: dt must be positive");
    Result res;
    res.dt = dt;
    CellField rhs = discrete_divergence(grid_, u);
    for (double& v : rhs.values) v /= (eta_ * dt);
    res.poisson_residual = solve_poisson(rhs, res.pi);
    EdgeField du = discrete_gradient(grid_, res.pi);
    for (int d = 0; d < grid_.dim(); ++d) {
      for (double& v : du.comp[d]) v *= eta_ * dt;
    }
    const CellField ones(grid_, 1.0);
    const EdgeField fluxes = primal_mass_fluxes(grid_, ones, u, du);
    const EdgeField grad_pi = discrete_gradient(grid_, res.pi);
    res.velocity = EdgeField(grid_);
    for (int d = 0; d < grid_.dim(); ++d) {
      const auto dual = dual_momentum_fluxes(grid_, fluxes, d);
      const double inv_dual = 1.0 / grid_.dual_volume(d);
      for (Index f = 0; f < grid_.num_faces(d); ++f) {
        if (grid_.is_external(d, f)) continue;
        double conv = 0.0;
        for (const DualFace& e : dual[static_cast<std::size_t>(f)]) {
          if (e.flux == 0.0) continue;
          conv += e.flux * upwind_edge_value(u(d, f), u(d, e.neighbour), e.flux);
        }
        res.velocity(d, f) = u(d, f) - dt * inv_dual * conv - dt * grad_pi(d, f);
      }
    }
    return res;
  }

 private:
  /// Negative Laplacian with cell 0 pinned (row and column removed): SPD.
  void assemble_poisson() {
    const Index n = grid_.num_cells();
    std::vector<Triplet> trip;
    const double inv_vol = 1.0 / grid_.cell_volume();
    for (int d = 0; d < grid_.dim(); ++d) {
      const double w = grid_.face_measure(d) * grid_.face_measure(d) / grid_.dual_volume(d) * inv_vol;
      for (Index f = 0; f < grid_.num_faces(d); ++f) {
        const Index k = grid_.lower_cell(d, f);
        const Index l = grid_.upper_cell(d, f);
        if (k == kNoCell || l == kNoCell) continue;
        auto add = [&](Index i, Index j, double v) {
          if (i > 0 && j > 0) trip.emplace_back(int(i - 1), int(j - 1), v);
        };
        add(k, k, w);
        add(l, l, w);
        add(k, l, -w);
        add(l, k, -w);
      }
    }
    SparseMatrix a(n - 1, n - 1);
    a.setFromTriplets(trip.begin(), trip.end());
    solver_.factorize(a);
  }

  MacGrid grid_;
  double eta_;
  double cfl_;
  SparseDirectSolver solver_;
};

/// One step of the limiting scheme with a freshly assembled Poisson operator.
inline IncompressibleScheme::Result incompressible_step(const MacGrid& g, const EdgeField& u, double eta, double dt) {
  return IncompressibleScheme(g, eta).step(u, dt);
}

}  // namespace apmac
