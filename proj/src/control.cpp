#include "fracheat/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fracheat/errors.hpp"
#include "fracheat/rng.hpp"

namespace fracheat {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr double kPgTol = 1e-9;

void apply_constraints(Eigen::MatrixXd& values, double bound, int first_free_col) {
  if (std::isfinite(bound)) {
    values = values.cwiseMax(bound);
  }
  for (int k = 0; k < std::min<int>(first_free_col, static_cast<int>(values.cols())); ++k) {
    values.col(k).setZero();
  }
}

class TrackingModel {
 public:
  explicit TrackingModel(const ControlProblem& p)
      : p_(p),
        stepper_(*p.assembly, *p.mesh, *p.params, p.grid, p.penalty_n, p.lumped_mass) {
    target_full_ = stepper_.embed_interior(p.target_int);
  }

  struct Eval {
    Trajectory traj;
    double cost = 0.0;
  };

  Eval evaluate(const ControlGrid& g) const {
    Eval e;
    e.traj = stepper_.forward(p_.u0_int, g);
    const Eigen::VectorXd misfit =
        stepper_.mask_interior(e.traj.snapshots.back() - target_full_);
    e.cost = misfit.dot(stepper_.mass_apply(misfit));
    return e;
  }

  // Adjoint gradient for the evaluated control: column k >= 1 carries
  // dt n (R psi^k) at the control nodes, column 0 the derivative through the
  // exterior extension of the initial state.
  Eigen::MatrixXd gradient(const Eval& e) const {
    const Eigen::VectorXd psi_T_full =
        2.0 * stepper_.mask_interior(e.traj.snapshots.back() - target_full_);
    Eigen::VectorXd psi_T_int(
        static_cast<Eigen::Index>(p_.mesh->interior_ids.size()));
    for (std::size_t r = 0; r < p_.mesh->interior_ids.size(); ++r) {
      psi_T_int(static_cast<Eigen::Index>(r)) = psi_T_full(p_.mesh->interior_ids[r]);
    }
    const Trajectory adj = stepper_.adjoint(psi_T_int);

    const auto n_ctrl = static_cast<Eigen::Index>(p_.mesh->control_ids.size());
    Eigen::MatrixXd grad(n_ctrl, p_.grid.M + 1);
    const Eigen::VectorXd m_psi1 = stepper_.mass_apply(adj.snapshots[0]);
    for (Eigen::Index c = 0; c < n_ctrl; ++c) {
      grad(c, 0) = m_psi1(p_.mesh->control_ids[static_cast<std::size_t>(c)]);
    }
    for (int k = 1; k <= p_.grid.M; ++k) {
      grad.col(k) = p_.grid.dt *
                    stepper_.control_extraction(adj.snapshots[static_cast<std::size_t>(k) - 1]);
    }
    for (int k = 0; k < p_.first_free_col; ++k) grad.col(k).setZero();
    return grad;
  }

  const RobinStepper& stepper() const { return stepper_; }

 private:
  const ControlProblem& p_;
  RobinStepper stepper_;
  Eigen::VectorXd target_full_;
};

void check_admissible(const ControlProblem& p, const ControlGrid& g) {
  g.validate(*p.mesh, p.grid);
  if (std::isfinite(p.bound) && g.values.size() > 0 && g.values.minCoeff() < p.bound) {
    throw std::domain_error("control violates the lower bound");
  }
}

}  // namespace

void ControlProblem::validate() const {
  if (!assembly || !mesh || !params) {
    throw config_error("ControlProblem: assembly/mesh/params must be set");
  }
  params->require_controllable_order();
  const auto n_int = static_cast<Eigen::Index>(mesh->interior_ids.size());
  if (u0_int.size() != n_int || target_int.size() != n_int) {
    throw config_error("ControlProblem: state vectors must live on the interior nodes");
  }
  if (!(grid.T > 0.0)) throw config_error("ControlProblem: horizon must be positive");
  if (!(eps > 0.0)) throw config_error("ControlProblem: feasibility tolerance must be positive");
  if (bound > 0.0) throw config_error("ControlProblem: lower bound must be <= 0");
  if (max_iter < 1) throw config_error("ControlProblem: iteration budget must be >= 1");
  if (first_free_col < 0 || first_free_col > grid.M + 1) {
    throw config_error("ControlProblem: control support out of range");
  }
}

double tracking_cost(const ControlProblem& problem, const ControlGrid& g) {
  problem.validate();
  check_admissible(problem, g);
  TrackingModel model(problem);
  return model.evaluate(g).cost;
}

Eigen::MatrixXd tracking_gradient(const ControlProblem& problem, const ControlGrid& g) {
  problem.validate();
  check_admissible(problem, g);
  TrackingModel model(problem);
  return model.gradient(model.evaluate(g));
}

SolveResult projected_gradient_solve(const ControlProblem& problem,
                                     const ControlGrid* warm_start) {
  problem.validate();
  TrackingModel model(problem);

  ControlGrid g;
  if (warm_start) {
    g = *warm_start;
    if (g.values.rows() != static_cast<Eigen::Index>(problem.mesh->control_ids.size()) ||
        g.values.cols() != problem.grid.M + 1) {
      throw config_error("projected_gradient_solve: warm start has wrong dimensions");
    }
  } else {
    g = ControlGrid::zero(*problem.mesh, problem.grid);
  }
  apply_constraints(g.values, problem.bound, problem.first_free_col);
  g.nonneg = problem.bound >= 0.0;

  TrackingModel::Eval eval = model.evaluate(g);
  double cost = eval.cost;

  SolveResult result;
  Eigen::MatrixXd grad, prev_grad;
  Eigen::MatrixXd prev_values;
  double step = 0.0;
  double pgnorm = std::numeric_limits<double>::infinity();

  int it = 0;
  while (it < problem.max_iter) {
    if (std::sqrt(cost) <= problem.eps) break;

    grad = model.gradient(eval);

    Eigen::MatrixXd probe = g.values - grad;
    apply_constraints(probe, problem.bound, problem.first_free_col);
    pgnorm = (g.values - probe).norm();
    if (pgnorm <= kPgTol) break;

    // Barzilai-Borwein initial step, Cauchy-like scale on the first pass.
    double t;
    if (it == 0) {
      const double g2 = grad.squaredNorm();
      t = g2 > 0.0 ? cost / g2 : 1.0;
    } else {
      const Eigen::MatrixXd s = g.values - prev_values;
      const Eigen::MatrixXd y = grad - prev_grad;
      const double sy = (s.array() * y.array()).sum();
      t = sy > 1e-300 ? s.squaredNorm() / sy : step * 2.0;
    }
    t = std::clamp(t, 1e-14, 1e14);

    prev_values = g.values;
    prev_grad = grad;

    // Armijo backtracking along the projection arc.
    bool accepted = false;
    ControlGrid trial = g;
    TrackingModel::Eval trial_eval;
    for (int ls = 0; ls < 60; ++ls) {
      trial.values = g.values - t * grad;
      apply_constraints(trial.values, problem.bound, problem.first_free_col);
      trial_eval = model.evaluate(trial);
      const double decrease = (grad.array() * (trial.values - g.values).array()).sum();
      if (trial_eval.cost <= cost + kArmijoC * decrease) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++it;
    if (!accepted) break;  // no admissible decrease at machine-step scale

    step = t;
    g.values = trial.values;
    eval = std::move(trial_eval);
    cost = eval.cost;
  }

  result.g = g;
  result.g.nonneg = problem.bound >= 0.0;
  result.misfit = std::sqrt(cost);
  result.iterations = it;
  result.converged = result.misfit <= problem.eps;
  result.projected_grad = pgnorm;
  return result;
}

MinTimeResult minimal_time_search(const ProblemFactory& factory, double t_lo,
                                  double t_hi, double tol) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || !(tol > 0.0)) {
    throw config_error("minimal_time_search: need 0 < t_lo < t_hi and tol > 0");
  }
  MinTimeResult out;

  auto probe = [&](double T, const ControlGrid* warm) {
    ControlProblem p = factory(T);
    SolveResult r = projected_gradient_solve(p, warm);
    out.trace.push_back({T, r.misfit, r.converged});
    return r;
  };

  SolveResult r_lo = probe(t_lo, nullptr);
  if (r_lo.converged) {
    throw bracket_error("minimal_time_search: already feasible at t_lo");
  }
  SolveResult r_hi = probe(t_hi, nullptr);
  if (!r_hi.converged) {
    throw bracket_error("minimal_time_search: infeasible at t_hi");
  }

  // Probes share the step count, so the piecewise-constant warm start
  // transfers between horizons column by column (time rescaling).
  SolveResult best = r_hi;
  while (t_hi - t_lo > tol) {
    const double tm = 0.5 * (t_lo + t_hi);
    SolveResult r = probe(tm, &best.g);
    if (r.converged) {
      t_hi = tm;
      best = r;
    } else {
      t_lo = tm;
    }
  }

  out.t_min = t_hi;
  out.t_lo = t_lo;
  out.t_hi = t_hi;
  out.best = std::move(best);
  return out;
}

DelayedControlResult delayed_control_construction(ControlProblem problem, double t0) {
  if (!(t0 > 0.0) || !(t0 < problem.grid.T)) {
    throw config_error("delayed_control_construction: need 0 < t0 < T");
  }
  int first_free = 0;
  while (first_free <= problem.grid.M &&
         problem.grid.times[static_cast<std::size_t>(first_free)] <= t0) {
    ++first_free;
  }
  problem.first_free_col = first_free;
  SolveResult r = projected_gradient_solve(problem, nullptr);
  DelayedControlResult out;
  out.sup_norm = r.g.values.size() > 0 ? r.g.values.cwiseAbs().maxCoeff() : 0.0;
  out.h = r.g;
  out.solve = std::move(r);
  return out;
}

Diagnostics observability_diagnostics(const EigenBasis& basis, double T,
                                      int ensemble_size, std::uint64_t seed) {
  if (basis.K < 10) {
    throw config_error("observability_diagnostics: need at least 10 modes");
  }
  if (ensemble_size < 50) {
    throw config_error("observability_diagnostics: ensemble size must be >= 50");
  }
  if (!(T > 0.0)) {
    throw config_error("observability_diagnostics: horizon must be positive");
  }

  Diagnostics d;
  d.eta = std::numeric_limits<double>::infinity();
  for (int k = 0; k < basis.K; ++k) {
    d.eta = std::min(d.eta, basis.window_l1(basis.normal_traces.col(k)));
  }
  d.min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < basis.K; ++k) {
    d.min_gap = std::min(d.min_gap, basis.lambdas(k + 1) - basis.lambdas(k));
  }

  const int nt = 4000;
  const double dt = T / nt;
  // decay(n, i) = exp(-lambda_n t_i) on the fine grid.
  Eigen::MatrixXd decay(basis.K, nt + 1);
  for (int i = 0; i <= nt; ++i) {
    decay.col(i) = (-basis.lambdas * (dt * i)).array().exp().matrix();
  }

  // Ingham quotient: sum |c_n| e^{-lambda_n T} over the L1(0,T) norm of the
  // exponential sum.
  {
    SplitMix64 rng(seed ^ 0x494e4748414dull);
    double best = 0.0;
    Eigen::VectorXd c(basis.K);
    for (int e = 0; e < ensemble_size; ++e) {
      for (int n = 0; n < basis.K; ++n) c(n) = rng.sym();
      const double num = c.cwiseAbs().dot(decay.col(nt));
      const Eigen::VectorXd series = (c.transpose() * decay).transpose().cwiseAbs();
      double den = 0.0;
      for (int i = 0; i <= nt; ++i) {
        den += ((i == 0 || i == nt) ? 0.5 : 1.0) * dt * series(i);
      }
      best = std::max(best, num / den);
    }
    d.ingham_ratio = best;
  }

  // Observability quotient: ||psi(.,0)||^2 over the squared space-time L1
  // norm of the normal trace.
  {
    SplitMix64 rng(seed ^ 0x4f425345525642ull);
    double best = 0.0;
    Eigen::VectorXd a(basis.K);
    for (int e = 0; e < ensemble_size; ++e) {
      for (int n = 0; n < basis.K; ++n) a(n) = rng.sym();
      const double num = (a.array().square() * decay.col(nt).array().square()).sum();
      double den = 0.0;
      for (int i = 0; i <= nt; ++i) {
        // time t_i: decay exponent is T - t_i, i.e. fine column nt - i.
        const Eigen::VectorXd modal = a.cwiseProduct(decay.col(nt - i));
        const double slab = basis.window_l1(basis.normal_traces * modal);
        den += ((i == 0 || i == nt) ? 0.5 : 1.0) * dt * slab;
      }
      best = std::max(best, num / (den * den));
    }
    d.obs_ratio = best;
  }
  return d;
}

void dump_control_csv(const ControlGrid& g, const Mesh1D& mesh, const TimeGrid& grid,
                      const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw numerical_error("dump_control_csv: cannot open " + path);
  std::fprintf(f, "t,x,g\n");
  for (int k = 0; k <= grid.M; ++k) {
    for (std::size_t c = 0; c < mesh.control_ids.size(); ++c) {
      std::fprintf(f, "%.17g,%.17g,%.17g\n", grid.times[static_cast<std::size_t>(k)],
                   mesh.nodes[static_cast<std::size_t>(mesh.control_ids[c])],
                   g.values(static_cast<Eigen::Index>(c), k));
    }
  }
  std::fclose(f);
}

ControlGrid read_control_csv(const Mesh1D& mesh, const TimeGrid& grid,
                             const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("read_control_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,g") {
    throw config_error("read_control_csv: bad header in " + path);
  }
  ControlGrid g = ControlGrid::zero(mesh, grid);
  g.nonneg = false;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double t, x, v;
    char comma;
    if (!(ss >> t >> comma >> x >> comma >> v)) {
      throw config_error("read_control_csv: malformed row: " + line);
    }
    const int k = static_cast<int>(std::lround(t / grid.dt));
    if (k < 0 || k > grid.M || std::abs(grid.times[static_cast<std::size_t>(k)] - t) > 1e-9) {
      throw config_error("read_control_csv: time does not match the grid: " + line);
    }
    Eigen::Index cid = -1;
    for (std::size_t c = 0; c < mesh.control_ids.size(); ++c) {
      if (std::abs(mesh.nodes[static_cast<std::size_t>(mesh.control_ids[c])] - x) < 1e-9) {
        cid = static_cast<Eigen::Index>(c);
        break;
      }
    }
    if (cid < 0) throw config_error("read_control_csv: x is not a control node: " + line);
    g.values(cid, k) = v;
    ++rows;
  }
  if (rows != mesh.control_ids.size() * (static_cast<std::size_t>(grid.M) + 1)) {
    throw config_error("read_control_csv: row count does not cover the control grid");
  }
  g.nonneg = g.values.size() == 0 || g.values.minCoeff() >= 0.0;
  return g;
}

}  // namespace fracheat
