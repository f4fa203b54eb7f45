#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "fracheat/grids.hpp"
#include "fracheat/spectral.hpp"
#include "fracheat/timestepper.hpp"

namespace fracheat {

// Tracking problem: steer u0 to the target terminal state under a nodewise
// lower bound on the exterior control. The misfit norm is L2(-1,1) realized
// as the box-mass norm of the interior-masked terminal difference, which
// makes the adjoint gradient exact.
struct ControlProblem {
  const NonlocalAssembly* assembly = nullptr;
  const Mesh1D* mesh = nullptr;
  const FracParams* params = nullptr;
  TimeGrid grid;
  double penalty_n = 1e9;
  bool lumped_mass = false;

  Eigen::VectorXd u0_int;      // initial state at the interior nodes
  Eigen::VectorXd target_int;  // target terminal state at the interior nodes
  ControlGrid g_hat;           // exterior datum of the reference trajectory

  double bound = 0.0;  // admissible controls satisfy g >= bound (<= 0)
  double eps = 1e-3;   // feasibility tolerance on the terminal misfit
  int max_iter = 2000;
  int first_free_col = 0;  // columns below this stay identically zero

  void validate() const;
};

double tracking_cost(const ControlProblem& problem, const ControlGrid& g);
// Exact discrete gradient of tracking_cost over control nodes x time levels,
// via one adjoint march from psi_T = 2 (u(.,T) - target) masked to the
// interior nodes.
Eigen::MatrixXd tracking_gradient(const ControlProblem& problem, const ControlGrid& g);

struct SolveResult {
  ControlGrid g;
  double misfit = 0.0;
  int iterations = 0;
  bool converged = false;       // misfit <= eps
  double projected_grad = 0.0;  // norm of the projected gradient at exit
};

// Projected gradient descent with Armijo backtracking (c = 1e-4, halving) and
// a Barzilai-Borwein initial step. The returned control satisfies the bound
// exactly; budget exhaustion is flagged, not thrown.
SolveResult projected_gradient_solve(const ControlProblem& problem,
                                     const ControlGrid* warm_start = nullptr);

struct FeasibilityProbe {
  double T = 0.0;
  double misfit = 0.0;
  bool feasible = false;
};

struct MinTimeResult {
  double t_min = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::vector<FeasibilityProbe> trace;
  SolveResult best;  // solve at the smallest feasible probe
};

using ProblemFactory = std::function<ControlProblem(double horizon)>;

// Bisection over the horizon with warm-started inner solves. Requires the
// problem to be infeasible at t_lo and feasible at t_hi (bracket_error
// otherwise); stops when t_hi - t_lo <= tol.
MinTimeResult minimal_time_search(const ProblemFactory& factory, double t_lo,
                                  double t_hi, double tol);

struct DelayedControlResult {
  ControlGrid h;
  double sup_norm = 0.0;
  SolveResult solve;
};

// Shifted-problem control supported on (t0, T] only (zero before), with the
// relaxed bound already encoded in `problem.bound`. Returns the control and
// its sup norm.
DelayedControlResult delayed_control_construction(ControlProblem problem, double t0);

struct Diagnostics {
  double eta = 0.0;           // min_k of the window L1 norm of N_s phi_k
  double ingham_ratio = 0.0;  // max over the ensemble of the Ingham quotient
  double obs_ratio = 0.0;     // max over the ensemble of the observability quotient
  double min_gap = 0.0;       // min_k (lambda_{k+1} - lambda_k)
};

// Seeded random-ensemble surrogates for the observability machinery; the same
// seed reproduces the same ensemble at any horizon.
Diagnostics observability_diagnostics(const EigenBasis& basis, double T,
                                      int ensemble_size, std::uint64_t seed);

void dump_control_csv(const ControlGrid& g, const Mesh1D& mesh, const TimeGrid& grid,
                      const std::string& path);  // t,x,g
ControlGrid read_control_csv(const Mesh1D& mesh, const TimeGrid& grid,
                             const std::string& path);

}  // namespace fracheat
