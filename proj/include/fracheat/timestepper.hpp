#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fracheat/assembly.hpp"
#include "fracheat/grids.hpp"
#include "fracheat/spectral.hpp"

namespace fracheat {

using SourceFn = std::function<double(double x, double t)>;

struct Trajectory {
  std::vector<Eigen::VectorXd> snapshots;  // M+1 nodal vectors on all box nodes
};

// Backward-Euler march for the Robin-penalized exterior problem:
//   (M/dt + A + n R) u^k = (M/dt) u^{k-1} + n R ghat^k + b^k,
// R the exterior mass (kappa = 1), ghat^k the control injected at the control
// nodes and zero at the remaining exterior nodes. The factorization of the
// step matrix is computed once and shared by forward and adjoint marches.
class RobinStepper {
 public:
  RobinStepper(const NonlocalAssembly& assembly, const Mesh1D& mesh,
               const FracParams& params, const TimeGrid& grid, double penalty_n,
               bool lumped_mass = false);

  Trajectory forward(const Eigen::VectorXd& u0_int, const ControlGrid& g,
                     const SourceFn& source = nullptr) const;

  // Exact discrete adjoint of the forward step map, marched from t = T with
  // zero exterior data. snapshots[k-1] pairs with control column k;
  // snapshots[M] holds psi_T. For zero sources the identity
  //   <u^M, M psi_T> - <u^0, M psi^1> = dt sum_k (n R ghat^k + b^k)^T psi^k
  // holds to solver roundoff.
  Trajectory adjoint(const Eigen::VectorXd& psi_T_int) const;

  const TimeGrid& grid() const { return grid_; }
  const Mesh1D& mesh() const { return *mesh_; }
  double penalty() const { return penalty_n_; }

  Eigen::VectorXd embed_interior(const Eigen::VectorXd& u_int) const;
  Eigen::VectorXd mask_interior(const Eigen::VectorXd& full) const;
  Eigen::VectorXd mass_apply(const Eigen::VectorXd& full) const;
  // n * R * (injection of ctrl values at the control nodes).
  Eigen::VectorXd control_injection(const Eigen::VectorXd& ctrl) const;
  // Rows of n R psi at the control nodes (transpose of the injection).
  Eigen::VectorXd control_extraction(const Eigen::VectorXd& full) const;

 private:
  const Mesh1D* mesh_;
  TimeGrid grid_;
  double penalty_n_;
  bool lumped_;
  Eigen::MatrixXd mass_;        // box mass (consistent or lumped)
  Eigen::MatrixXd robin_ctrl_;  // columns of R at the control nodes
  Eigen::MatrixXd robin_ctrl_rows_;
  Eigen::LLT<Eigen::MatrixXd> step_;
};

// Free wrappers matching the operation contracts (one factorization per call).
Trajectory robin_forward(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                         const FracParams& params, const TimeGrid& grid,
                         double penalty_n, const Eigen::VectorXd& u0_int,
                         const ControlGrid& g, const SourceFn& source = nullptr,
                         bool lumped_mass = false);
Trajectory robin_adjoint(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                         const FracParams& params, const TimeGrid& grid,
                         double penalty_n, const Eigen::VectorXd& psi_T_int,
                         bool lumped_mass = false);

// L2(-1,1) norm of the interior-masked interpolant of a full nodal vector.
double interior_l2_norm(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                        const Eigen::VectorXd& full);

struct ComparisonResult {
  bool ordered = false;
  double worst_violation = 0.0;  // min over nodes/steps of (upper - lower)
};
ComparisonResult comparison_check(const Trajectory& upper, const Trajectory& lower,
                                  double tol = 1e-10);

struct ConvergenceStudy {
  std::vector<double> penalties;
  std::vector<double> errors;  // L2((0,T); L2(-1,1)) vs the spectral reference
  double slope = 0.0;          // least-squares slope of log(err) vs log(n)
};
ConvergenceStudy robin_convergence_study(const NonlocalAssembly& assembly,
                                         const Mesh1D& mesh, const FracParams& params,
                                         const TimeGrid& grid,
                                         const std::vector<double>& penalties,
                                         const Eigen::VectorXd& u0_int,
                                         const ControlGrid& g,
                                         const EigenBasis& reference);

// CSV `t,x,u`, one row per (t_k, x_i).
void dump_trajectory_csv(const Trajectory& traj, const Mesh1D& mesh,
                         const TimeGrid& grid, const std::string& path);

}  // namespace fracheat
