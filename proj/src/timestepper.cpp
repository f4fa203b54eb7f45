#include "fracheat/timestepper.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fracheat/errors.hpp"

namespace fracheat {

RobinStepper::RobinStepper(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                           const FracParams& /*params*/, const TimeGrid& grid,
                           double penalty_n, bool lumped_mass)
    : mesh_(&mesh), grid_(grid), penalty_n_(penalty_n), lumped_(lumped_mass) {
  if (!(penalty_n > 0.0)) {
    throw config_error("RobinStepper: penalty must be positive");
  }
  const int nn = mesh.num_nodes();
  if (assembly.stiffness.rows() != nn) {
    throw config_error("RobinStepper: assembly does not match mesh");
  }

  Eigen::MatrixXd robin = region_mass(mesh, -FracParams::box_half, -FracParams::domain_half) +
                          region_mass(mesh, FracParams::domain_half, FracParams::box_half);
  if (lumped_) {
    const Eigen::VectorXd d = robin.rowwise().sum();
    robin.setZero();
    robin.diagonal() = d;
    mass_ = Eigen::MatrixXd::Zero(nn, nn);
    mass_.diagonal() = assembly.mass_lumped;
  } else {
    mass_ = assembly.mass;
  }

  const auto n_ctrl = static_cast<Eigen::Index>(mesh.control_ids.size());
  robin_ctrl_.resize(nn, n_ctrl);
  robin_ctrl_rows_.resize(n_ctrl, nn);
  for (Eigen::Index c = 0; c < n_ctrl; ++c) {
    robin_ctrl_.col(c) = robin.col(mesh.control_ids[static_cast<std::size_t>(c)]);
    robin_ctrl_rows_.row(c) = robin.row(mesh.control_ids[static_cast<std::size_t>(c)]);
  }

  Eigen::MatrixXd step = mass_ / grid_.dt + assembly.stiffness + penalty_n_ * robin;
  step_.compute(step);
  if (step_.info() != Eigen::Success) {
    throw numerical_error("RobinStepper: step matrix factorization failed");
  }
}

Eigen::VectorXd RobinStepper::embed_interior(const Eigen::VectorXd& u_int) const {
  if (u_int.size() != static_cast<Eigen::Index>(mesh_->interior_ids.size())) {
    throw config_error("RobinStepper: interior vector has wrong length");
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh_->num_nodes());
  for (std::size_t k = 0; k < mesh_->interior_ids.size(); ++k) {
    full(mesh_->interior_ids[k]) = u_int(static_cast<Eigen::Index>(k));
  }
  return full;
}

Eigen::VectorXd RobinStepper::mask_interior(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(full.size());
  for (int id : mesh_->interior_ids) out(id) = full(id);
  return out;
}

Eigen::VectorXd RobinStepper::mass_apply(const Eigen::VectorXd& full) const {
  return mass_ * full;
}

Eigen::VectorXd RobinStepper::control_injection(const Eigen::VectorXd& ctrl) const {
  return penalty_n_ * (robin_ctrl_ * ctrl);
}

Eigen::VectorXd RobinStepper::control_extraction(const Eigen::VectorXd& full) const {
  return penalty_n_ * (robin_ctrl_rows_ * full);
}

Trajectory RobinStepper::forward(const Eigen::VectorXd& u0_int, const ControlGrid& g,
                                 const SourceFn& source) const {
  g.validate(*mesh_, grid_);
  Trajectory traj;
  traj.snapshots.resize(static_cast<std::size_t>(grid_.M) + 1);

  Eigen::VectorXd u = embed_interior(u0_int);
  for (std::size_t c = 0; c < mesh_->control_ids.size(); ++c) {
    u(mesh_->control_ids[c]) = g.values(static_cast<Eigen::Index>(c), 0);
  }
  traj.snapshots[0] = u;

  for (int k = 1; k <= grid_.M; ++k) {
    Eigen::VectorXd rhs = mass_ * u / grid_.dt;
    rhs += control_injection(g.values.col(k));
    if (source) {
      rhs += load_vector(*mesh_, -FracParams::domain_half, FracParams::domain_half,
                         source, grid_.times[static_cast<std::size_t>(k)]);
    }
    u = step_.solve(rhs);
    traj.snapshots[static_cast<std::size_t>(k)] = u;
  }
  return traj;
}

Trajectory RobinStepper::adjoint(const Eigen::VectorXd& psi_T_int) const {
  Trajectory traj;
  traj.snapshots.resize(static_cast<std::size_t>(grid_.M) + 1);
  Eigen::VectorXd cur = embed_interior(psi_T_int);
  traj.snapshots[static_cast<std::size_t>(grid_.M)] = cur;
  for (int k = grid_.M; k >= 1; --k) {
    cur = step_.solve(mass_ * cur / grid_.dt);
    traj.snapshots[static_cast<std::size_t>(k) - 1] = cur;
  }
  return traj;
}

Trajectory robin_forward(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                         const FracParams& params, const TimeGrid& grid,
                         double penalty_n, const Eigen::VectorXd& u0_int,
                         const ControlGrid& g, const SourceFn& source,
                         bool lumped_mass) {
  RobinStepper stepper(assembly, mesh, params, grid, penalty_n, lumped_mass);
  return stepper.forward(u0_int, g, source);
}

Trajectory robin_adjoint(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                         const FracParams& params, const TimeGrid& grid,
                         double penalty_n, const Eigen::VectorXd& psi_T_int,
                         bool lumped_mass) {
  RobinStepper stepper(assembly, mesh, params, grid, penalty_n, lumped_mass);
  return stepper.adjoint(psi_T_int);
}

double interior_l2_norm(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                        const Eigen::VectorXd& full) {
  Eigen::VectorXd masked = Eigen::VectorXd::Zero(full.size());
  for (int id : mesh.interior_ids) masked(id) = full(id);
  return std::sqrt(masked.dot(assembly.mass * masked));
}

ComparisonResult comparison_check(const Trajectory& upper, const Trajectory& lower,
                                  double tol) {
  if (upper.snapshots.size() != lower.snapshots.size()) {
    throw config_error("comparison_check: trajectories have different step counts");
  }
  ComparisonResult result;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < upper.snapshots.size(); ++k) {
    worst = std::min(worst, (upper.snapshots[k] - lower.snapshots[k]).minCoeff());
  }
  result.worst_violation = worst;
  result.ordered = worst >= -tol;
  return result;
}

ConvergenceStudy robin_convergence_study(const NonlocalAssembly& assembly,
                                         const Mesh1D& mesh, const FracParams& params,
                                         const TimeGrid& grid,
                                         const std::vector<double>& penalties,
                                         const Eigen::VectorXd& u0_int,
                                         const ControlGrid& g,
                                         const EigenBasis& reference) {
  if (penalties.size() < 3) {
    throw config_error("robin_convergence_study: need at least 3 penalties");
  }
  for (std::size_t i = 1; i < penalties.size(); ++i) {
    if (!(penalties[i] > penalties[i - 1])) {
      throw config_error("robin_convergence_study: penalties must be ascending");
    }
  }

  // Spectral reference snapshots, exact in time for the piecewise-constant
  // control, reconstructed on the interior nodes.
  std::vector<Eigen::VectorXd> ref(static_cast<std::size_t>(grid.M) + 1);
  for (int k = 0; k <= grid.M; ++k) {
    const SpectralState st =
        forward_series(reference, u0_int, g, grid, grid.times[static_cast<std::size_t>(k)]);
    ref[static_cast<std::size_t>(k)] = reference.nodal_of(st.coeffs);
  }

  ConvergenceStudy study;
  study.penalties = penalties;
  for (double n : penalties) {
    RobinStepper stepper(assembly, mesh, params, grid, n, false);
    const Trajectory traj = stepper.forward(u0_int, g);
    double acc = 0.0;
    for (int k = 0; k <= grid.M; ++k) {
      Eigen::VectorXd diff = traj.snapshots[static_cast<std::size_t>(k)];
      for (std::size_t r = 0; r < mesh.interior_ids.size(); ++r) {
        diff(mesh.interior_ids[r]) -= ref[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(r));
      }
      const double nk = interior_l2_norm(assembly, mesh, diff);
      const double w = (k == 0 || k == grid.M) ? 0.5 : 1.0;
      acc += w * grid.dt * nk * nk;
    }
    study.errors.push_back(std::sqrt(acc));
  }

  // Least-squares slope of log(error) against log(penalty).
  const auto m = static_cast<double>(penalties.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < penalties.size(); ++i) {
    const double x = std::log(penalties[i]);
    const double y = std::log(study.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  study.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return study;
}

void dump_trajectory_csv(const Trajectory& traj, const Mesh1D& mesh,
                         const TimeGrid& grid, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw numerical_error("dump_trajectory_csv: cannot open " + path);
  std::fprintf(f, "t,x,u\n");
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      std::fprintf(f, "%.17g,%.17g,%.17g\n", grid.times[k],
                   mesh.nodes[static_cast<std::size_t>(i)], traj.snapshots[k](i));
    }
  }
  std::fclose(f);
}

}  // namespace fracheat
