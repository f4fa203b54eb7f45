#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "fracheat/assembly.hpp"
#include "fracheat/grids.hpp"

namespace fracheat {

// Discrete eigenpairs of the Dirichlet fractional Laplacian on (-1,1):
// generalized problem A v = lambda M v over the interior nodes. Modes are
// mass-orthonormal and sign-fixed (largest-magnitude entry positive); the
// nonlocal normal derivative of each mode is sampled at the control nodes.
struct EigenBasis {
  Eigen::VectorXd lambdas;         // K ascending eigenvalues
  Eigen::MatrixXd modes;           // n_int x K nodal eigenvectors
  Eigen::MatrixXd normal_traces;   // n_ctrl x K values of N_s phi_k
  Eigen::MatrixXd projector;       // K x n_int, modes^T M_int
  Eigen::VectorXd window_weights;  // quadrature weights over the control window
  int K = 0;
  double max_residual = 0.0;  // max_k ||A v - lambda M v|| / ||v||

  Eigen::VectorXd coeffs_of(const Eigen::VectorXd& u_int) const {
    return projector * u_int;
  }
  Eigen::VectorXd nodal_of(const Eigen::VectorXd& coeffs) const {
    return modes * coeffs;
  }
  // Integral of |f| over the control window from nodal samples.
  double window_l1(const Eigen::VectorXd& f_at_ctrl) const {
    return window_weights.dot(f_at_ctrl.cwiseAbs());
  }
};

int default_mode_count(const Mesh1D& mesh);

EigenBasis compute_eigenbasis(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                              const FracParams& params, int K);

struct SpectralState {
  Eigen::VectorXd coeffs;
  double time = 0.0;
};

// Duhamel solution of the forward system at t in [0, T]: free modal decay of
// u0 plus the control pairing convolved against the modal exponential, with
// the piecewise-constant-in-time control integrated exactly per step.
SpectralState forward_series(const EigenBasis& basis, const Eigen::VectorXd& u0_int,
                             const ControlGrid& g, const TimeGrid& grid, double t);

// Backward (dual) system with terminal datum psi_T at time t <= T. Returns the
// modal state and the normal trace at the control nodes.
std::pair<SpectralState, Eigen::VectorXd> adjoint_series(const EigenBasis& basis,
                                                         const Eigen::VectorXd& psi_T_int,
                                                         double T, double t);

// CSV table `k,lambda_k,l1_normal_trace_k`.
void dump_eigen_csv(const EigenBasis& basis, const std::string& path);

}  // namespace fracheat
