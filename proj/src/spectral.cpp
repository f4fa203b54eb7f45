#include "fracheat/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fracheat/errors.hpp"

namespace fracheat {

namespace {

Eigen::VectorXd embed_interior(const Mesh1D& mesh, const Eigen::VectorXd& u_int) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (std::size_t k = 0; k < mesh.interior_ids.size(); ++k) {
    full(mesh.interior_ids[k]) = u_int(static_cast<Eigen::Index>(k));
  }
  return full;
}

}  // namespace

int default_mode_count(const Mesh1D& mesh) {
  return std::min<int>(40, static_cast<int>(mesh.interior_ids.size()));
}

EigenBasis compute_eigenbasis(const NonlocalAssembly& assembly, const Mesh1D& mesh,
                              const FracParams& params, int K) {
  const auto n_int = static_cast<Eigen::Index>(mesh.interior_ids.size());
  if (K < 1 || K > n_int) {
    std::ostringstream msg;
    msg << "compute_eigenbasis: K = " << K << " must lie in [1, " << n_int << "]";
    throw config_error(msg.str());
  }

  Eigen::MatrixXd a_int(n_int, n_int), m_int(n_int, n_int);
  for (Eigen::Index r = 0; r < n_int; ++r) {
    for (Eigen::Index c = 0; c < n_int; ++c) {
      a_int(r, c) = assembly.stiffness(mesh.interior_ids[static_cast<std::size_t>(r)],
                                       mesh.interior_ids[static_cast<std::size_t>(c)]);
      m_int(r, c) = assembly.mass(mesh.interior_ids[static_cast<std::size_t>(r)],
                                  mesh.interior_ids[static_cast<std::size_t>(c)]);
    }
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a_int, m_int);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("compute_eigenbasis: generalized eigensolver failed");
  }

  EigenBasis basis;
  basis.K = K;
  basis.lambdas = solver.eigenvalues().head(K);
  basis.modes = solver.eigenvectors().leftCols(K);

  // Explicit mass normalization and deterministic sign.
  double max_res = 0.0;
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd v = basis.modes.col(k);
    const double nrm = std::sqrt(v.dot(m_int * v));
    v /= nrm;
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    basis.modes.col(k) = v;
    const double res =
        (a_int * v - basis.lambdas(k) * (m_int * v)).norm() / v.norm();
    max_res = std::max(max_res, res);
  }
  basis.max_residual = max_res;
  basis.projector = basis.modes.transpose() * m_int;

  // Quadrature weights of the control window: the sampled function is treated
  // as its P1 interpolant vanishing at the nodes adjacent to the window, so
  // every window node carries weight h.
  const auto n_ctrl = static_cast<Eigen::Index>(mesh.control_ids.size());
  basis.window_weights = Eigen::VectorXd::Constant(n_ctrl, mesh.h);

  basis.normal_traces.resize(n_ctrl, K);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXd full = embed_interior(mesh, basis.modes.col(k));
    basis.normal_traces.col(k) = discrete_normal_derivative(mesh, params, full);
  }
  return basis;
}

SpectralState forward_series(const EigenBasis& basis, const Eigen::VectorXd& u0_int,
                             const ControlGrid& g, const TimeGrid& grid, double t) {
  if (t < 0.0 || t > grid.T * (1.0 + 1e-12)) {
    throw std::domain_error("forward_series: t outside [0, T]");
  }
  SpectralState state;
  state.time = t;
  const Eigen::VectorXd c0 = basis.coeffs_of(u0_int);
  state.coeffs = (-basis.lambdas * t).array().exp().matrix().cwiseProduct(c0);

  // Control pairing per mode and step: beta(n,k) = (g(.,t_k), N_s phi_n)_O.
  // The modal ODE is u_n' = -lambda_n u_n - beta_n (project the equation on
  // phi_n and integrate by parts twice); the minus sign is what makes
  // nonnegative exterior data raise the state, since N_s phi_1 < 0 on the
  // window.
  const Eigen::MatrixXd beta =
      basis.normal_traces.transpose() *
      (basis.window_weights.asDiagonal() * g.values);
  for (int k = 1; k <= grid.M; ++k) {
    const double a = grid.times[static_cast<std::size_t>(k) - 1];
    if (a >= t) break;
    const double b = std::min(grid.times[static_cast<std::size_t>(k)], t);
    for (int n = 0; n < basis.K; ++n) {
      const double lam = basis.lambdas(n);
      const double w = std::exp(-lam * (t - b)) * (-std::expm1(-lam * (b - a))) / lam;
      state.coeffs(n) -= beta(n, k) * w;
    }
  }
  return state;
}

std::pair<SpectralState, Eigen::VectorXd> adjoint_series(const EigenBasis& basis,
                                                         const Eigen::VectorXd& psi_T_int,
                                                         double T, double t) {
  if (t < 0.0 || t > T * (1.0 + 1e-12)) {
    throw std::domain_error("adjoint_series: t outside [0, T]");
  }
  SpectralState state;
  state.time = t;
  const Eigen::VectorXd cT = basis.coeffs_of(psi_T_int);
  state.coeffs = (-basis.lambdas * (T - t)).array().exp().matrix().cwiseProduct(cT);
  Eigen::VectorXd trace = basis.normal_traces * state.coeffs;
  return {state, trace};
}

void dump_eigen_csv(const EigenBasis& basis, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw numerical_error("dump_eigen_csv: cannot open " + path);
  std::fprintf(f, "k,lambda_k,l1_normal_trace_k\n");
  for (int k = 0; k < basis.K; ++k) {
    std::fprintf(f, "%d,%.17g,%.17g\n", k + 1, basis.lambdas(k),
                 basis.window_l1(basis.normal_traces.col(k)));
  }
  std::fclose(f);
}

}  // namespace fracheat
