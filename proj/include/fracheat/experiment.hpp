#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracheat/control.hpp"

namespace fracheat {

// Flat key=value experiment configuration. Defaults are the headline values:
// N=210 elements, M=300 steps, penalty 1e9, window (1.7,1.9), s=0.8.
struct ExperimentConfig {
  double s = 0.8;
  int N = 210;
  int M = 300;
  double penalty_n = 1e9;
  double window_lo = 1.7;
  double window_hi = 1.9;
  int case_id = 1;  // 1: u0 = 0.5 cos(pi x/2), 2: u0 = 1.8 cos(pi x/2)
  double T = 0.4739;
  double eps_rel = 1e-3;  // feasibility tolerance relative to the target norm
  int max_iter = 2500;
  int K = 0;  // retained modes; 0 selects the per-command default
  int ensemble = 64;
  std::uint64_t seed = 1;
  double t_lo = 0.15;  // bisection bracket for `mintime`
  double t_hi = 1.0;
  double bisect_tol = 0.03;
  std::vector<double> diag_ts = {0.1, 0.5, 1.0};
  std::string control_csv;  // optional control replay for `solve`
  std::string out_dir = "out";

  // One `key = value` per line; '#' comments and blank lines are skipped.
  static ExperimentConfig from_file(const std::string& path);
  void set_key(const std::string& key, const std::string& value);
};

struct ExperimentReport {
  std::string json_text;
  std::vector<std::string> files;  // emitted artifacts, out_dir-relative
};

// Case data on the interior nodes.
Eigen::VectorXd case_initial(const Mesh1D& mesh, int case_id);
Eigen::VectorXd case_target(const Mesh1D& mesh, double s, double T);

ExperimentReport run_eig(const ExperimentConfig& config);
ExperimentReport run_solve(const ExperimentConfig& config);
ExperimentReport run_control(const ExperimentConfig& config);
ExperimentReport run_mintime(const ExperimentConfig& config);
ExperimentReport run_diagnose(const ExperimentConfig& config);

}  // namespace fracheat
