#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fracheat/mesh.hpp"

namespace fracheat {

struct TimeGrid {
  double T = 0.0;
  int M = 0;
  double dt = 0.0;
  std::vector<double> times;  // t_k = k T / M

  TimeGrid() = default;
  TimeGrid(double horizon, int steps);
};

// Control values g(x_c, t_k) on control-window nodes x time grid. Column k
// is the value active on the step (t_{k-1}, t_k]; column 0 seeds the exterior
// extension of the initial state.
struct ControlGrid {
  Eigen::MatrixXd values;  // control_ids.size() x (M+1)
  bool nonneg = false;

  static ControlGrid zero(const Mesh1D& mesh, const TimeGrid& grid);
  void validate(const Mesh1D& mesh, const TimeGrid& grid) const;
};

}  // namespace fracheat
