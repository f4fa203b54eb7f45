#include "fracheat/grids.hpp"

#include <sstream>

#include "fracheat/errors.hpp"

namespace fracheat {

TimeGrid::TimeGrid(double horizon, int steps) : T(horizon), M(steps) {
  if (!(horizon > 0.0) || steps < 1) {
    throw config_error("TimeGrid: need T > 0 and M >= 1");
  }
  dt = T / M;
  times.resize(static_cast<std::size_t>(M) + 1);
  for (int k = 0; k <= M; ++k) {
    times[static_cast<std::size_t>(k)] = T * k / M;
  }
}

ControlGrid ControlGrid::zero(const Mesh1D& mesh, const TimeGrid& grid) {
  ControlGrid g;
  g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mesh.control_ids.size()),
                                   grid.M + 1);
  g.nonneg = true;
  return g;
}

void ControlGrid::validate(const Mesh1D& mesh, const TimeGrid& grid) const {
  if (values.rows() != static_cast<Eigen::Index>(mesh.control_ids.size()) ||
      values.cols() != grid.M + 1) {
    std::ostringstream msg;
    msg << "ControlGrid: dimensions " << values.rows() << "x" << values.cols()
        << " do not match " << mesh.control_ids.size() << " control nodes x "
        << grid.M + 1 << " time levels";
    throw config_error(msg.str());
  }
  if (nonneg && values.size() > 0 && values.minCoeff() < 0.0) {
    throw config_error("ControlGrid: nonneg flag set but grid has negative entries");
  }
}

}  // namespace fracheat
