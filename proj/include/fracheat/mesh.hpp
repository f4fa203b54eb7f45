#pragma once

#include <vector>

#include "fracheat/special_math.hpp"

namespace fracheat {

// Uniform P1 mesh of the truncation box (-2,2) with index bookkeeping for the
// state interval (-1,1) and the control window.
//
// interior_ids are the nodes strictly inside (-1,1); exterior_ids the
// complement; control_ids the nodes strictly inside the control window
// (a subset of exterior_ids). When num_elements is divisible by 4 the points
// +-1 are grid nodes; otherwise they fall at element midpoints and all
// region-restricted integrals split the straddling elements at +-1.
struct Mesh1D {
  std::vector<double> nodes;  // x_0 = -2 < ... < x_N = 2
  double h = 0.0;
  bool snapped = false;  // true iff +-1 are grid nodes
  std::vector<int> interior_ids;
  std::vector<int> exterior_ids;
  std::vector<int> control_ids;

  int num_elements() const { return static_cast<int>(nodes.size()) - 1; }
  int num_nodes() const { return static_cast<int>(nodes.size()); }

  // Value of the hat function centered at node a, evaluated at x.
  double hat(int a, double x) const;
  // Slope of that hat on element e (elements are [x_e, x_{e+1}]).
  double hat_slope(int a, int e) const;
};

// Requires num_elements even and >= 8 so the box midpoint is a node and the
// near-boundary bookkeeping is well posed; throws config_error otherwise.
Mesh1D build_mesh(int num_elements, const FracParams& params);

}  // namespace fracheat
