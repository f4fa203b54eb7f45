#include "fracheat/mesh.hpp"

#include <cmath>
#include <sstream>

#include "fracheat/errors.hpp"

namespace fracheat {

double Mesh1D::hat(int a, double x) const {
  const double d = std::abs(x - nodes[static_cast<std::size_t>(a)]) / h;
  return d >= 1.0 ? 0.0 : 1.0 - d;
}

double Mesh1D::hat_slope(int a, int e) const {
  if (a == e + 1) return 1.0 / h;
  if (a == e) return -1.0 / h;
  return 0.0;
}

Mesh1D build_mesh(int num_elements, const FracParams& params) {
  if (num_elements < 8 || num_elements % 2 != 0) {
    std::ostringstream msg;
    msg << "build_mesh: num_elements must be even and >= 8, got " << num_elements;
    throw config_error(msg.str());
  }
  Mesh1D mesh;
  const int n = num_elements;
  mesh.h = 2.0 * FracParams::box_half / n;
  mesh.snapped = (n % 4 == 0);
  mesh.nodes.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    mesh.nodes[static_cast<std::size_t>(i)] = -FracParams::box_half + i * mesh.h;
  }
  mesh.nodes.back() = FracParams::box_half;

  for (int i = 0; i <= n; ++i) {
    // Interior nodes are those whose hat is supported in [-1,1]; for snapped
    // meshes this is exactly the nodes strictly inside (-1,1). At straddling
    // meshes the two extra nodes carry exterior Robin mass and are pinned by
    // the penalty, so they belong with the exterior set. Integer arithmetic
    // avoids rounding at the interface.
    const bool interior = (4 * (i - 1) >= n) && (4 * (i + 1) <= 3 * n);
    if (interior) {
      mesh.interior_ids.push_back(i);
    } else {
      mesh.exterior_ids.push_back(i);
    }
    const double x = mesh.nodes[static_cast<std::size_t>(i)];
    if (!interior && x > params.window_lo && x < params.window_hi) {
      mesh.control_ids.push_back(i);
    }
  }
  if (mesh.control_ids.empty()) {
    std::ostringstream msg;
    msg << "build_mesh: control window (" << params.window_lo << ","
        << params.window_hi << ") contains no mesh nodes";
    throw config_error(msg.str());
  }
  return mesh;
}

}  // namespace fracheat
