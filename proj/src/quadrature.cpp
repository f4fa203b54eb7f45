#include "fracheat/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "fracheat/errors.hpp"

namespace fracheat::quad {

namespace {

constexpr double kX4[] = {-0.861136311594052575, -0.339981043584856265,
                          0.339981043584856265, 0.861136311594052575};
constexpr double kW4[] = {0.347854845137453857, 0.652145154862546143,
                          0.652145154862546143, 0.347854845137453857};

constexpr double kX6[] = {-0.932469514203152028, -0.661209386466264514,
                          -0.238619186083196909, 0.238619186083196909,
                          0.661209386466264514,  0.932469514203152028};
constexpr double kW6[] = {0.171324492379170345, 0.360761573048138608,
                          0.467913934572691047, 0.467913934572691047,
                          0.360761573048138608, 0.171324492379170345};

constexpr double kX8[] = {-0.960289856497536232, -0.796666477413626740,
                          -0.525532409916328986, -0.183434642495649805,
                          0.183434642495649805,  0.525532409916328986,
                          0.796666477413626740,  0.960289856497536232};
constexpr double kW8[] = {0.101228536290376259, 0.222381034453374471,
                          0.313706645877887287, 0.362683783378361983,
                          0.362683783378361983, 0.313706645877887287,
                          0.222381034453374471, 0.101228536290376259};

}  // namespace

Rule gauss(int npoints) {
  switch (npoints) {
    case 4:
      return {kX4, kW4};
    case 6:
      return {kX6, kW6};
    case 8:
      return {kX8, kW8};
    default:
      throw config_error("gauss: unsupported point count");
  }
}

double power_integral(double p, double w0, double w1) {
  if (w0 < 0.0 || w1 <= w0) {
    throw config_error("power_integral: need 0 <= w0 < w1");
  }
  if (w0 == 0.0 && p <= -1.0) {
    throw numerical_error("power_integral: divergent integral (p <= -1 at 0)");
  }
  if (p == -1.0) {
    return std::log(w1 / w0);
  }
  const double q = p + 1.0;
  const double hi = std::pow(w1, q);
  const double lo = (w0 == 0.0) ? 0.0 : std::pow(w0, q);
  return (hi - lo) / q;
}

std::vector<double> graded_cells(double a, double b, double toward, double ratio,
                                 int depth) {
  const double len = b - a;
  std::vector<double> bounds(static_cast<std::size_t>(depth) + 2);
  if (toward == b) {
    bounds.front() = a;
    double d = len;
    for (int m = 1; m <= depth; ++m) {
      d *= ratio;
      bounds[static_cast<std::size_t>(m)] = b - d;
    }
    bounds.back() = b;
  } else {
    bounds.front() = a;
    double d = len;
    // Build from the far end and reverse so boundaries stay sorted.
    std::vector<double> tmp;
    tmp.push_back(b);
    for (int m = 1; m <= depth; ++m) {
      d *= ratio;
      tmp.push_back(a + d);
    }
    tmp.push_back(a);
    std::reverse(tmp.begin(), tmp.end());
    bounds = tmp;
  }
  return bounds;
}

}  // namespace fracheat::quad
