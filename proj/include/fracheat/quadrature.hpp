#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracheat::quad {

// Gauss-Legendre rule on [-1,1]. Supported point counts: 4, 6, 8.
struct Rule {
  std::span<const double> x;
  std::span<const double> w;
};
Rule gauss(int npoints);

// int_{w0}^{w1} w^p dw for 0 <= w0 < w1, with the logarithmic branch at
// p == -1. Throws numerical_error when the integral diverges (w0 == 0 and
// p <= -1).
double power_integral(double p, double w0, double w1);

// Geometrically graded subdivision of [a,b] toward the endpoint `toward`
// (which must be a or b): `depth` cells shrinking by `ratio` plus one
// innermost cell touching the singular endpoint. Returns cell boundaries
// ordered from a to b (depth+2 values).
std::vector<double> graded_cells(double a, double b, double toward, double ratio,
                                 int depth);

}  // namespace fracheat::quad
