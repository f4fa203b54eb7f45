#pragma once

#include <stdexcept>

namespace fracheat {

// Closed-form scalar kernels of the fractional Laplacian (-d^2/dx^2)^s with
// state interval (-1,1) and truncation box (-2,2). These are pure functions
// of double-precision inputs; every other module uses them as oracles.

// Normalization constant C_s = s 2^{2s} Gamma((2s+1)/2) / (sqrt(pi) Gamma(1-s)).
// Requires 0 < s < 1.
double normalization_constant(double s);

// Leading-order eigenvalue of the Dirichlet fractional Laplacian on (-1,1):
// (n pi/2 - (2-2s) pi/8)^{2s}. Requires n >= 1. Validation oracle only;
// discrete eigenvalues are the authoritative lambda_n.
double eigenvalue_asymptotic(int n, double s);

// c(s) e^t (1-x^2)_+^s with c(s) = Gamma(1/2) 2^{-2s} / (Gamma(1+s) Gamma(1/2+s)).
// Solves the forced fractional heat problem used for manufactured convergence
// studies; identically zero for |x| >= 1.
double exact_solution(double x, double t, double s);

// int_{-1}^{1} |x-y|^{-1-2s} dy for an exterior point |x| > 1, via the
// antiderivative: (1/2s) ((|x|-1)^{-2s} - (|x|+1)^{-2s}).
double exterior_kernel_integral(double x, double s);

// Fractional order, its normalization constant, and the control-window
// geometry. Domain is (-1,1), truncation box (-2,2); the control window
// (window_lo, window_hi) must have closure disjoint from [-1,1] and be
// contained in the box.
struct FracParams {
  double s;
  double c_s;
  double window_lo;
  double window_hi;

  static constexpr double domain_half = 1.0;
  static constexpr double box_half = 2.0;

  FracParams(double s, double window_lo, double window_hi);

  // Controllability machinery is only valid for 1/2 < s < 1.
  bool controllable_order() const { return s > 0.5; }
  void require_controllable_order() const;
};

}  // namespace fracheat
