#include "fracheat/special_math.hpp"

#include <cmath>
#include <sstream>

#include "fracheat/errors.hpp"

namespace fracheat {

double normalization_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::domain_error("normalization_constant: s must lie in (0,1)");
  }
  const double sqrt_pi = std::sqrt(M_PI);
  return s * std::pow(2.0, 2.0 * s) * std::tgamma(s + 0.5) /
         (sqrt_pi * std::tgamma(1.0 - s));
}

double eigenvalue_asymptotic(int n, double s) {
  if (n < 1) {
    throw std::domain_error("eigenvalue_asymptotic: mode index must be >= 1");
  }
  if (!(s > 0.0 && s < 1.0)) {
    throw std::domain_error("eigenvalue_asymptotic: s must lie in (0,1)");
  }
  const double mu = n * M_PI / 2.0 - (2.0 - 2.0 * s) * M_PI / 8.0;
  return std::pow(mu, 2.0 * s);
}

double exact_solution(double x, double t, double s) {
  const double q = 1.0 - x * x;
  if (q <= 0.0) return 0.0;
  const double pref = std::sqrt(M_PI) * std::pow(2.0, -2.0 * s) /
                      (std::tgamma(1.0 + s) * std::tgamma(0.5 + s));
  return pref * std::exp(t) * std::pow(q, s);
}

double exterior_kernel_integral(double x, double s) {
  const double a = std::abs(x);
  if (a <= 1.0) {
    throw std::domain_error("exterior_kernel_integral: point must satisfy |x| > 1");
  }
  return (std::pow(a - 1.0, -2.0 * s) - std::pow(a + 1.0, -2.0 * s)) / (2.0 * s);
}

FracParams::FracParams(double s_in, double lo, double hi)
    : s(s_in), c_s(normalization_constant(s_in)), window_lo(lo), window_hi(hi) {
  const bool right = lo > domain_half && hi < box_half;
  const bool left = hi < -domain_half && lo > -box_half;
  if (!(lo < hi) || !(right || left)) {
    std::ostringstream msg;
    msg << "FracParams: control window (" << lo << "," << hi
        << ") must be an open interval with closure in the box and disjoint from [-1,1]";
    throw config_error(msg.str());
  }
}

void FracParams::require_controllable_order() const {
  if (!controllable_order()) {
    throw std::domain_error("controllability requires 1/2 < s < 1");
  }
}

}  // namespace fracheat
