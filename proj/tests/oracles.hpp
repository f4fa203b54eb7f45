#pragma once

// Test-side oracles, independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// Lanczos approximation of the gamma function (g = 7, 9 coefficients);
// relative error below 1e-13 on (0, 10). Independent of std::tgamma.
inline double lanczos_gamma(double x) {
  static const double coef[9] = {0.99999999999980993,
                                 676.5203681218851,
                                 -1259.1392167224028,
                                 771.32342877765313,
                                 -176.61502916214059,
                                 12.507343278686905,
                                 -0.13857109526572012,
                                 9.9843695780195716e-6,
                                 1.5056327351493116e-7};
  if (x < 0.5) {
    return M_PI / (std::sin(M_PI * x) * lanczos_gamma(1.0 - x));
  }
  x -= 1.0;
  double a = coef[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
  return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return detail::adapt(f, a, b, fa, fm, fb, detail::simpson(f, a, b, fa, fm, fb), tol,
                       depth);
}

// Gauss(8) over geometrically graded panels; robust for endpoint power
// singularities and infinite tails.
inline double graded_panels(const std::function<double(double)>& f, double a, double b,
                            bool grade_left, bool grade_right, int depth = 48) {
  static const double gx[8] = {-0.960289856497536232, -0.796666477413626740,
                               -0.525532409916328986, -0.183434642495649805,
                               0.183434642495649805,  0.525532409916328986,
                               0.796666477413626740,  0.960289856497536232};
  static const double gw[8] = {0.101228536290376259, 0.222381034453374471,
                               0.313706645877887287, 0.362683783378361983,
                               0.362683783378361983, 0.313706645877887287,
                               0.222381034453374471, 0.101228536290376259};
  auto panel = [&](double lo, double hi) {
    const double m = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int q = 0; q < 8; ++q) acc += gw[q] * f(m + r * gx[q]);
    return acc * r;
  };
  std::vector<double> bounds;
  bounds.push_back(a);
  if (grade_left && grade_right) {
    const double mid = 0.5 * (a + b);
    for (int d = depth; d >= 1; --d) bounds.push_back(a + (mid - a) * std::pow(0.5, d));
    bounds.push_back(mid);
    for (int d = depth; d >= 1; --d) bounds.push_back(b - (b - mid) * std::pow(0.5, d));
  } else if (grade_left) {
    for (int d = depth; d >= 1; --d) bounds.push_back(a + (b - a) * std::pow(0.5, d));
  } else if (grade_right) {
    for (int d = depth; d >= 1; --d) bounds.push_back(b - (b - a) * std::pow(0.5, d));
  }
  bounds.push_back(b);
  std::sort(bounds.begin(), bounds.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) acc += panel(bounds[i], bounds[i + 1]);
  return acc;
}

}  // namespace oracles
