#include "fracheat/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

namespace {

using quad::Rule;

struct Ctx {
  const Mesh1D& mesh;
  double s;
  double cs;
  AssemblyOptions opt;

  double node(int i) const { return mesh.nodes[static_cast<std::size_t>(i)]; }
};

// Integrand numerator on an element pair; the kernel |x-y|^{-1-2s} is applied
// by the cell drivers.
using Numer = double (*)(const Ctx&, int, int, double, double);

double numer_diff(const Ctx& c, int i, int j, double x, double y) {
  return (c.mesh.hat(i, x) - c.mesh.hat(i, y)) * (c.mesh.hat(j, x) - c.mesh.hat(j, y));
}

double numer_cross(const Ctx& c, int i, int j, double x, double y) {
  return c.mesh.hat(i, x) * c.mesh.hat(j, y);
}

double kernel(const Ctx& c, double x, double y) {
  return std::pow(std::abs(x - y), -1.0 - 2.0 * c.s);
}

// Tensor Gauss rule over [a1,b1] x [a2,b2].
double cell_pair(const Ctx& c, double a1, double b1, double a2, double b2, Numer f,
                 int i, int j, const Rule& rule) {
  const double m1 = 0.5 * (a1 + b1), r1 = 0.5 * (b1 - a1);
  const double m2 = 0.5 * (a2 + b2), r2 = 0.5 * (b2 - a2);
  double acc = 0.0;
  for (std::size_t p = 0; p < rule.x.size(); ++p) {
    const double x = m1 + r1 * rule.x[p];
    double inner = 0.0;
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double y = m2 + r2 * rule.x[q];
      inner += rule.w[q] * f(c, i, j, x, y) * kernel(c, x, y);
    }
    acc += rule.w[p] * inner;
  }
  return acc * r1 * r2;
}

// Element pair sharing exactly one vertex: geometric grading of both elements
// toward the vertex, tensor Gauss per cell pair.
double touching_pair(const Ctx& c, int e1, int e2, Numer f, int i, int j) {
  const double a = c.node(e1), v = c.node(e1 + 1), b = c.node(e2 + 1);
  const Rule rule = quad::gauss(c.opt.gauss_singular);
  const auto left = quad::graded_cells(a, v, v, c.opt.grading_ratio, c.opt.grading_depth);
  const auto right = quad::graded_cells(v, b, v, c.opt.grading_ratio, c.opt.grading_depth);
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < left.size(); ++p) {
    for (std::size_t q = 0; q + 1 < right.size(); ++q) {
      acc += cell_pair(c, left[p], left[p + 1], right[q], right[q + 1], f, i, j, rule);
    }
  }
  return acc;
}

// Disjoint element pair: composite tensor Gauss, refined for small gaps.
double separated_pair(const Ctx& c, int e1, int e2, Numer f, int i, int j) {
  const int gap = e2 - e1 - 1;
  const int nsub = gap <= 1 ? 4 : (gap <= 6 ? 2 : 1);
  const Rule rule = quad::gauss(c.opt.gauss_regular);
  const double a1 = c.node(e1), b1 = c.node(e1 + 1);
  const double a2 = c.node(e2), b2 = c.node(e2 + 1);
  const double d1 = (b1 - a1) / nsub, d2 = (b2 - a2) / nsub;
  double acc = 0.0;
  for (int p = 0; p < nsub; ++p) {
    for (int q = 0; q < nsub; ++q) {
      acc += cell_pair(c, a1 + p * d1, a1 + (p + 1) * d1, a2 + q * d2, a2 + (q + 1) * d2,
                       f, i, j, rule);
    }
  }
  return acc;
}

// Identical elements: the basis differences are linear in (x-y), so the
// integrand reduces to b_i b_j |x-y|^{1-2s} with the exact value
// 2 h^{3-2s} / ((2-2s)(3-2s)).
double identical_pair(const Ctx& c, int e, int i, int j) {
  const double bi = c.mesh.hat_slope(i, e);
  const double bj = c.mesh.hat_slope(j, e);
  if (bi == 0.0 || bj == 0.0) return 0.0;
  const double h = c.node(e + 1) - c.node(e);
  const double w = 2.0 - 2.0 * c.s;
  return bi * bj * 2.0 * std::pow(h, w + 1.0) / (w * (w + 1.0));
}

// int over element e of phi_i phi_j (x - base)^{-2s} dx, exact via the power
// rule; `sign` +1 measures from the left (w = x - base increasing), -1 from
// the right (w = base - x).
double element_power_moment(const Ctx& c, int e, int i, int j, double base, int sign) {
  const double xe = c.node(e), xe1 = c.node(e + 1);
  // phi(x) = v0 + slope (x - xe) on the element.
  const double vi0 = (i == e) ? 1.0 : 0.0;
  const double vj0 = (j == e) ? 1.0 : 0.0;
  const double bi = c.mesh.hat_slope(i, e);
  const double bj = c.mesh.hat_slope(j, e);
  if ((vi0 == 0.0 && bi == 0.0) || (vj0 == 0.0 && bj == 0.0)) return 0.0;

  // When the element touches the base node, the constant coefficients must be
  // the exact nodal values: an O(eps) residue would otherwise multiply a
  // divergent power integral.
  double w0, w1, Ai, Bi, Aj, Bj;
  if (sign > 0) {
    // x = base + w
    w0 = xe - base;
    w1 = xe1 - base;
    Bi = bi;
    Bj = bj;
    if (w0 <= 0.0) {
      w0 = 0.0;
      Ai = vi0;
      Aj = vj0;
    } else {
      Ai = vi0 + bi * (base - xe);
      Aj = vj0 + bj * (base - xe);
    }
  } else {
    // x = base - w
    w0 = base - xe1;
    w1 = base - xe;
    Bi = -bi;
    Bj = -bj;
    if (w0 <= 0.0) {
      w0 = 0.0;
      Ai = (i == e + 1) ? 1.0 : 0.0;
      Aj = (j == e + 1) ? 1.0 : 0.0;
    } else {
      Ai = vi0 + bi * (base - xe);
      Aj = vj0 + bj * (base - xe);
    }
  }
  const double p = -2.0 * c.s;
  const double c0 = Ai * Aj;
  const double c1 = Ai * Bj + Aj * Bi;
  const double c2 = Bi * Bj;
  double acc = 0.0;
  if (c0 != 0.0) acc += c0 * quad::power_integral(p, w0, w1);
  if (c1 != 0.0) acc += c1 * quad::power_integral(p + 1.0, w0, w1);
  if (c2 != 0.0) acc += c2 * quad::power_integral(p + 2.0, w0, w1);
  return acc;
}

// Full-line form entry F(phi_i, phi_j), i <= j.
double entry(const Ctx& c, int i, int j) {
  const int n = c.mesh.num_elements();
  const int i_lo = std::max(0, i - 1), i_hi = std::min(n - 1, i);
  const int j_lo = std::max(0, j - 1), j_hi = std::min(n - 1, j);

  if (j - i >= 2) {
    // Disjoint supports: the form collapses to -C_s \iint phi_i(x) phi_j(y) K.
    double acc = 0.0;
    for (int e1 = i_lo; e1 <= i_hi; ++e1) {
      for (int e2 = j_lo; e2 <= j_hi; ++e2) {
        if (e2 == e1 + 1) {
          acc += touching_pair(c, e1, e2, numer_cross, i, j);
        } else {
          acc += separated_pair(c, e1, e2, numer_cross, i, j);
        }
      }
    }
    return -c.cs * acc;
  }

  // Overlapping supports: singular double integral over the support union U
  // plus the closed-form interaction with the complement of U.
  const int e_lo = i_lo, e_hi = j_hi;
  const double ua = c.node(e_lo), ub = c.node(e_hi + 1);
  double acc = 0.0;
  for (int e1 = e_lo; e1 <= e_hi; ++e1) {
    for (int e2 = e1; e2 <= e_hi; ++e2) {
      const double factor = (e1 == e2) ? 1.0 : 2.0;
      double val;
      if (e1 == e2) {
        val = identical_pair(c, e1, i, j);
      } else if (e2 == e1 + 1) {
        val = touching_pair(c, e1, e2, numer_diff, i, j);
      } else {
        val = separated_pair(c, e1, e2, numer_diff, i, j);
      }
      acc += factor * val;
    }
  }
  double tail = 0.0;
  for (int e = e_lo; e <= e_hi; ++e) {
    tail += element_power_moment(c, e, i, j, ua, +1);
    tail += element_power_moment(c, e, i, j, ub, -1);
  }
  tail /= 2.0 * c.s;
  return 0.5 * c.cs * acc + c.cs * tail;
}

void fill_stiffness(Eigen::MatrixXd& a, const Ctx& c, bool constrained, bool parallel) {
  const int n = c.mesh.num_elements();
  const int lo = constrained ? 1 : 0;
  const int hi = constrained ? n - 1 : n;
  a.setZero(n + 1, n + 1);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (int i = lo; i <= hi; ++i) {
    for (int j = i; j <= hi; ++j) {
      a(i, j) = entry(c, i, j);
    }
  }
  for (int i = lo; i <= hi; ++i) {
    for (int j = i + 1; j <= hi; ++j) {
      a(j, i) = a(i, j);
    }
  }
}

Eigen::VectorXd tail_weight_vector(const Ctx& c, bool constrained) {
  const int n = c.mesh.num_elements();
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n + 1);
  const double ua = c.node(0), ub = c.node(n);
  for (int i = 0; i <= n; ++i) {
    if (constrained && (i == 0 || i == n)) continue;
    double acc = 0.0;
    for (int e = std::max(0, i - 1); e <= std::min(n - 1, i); ++e) {
      // phi_i paired with the box complement; same exact-corner rule as in
      // element_power_moment.
      const double xe = c.node(e), xe1 = c.node(e + 1);
      const double v0 = (i == e) ? 1.0 : 0.0;
      const double b = c.mesh.hat_slope(i, e);
      // left piece, w = x - ua
      {
        double w0 = xe - ua;
        const double w1 = xe1 - ua;
        const double a0 = (w0 <= 0.0) ? v0 : v0 + b * (ua - xe);
        if (w0 <= 0.0) w0 = 0.0;
        if (a0 != 0.0) acc += a0 * quad::power_integral(-2.0 * c.s, w0, w1);
        if (b != 0.0) acc += b * quad::power_integral(1.0 - 2.0 * c.s, w0, w1);
      }
      // right piece, w = ub - x
      {
        double w0 = ub - xe1;
        const double w1 = ub - xe;
        const double a0 = (w0 <= 0.0) ? ((i == e + 1) ? 1.0 : 0.0) : v0 + b * (ub - xe);
        if (w0 <= 0.0) w0 = 0.0;
        if (a0 != 0.0) acc += a0 * quad::power_integral(-2.0 * c.s, w0, w1);
        if (b != 0.0) acc += -b * quad::power_integral(1.0 - 2.0 * c.s, w0, w1);
      }
    }
    t(i) = c.cs * acc / (2.0 * c.s);
  }
  return t;
}

}  // namespace

NonlocalAssembly assemble(const Mesh1D& mesh, const FracParams& params,
                          const AssemblyOptions& opt) {
  NonlocalAssembly out;
  out.endpoints_constrained = params.s >= 0.5;
  Ctx c{mesh, params.s, params.c_s, opt};
  fill_stiffness(out.stiffness, c, out.endpoints_constrained, opt.parallel);
  out.mass = assemble_mass(mesh, false);
  out.mass_lumped = out.mass.rowwise().sum();
  out.tail_weights = tail_weight_vector(c, out.endpoints_constrained);
  return out;
}

Eigen::MatrixXd assemble_stiffness_serial(const Mesh1D& mesh, const FracParams& params,
                                          const AssemblyOptions& opt) {
  Eigen::MatrixXd a;
  Ctx c{mesh, params.s, params.c_s, opt};
  fill_stiffness(a, c, params.s >= 0.5, false);
  return a;
}

Eigen::MatrixXd assemble_mass(const Mesh1D& mesh, bool lumped) {
  const int n = mesh.num_elements();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int e = 0; e < n; ++e) {
    const double h = mesh.nodes[static_cast<std::size_t>(e) + 1] -
                     mesh.nodes[static_cast<std::size_t>(e)];
    m(e, e) += h / 3.0;
    m(e + 1, e + 1) += h / 3.0;
    m(e, e + 1) += h / 6.0;
    m(e + 1, e) += h / 6.0;
  }
  if (lumped) {
    Eigen::VectorXd d = m.rowwise().sum();
    m.setZero();
    m.diagonal() = d;
  }
  return m;
}

Eigen::MatrixXd region_mass(const Mesh1D& mesh, double a, double b) {
  const int n = mesh.num_elements();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  const Rule rule = quad::gauss(4);
  for (int e = 0; e < n; ++e) {
    const double lo = std::max(mesh.nodes[static_cast<std::size_t>(e)], a);
    const double hi = std::min(mesh.nodes[static_cast<std::size_t>(e) + 1], b);
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double x = mid + rad * rule.x[q];
      const double w = rule.w[q] * rad;
      const double pe = mesh.hat(e, x), pe1 = mesh.hat(e + 1, x);
      m(e, e) += w * pe * pe;
      m(e + 1, e + 1) += w * pe1 * pe1;
      m(e, e + 1) += w * pe * pe1;
      m(e + 1, e) += w * pe * pe1;
    }
  }
  return m;
}

Eigen::VectorXd load_vector(const Mesh1D& mesh, double a, double b,
                            const std::function<double(double, double)>& f, double t) {
  const int n = mesh.num_elements();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n + 1);
  const Rule rule = quad::gauss(4);
  for (int e = 0; e < n; ++e) {
    const double lo = std::max(mesh.nodes[static_cast<std::size_t>(e)], a);
    const double hi = std::min(mesh.nodes[static_cast<std::size_t>(e) + 1], b);
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double x = mid + rad * rule.x[q];
      const double w = rule.w[q] * rad * f(x, t);
      out(e) += w * mesh.hat(e, x);
      out(e + 1) += w * mesh.hat(e + 1, x);
    }
  }
  return out;
}

double nonlocal_normal_derivative_at(const Mesh1D& mesh, const FracParams& params,
                                     const Eigen::VectorXd& values, double x) {
  if (std::abs(x) <= FracParams::domain_half) {
    throw std::domain_error("nonlocal_normal_derivative_at: point must satisfy |x| > 1");
  }
  const int n = mesh.num_elements();
  const double s = params.s;
  double acc = 0.0;
  for (int e = 0; e < n; ++e) {
    const double xe = mesh.nodes[static_cast<std::size_t>(e)];
    const double xe1 = mesh.nodes[static_cast<std::size_t>(e) + 1];
    const double lo = std::max(xe, -FracParams::domain_half);
    const double hi = std::min(xe1, FracParams::domain_half);
    if (hi <= lo) continue;
    const double h = xe1 - xe;
    const double v0 = values(e);
    const double slope = (values(e + 1) - values(e)) / h;
    // u(y) = v0 + slope (y - xe); substitute w = |x - y|, so that
    // u = aa + bb w with aa = u extrapolated to y = x.
    const double aa = v0 + slope * (x - xe);
    double w0, w1, bb;
    if (x > 0) {
      w0 = x - hi;
      w1 = x - lo;
      bb = -slope;
    } else {
      w0 = lo - x;
      w1 = hi - x;
      bb = slope;
    }
    double piece = 0.0;
    if (aa != 0.0) piece += aa * quad::power_integral(-1.0 - 2.0 * s, w0, w1);
    if (bb != 0.0) piece += bb * quad::power_integral(-2.0 * s, w0, w1);
    acc += piece;
  }
  return -params.c_s * acc;
}

Eigen::VectorXd discrete_normal_derivative(const Mesh1D& mesh, const FracParams& params,
                                           const Eigen::VectorXd& values) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.control_ids.size()));
  for (std::size_t k = 0; k < mesh.control_ids.size(); ++k) {
    const double x = mesh.nodes[static_cast<std::size_t>(mesh.control_ids[k])];
    out(static_cast<Eigen::Index>(k)) =
        nonlocal_normal_derivative_at(mesh, params, values, x);
  }
  return out;
}

void dump_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw numerical_error("dump_matrix_csv: cannot open " + path);
  std::fprintf(f, "i,j,value\n");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::fprintf(f, "%lld,%lld,%.17g\n", static_cast<long long>(i),
                   static_cast<long long>(j), m(i, j));
    }
  }
  std::fclose(f);
}

}  // namespace fracheat
