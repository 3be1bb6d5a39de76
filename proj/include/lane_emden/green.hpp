#pragma once

#include "lane_emden/asymptotics.hpp"
#include "lane_emden/geometry.hpp"

#include <vector>

namespace le {

/// Dirichlet Green's function of -Delta in the unit disk,
/// G(x, y) = log(|x - y*| |y| / |x - y|) / (2 pi), y* = y/|y|^2.
double green_disk(const Point& x, const Point& y);

/// Regular part H(x, y) = G(x, y) + log|x - y| / (2 pi); finite at x = y.
double regular_part(const Point& x, const Point& y);

/// Robin function R(x) = H(x, x) = log(1 - |x|^2) / (2 pi).
double robin_disk(const Point& x);

/// Gradient of x -> R(x): -x / (pi (1 - |x|^2)).
Point robin_gradient(const Point& x);

/// Gradient in the first argument of G and of H. On the diagonal
/// grad_x H(x, y)|_{y=x} is half the gradient of the Robin function.
Point grad_x_green(const Point& x, const Point& y);
Point grad_x_regular(const Point& x, const Point& y);

/// Per-point norm of m_i grad_x H(x_i, x_i) + sum_{l != i} m_l grad_x G(x_i, x_l).
/// Masses may carry signs (sign-changing configurations).
std::vector<double> check_balance(const std::vector<Point>& points, const std::vector<double>& masses);

struct GreenLimitRow {
  double p = 0.0;
  std::vector<double> masses;  // m_i, max |u| over B(x_i, 10 mu_i)
  double residual = 0.0;       // relative sup deviation on the test set
  double mass_energy = 0.0;    // 8 pi sum m_i^2
};

/// sup_K |p u(x) - 8 pi sum m_i G(x, x_i)| / sup_K |8 pi sum m_i G(x, x_i)|.
double green_limit_residual(const FieldView& f, const std::vector<Point>& points, const std::vector<double>& masses,
                            const TestAnnulus& set = {});

/// max |u| over the nodes within 10 mu_i of x_i.
std::vector<double> estimate_masses(const FieldView& f, const ConcentrationReport& report);

/// One row per family member; each member uses its own concentration report.
std::vector<GreenLimitRow> check_green_limit(const std::vector<FieldView>& family,
                                             const std::vector<ConcentrationReport>& reports,
                                             const TestAnnulus& set = {});

}  // namespace le
