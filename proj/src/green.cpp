#include "lane_emden/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace le {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm2(const Point& x) { return x[0] * x[0] + x[1] * x[1]; }

void require_inside(const Point& x) {
  if (!(norm2(x) < 1.0)) throw std::invalid_argument("point outside the open unit disk");
}

}  // namespace

double green_disk(const Point& x, const Point& y) {
  require_inside(y);
  if (norm2(x) > 1.0 + 1e-12) throw std::invalid_argument("point outside the unit disk");
  const double d = std::hypot(x[0] - y[0], x[1] - y[1]);
  if (d == 0.0) throw std::invalid_argument("coincident points");
  return -std::log(d) / kTwoPi + regular_part(x, y);
}

double regular_part(const Point& x, const Point& y) {
  require_inside(y);
  // |x - y*| |y| = | x |y| - y/|y| |, which is 1 at y = 0.
  const double ny = std::sqrt(norm2(y));
  if (ny == 0.0) return 0.0;
  const double a = x[0] * ny - y[0] / ny, b = x[1] * ny - y[1] / ny;
  return std::log(std::hypot(a, b)) / kTwoPi;
}

double robin_disk(const Point& x) {
  require_inside(x);
  return std::log1p(-norm2(x)) / kTwoPi;
}

Point robin_gradient(const Point& x) {
  require_inside(x);
  const double c = -1.0 / (std::numbers::pi * (1.0 - norm2(x)));
  return {c * x[0], c * x[1]};
}

Point grad_x_regular(const Point& x, const Point& y) {
  require_inside(y);
  const double ny = std::sqrt(norm2(y));
  if (ny == 0.0) return {0.0, 0.0};
  const double a = x[0] * ny - y[0] / ny, b = x[1] * ny - y[1] / ny;
  const double c = ny / (kTwoPi * (a * a + b * b));
  return {c * a, c * b};
}

Point grad_x_green(const Point& x, const Point& y) {
  const double dx = x[0] - y[0], dy = x[1] - y[1];
  const double d2 = dx * dx + dy * dy;
  if (d2 == 0.0) throw std::invalid_argument("coincident points");
  const Point h = grad_x_regular(x, y);
  return {-dx / (kTwoPi * d2) + h[0], -dy / (kTwoPi * d2) + h[1]};
}

std::vector<double> check_balance(const std::vector<Point>& points, const std::vector<double>& masses) {
  if (points.size() != masses.size()) throw std::invalid_argument("one mass per point");
  std::vector<double> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    require_inside(points[i]);
    Point g = grad_x_regular(points[i], points[i]);
    g = {masses[i] * g[0], masses[i] * g[1]};
    for (std::size_t l = 0; l < points.size(); ++l) {
      if (l == i) continue;
      const Point t = grad_x_green(points[i], points[l]);
      g[0] += masses[l] * t[0];
      g[1] += masses[l] * t[1];
    }
    out.push_back(std::hypot(g[0], g[1]));
  }
  return out;
}

double green_limit_residual(const FieldView& f, const std::vector<Point>& points, const std::vector<double>& masses,
                            const TestAnnulus& set) {
  if (points.size() != masses.size() || points.empty()) throw std::invalid_argument("one mass per point");
  double worst = 0.0, scale = 0.0;
  for (const Point& x : set.samples()) {
    double model = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) model += 8.0 * std::numbers::pi * masses[i] * green_disk(x, points[i]);
    worst = std::max(worst, std::abs(f.p * f.eval(x) - model));
    scale = std::max(scale, std::abs(model));
  }
  return worst / scale;
}

std::vector<double> estimate_masses(const FieldView& f, const ConcentrationReport& report) {
  std::vector<double> m;
  for (int i = 0; i < report.k(); ++i) {
    const double radius = 10.0 * std::exp(report.log_mu[i]);
    double best = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) {
      const double d = std::hypot(f.nodes[n][0] - report.points[i][0], f.nodes[n][1] - report.points[i][1]);
      if (d <= radius) best = std::max(best, std::abs(f.values[n]));
    }
    m.push_back(best);
  }
  return m;
}

std::vector<GreenLimitRow> check_green_limit(const std::vector<FieldView>& family,
                                             const std::vector<ConcentrationReport>& reports, const TestAnnulus& set) {
  if (family.size() != reports.size()) throw std::invalid_argument("one report per family member");
  std::vector<GreenLimitRow> rows;
  for (std::size_t n = 0; n < family.size(); ++n) {
    const FieldView& f = family[n];
    if (f.domain.kind != DomainKind::UnitDisk) throw std::invalid_argument("the Green limit check runs on the disk");
    const ConcentrationReport& rep = reports[n];
    for (int i = 0; i < rep.k(); ++i) {
      const double r = std::hypot(rep.points[i][0], rep.points[i][1]);
      const double gap = std::max({set.inner - r, r - set.outer, 0.0});
      if (gap < 10.0 * std::exp(rep.log_mu[i])) throw std::invalid_argument("test set meets a concentration neighborhood");
    }
    GreenLimitRow row;
    row.p = f.p;
    row.masses = estimate_masses(f, rep);
    // Signed masses so that nodal families are handled (exploratory there).
    std::vector<double> signed_m = row.masses;
    for (int i = 0; i < rep.k(); ++i)
      if (rep.peaks[i] < 0.0) signed_m[i] = -signed_m[i];
    row.residual = green_limit_residual(f, rep.points, signed_m, set);
    for (double m : row.masses) row.mass_energy += 8.0 * std::numbers::pi * m * m;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace le
