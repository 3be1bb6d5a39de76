#include "lane_emden/asymptotics.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace le {

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }
double norm(const Point& a) { return std::hypot(a[0], a[1]); }

// Bilinear interpolation on the lattice, zero on the boundary.
double eval_cartesian(const PlanarGrid& g, const Eigen::VectorXd& u, const Point& x) {
  const double fx = (x[0] + 0.5 * g.domain.width) / g.h, fy = (x[1] + 0.5 * g.domain.height) / g.h;
  if (fx < 0.0 || fy < 0.0 || fx > g.nx - 1 || fy > g.ny - 1) return 0.0;
  const int ix = std::min(static_cast<int>(fx), g.nx - 2), iy = std::min(static_cast<int>(fy), g.ny - 2);
  const double wx = fx - ix, wy = fy - iy;
  auto at = [&](int a, int b) {
    const int k = g.lattice_to_unknown[b * g.nx + a];
    return k < 0 ? 0.0 : u[k];
  };
  return (1 - wx) * (1 - wy) * at(ix, iy) + wx * (1 - wy) * at(ix + 1, iy) + (1 - wx) * wy * at(ix, iy + 1) +
         wx * wy * at(ix + 1, iy + 1);
}

double ring_mean(const PlanarGrid& g, const Eigen::VectorXd& u, int i) {
  double s = 0.0;
  for (int j = 0; j < g.ntheta; ++j) s += u[g.polar_index(i, j)];
  return s / g.ntheta;
}

// Linear in r between ring centers, linear in theta; Dirichlet data at the
// boundary radii and the ring-0 mean at the disk center.
double eval_polar(const PlanarGrid& g, const Eigen::VectorXd& u, const Point& x) {
  const double r = norm(x);
  const double r0 = g.domain.kind == DomainKind::Annulus ? g.domain.inner : 0.0;
  if (r >= 1.0 || r < r0) return 0.0;
  double th = std::atan2(x[1], x[0]);
  if (th < 0.0) th += 2.0 * std::numbers::pi;
  const double t = th / g.dtheta - 0.5;
  const int jf = static_cast<int>(std::floor(t));
  const double w = t - jf;
  const int j0 = (jf % g.ntheta + g.ntheta) % g.ntheta, j1 = (j0 + 1) % g.ntheta;
  auto ring = [&](int i) { return (1.0 - w) * u[g.polar_index(i, j0)] + w * u[g.polar_index(i, j1)]; };
  if (r <= g.rc[0]) {
    const double inner = r0 > 0.0 ? 0.0 : ring_mean(g, u, 0);
    return inner + (ring(0) - inner) * (r - r0) / (g.rc[0] - r0);
  }
  if (r >= g.rc[g.nr - 1]) return ring(g.nr - 1) * (1.0 - r) / (1.0 - g.rc[g.nr - 1]);
  const int i = static_cast<int>(std::upper_bound(g.rc.begin(), g.rc.end(), r) - g.rc.begin()) - 1;
  const double a = (r - g.rc[i]) / (g.rc[i + 1] - g.rc[i]);
  return (1.0 - a) * ring(i) + a * ring(i + 1);
}

std::vector<double> planar_gradient(const PlanarGrid& g, const Eigen::VectorXd& u) {
  std::vector<double> grad(g.size());
  if (g.kind == GridKind::Cartesian) {
    auto at = [&](int a, int b) {
      const int k = g.lattice_to_unknown[b * g.nx + a];
      return k < 0 ? 0.0 : u[k];
    };
    for (int iy = 1; iy < g.ny - 1; ++iy)
      for (int ix = 1; ix < g.nx - 1; ++ix) {
        const double gx = (at(ix + 1, iy) - at(ix - 1, iy)) / (2 * g.h);
        const double gy = (at(ix, iy + 1) - at(ix, iy - 1)) / (2 * g.h);
        grad[g.lattice_to_unknown[iy * g.nx + ix]] = std::hypot(gx, gy);
      }
    return grad;
  }
  const bool annulus = g.domain.kind == DomainKind::Annulus;
  const double center = annulus ? 0.0 : ring_mean(g, u, 0);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.ntheta; ++j) {
      const double rin = i > 0 ? g.rc[i - 1] : (annulus ? g.domain.inner : 0.0);
      const double uin = i > 0 ? u[g.polar_index(i - 1, j)] : (annulus ? 0.0 : center);
      const double rout = i + 1 < g.nr ? g.rc[i + 1] : 1.0;
      const double uout = i + 1 < g.nr ? u[g.polar_index(i + 1, j)] : 0.0;
      const double gr = (uout - uin) / (rout - rin);
      const double gt = (u[g.polar_index(i, (j + 1) % g.ntheta)] - u[g.polar_index(i, (j + g.ntheta - 1) % g.ntheta)]) /
                        (2.0 * g.rc[i] * g.dtheta);
      grad[g.polar_index(i, j)] = std::hypot(gr, gt);
    }
  return grad;
}

}  // namespace

FieldView view_of(const RadialSolution& sol) {
  FieldView f;
  f.p = sol.p;
  f.domain = sol.domain;
  f.radial = true;
  const auto& r = sol.mesh.r;
  for (std::size_t i = 0; i < r.size(); ++i) {
    f.nodes.push_back({r[i], 0.0});
    f.values.push_back(sol.u[i]);
    f.grad.push_back(std::abs(sol.du[i]));
    if (i > 0) f.cell = std::max(f.cell, r[i] - r[i - 1]);
  }
  for (double z : sol.zeros) f.zero_set.push_back({z, 0.0});
  auto shared = std::make_shared<const RadialSolution>(sol);
  f.eval = [shared](const Point& x) {
    const double rr = norm(x);
    return rr > 1.0 ? 0.0 : shared->value_at(rr);
  };
  return f;
}

FieldView view_of(const PlanarField& field) {
  if (!field.grid) throw std::invalid_argument("field without a grid");
  FieldView f;
  f.p = field.p;
  f.domain = field.grid->domain;
  f.nodes = field.grid->nodes;
  f.values.assign(field.u.data(), field.u.data() + field.u.size());
  f.grad = planar_gradient(*field.grid, field.u);
  f.cell = field.grid->cell_size();
  if (field.u.size() && field.u.maxCoeff() > 0.0 && field.u.minCoeff() < 0.0) f.zero_set = nodal_line_geometry(field).points;
  auto grid = field.grid;
  auto u = std::make_shared<const Eigen::VectorXd>(field.u);
  if (grid->kind == GridKind::Cartesian)
    f.eval = [grid, u](const Point& x) { return eval_cartesian(*grid, *u, x); };
  else
    f.eval = [grid, u](const Point& x) { return eval_polar(*grid, *u, x); };
  return f;
}

FieldView synthetic_bubbles(double p, double m, const std::vector<Point>& centers) {
  if (centers.empty()) throw std::invalid_argument("no bubble centers");
  const double mu = std::exp(log_scale(p, m));
  FieldView f;
  f.p = p;
  f.domain = DomainSpec::unit_disk();
  auto value = [p, m, mu, centers](const Point& x) {
    double s = 0.0;
    for (const Point& c : centers) s += m * std::max(0.0, 1.0 + eval_U_radial(dist(x, c) / mu) / p);
    return s;
  };
  auto gradient = [p, m, mu, centers](const Point& x) {
    double gx = 0.0, gy = 0.0;
    for (const Point& c : centers) {
      const double rho = dist(x, c), s = rho / mu;
      if (rho == 0.0 || 1.0 + eval_U_radial(s) / p <= 0.0) continue;
      const double dU = -(s / 2.0) / (1.0 + s * s / 8.0);  // U'(s)
      const double dr = m / p * dU / mu;
      gx += dr * (x[0] - c[0]) / rho;
      gy += dr * (x[1] - c[1]) / rho;
    }
    return std::hypot(gx, gy);
  };
  auto add = [&](const Point& x) {
    if (!f.domain.contains(x)) return;
    f.nodes.push_back(x);
    f.values.push_back(value(x));
    f.grad.push_back(gradient(x));
  };
  for (const Point& c : centers) {
    add(c);
    for (double rho = 1e-2 * mu; rho < 0.25; rho *= std::pow(10.0, 0.05))
      for (int j = 0; j < 32; ++j) {
        const double th = 2.0 * std::numbers::pi * (j + 0.5) / 32;
        add({c[0] + rho * std::cos(th), c[1] + rho * std::sin(th)});
      }
  }
  const double h = 0.02;
  for (double y = -1.0 + h / 2; y < 1.0; y += h)
    for (double x = -1.0 + h / 2; x < 1.0; x += h) add({x, y});
  f.cell = h;
  f.eval = value;
  return f;
}

double log_scale(double p, double value) {
  if (value == 0.0) throw std::invalid_argument("scale of a zero value");
  return -0.5 * (std::log(p) + (p - 1.0) * std::log(std::abs(value)));
}

double scale_of(const FieldView& f, const Point& x) { return std::exp(log_scale(f.p, f.eval(x))); }

double scale_of(const RadialSolution& sol, double r) { return std::exp(log_scale(sol.p, sol.value_at(r))); }

RescaledProfile rescale(const FieldView& f, const Point& center, double mu, double window, int side,
                        bool allow_truncation) {
  if (!(mu > 0.0) || !(window > 0.0) || side < 9) throw std::invalid_argument("bad rescaling window");
  const double uc = f.eval(center);
  if (uc == 0.0) throw std::invalid_argument("rescaling about a zero of u");
  RescaledProfile prof;
  prof.center = center;
  prof.mu = mu;
  prof.sign = uc > 0.0 ? 1 : -1;
  prof.p = f.p;
  prof.window = window;
  const double c = norm(center);
  if (c > 0.0) prof.axis = {center[0] / c, center[1] / c};
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b) {
      const Point x{window * (2.0 * a / (side - 1) - 1.0), window * (2.0 * b / (side - 1) - 1.0)};
      if (norm(x) > window * (1.0 + 1e-12)) continue;
      const Point y{center[0] + mu * x[0], center[1] + mu * x[1]};
      if (!f.domain.contains(y)) {
        if (!allow_truncation) throw std::invalid_argument("rescaling window leaves the domain");
        prof.truncated = true;
        continue;
      }
      prof.x.push_back(x);
      prof.v.push_back(f.p / uc * (f.eval(y) - uc));
    }
  return prof;
}

double log_p3_density(const FieldView& f, std::size_t i, const std::vector<Point>& centers) {
  const double u = f.values[i];
  if (u == 0.0) return -INFINITY;
  double R = INFINITY;
  for (const Point& c : centers) R = std::min(R, dist(f.nodes[i], c));
  if (!(R > 0.0)) return -INFINITY;
  return std::log(f.p) + 2.0 * std::log(R) + (f.p - 1.0) * std::log(std::abs(u));
}

ConcentrationReport extract_concentration_points(const FieldView& f, double cstar, double separation_cutoff) {
  if (f.size() == 0) throw std::invalid_argument("empty field");
  if (!(cstar > 0.0)) throw std::invalid_argument("C* must be positive");
  ConcentrationReport rep;
  rep.cstar = cstar;
  rep.separation_cutoff = separation_cutoff;

  std::size_t top = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (std::abs(f.values[i]) > std::abs(f.values[top])) top = i;
  if (f.values[top] == 0.0) throw std::invalid_argument("field vanishes identically");
  auto add = [&](std::size_t i) {
    rep.points.push_back(f.nodes[i]);
    rep.log_mu.push_back(log_scale(f.p, f.values[i]));
    rep.peaks.push_back(f.values[i]);
  };
  add(top);

  const double log_cstar = std::log(cstar);
  while (true) {
    double best = -INFINITY;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = log_p3_density(f, i, rep.points);
      if (d > best) best = d, arg = i;
    }
    rep.p3 = std::exp(best);
    rep.next_candidate = f.nodes[arg];
    if (best <= log_cstar) {
      rep.stop = StopReason::Threshold;
      break;
    }
    if (rep.k() >= 16) {
      rep.stop = StopReason::Guard;
      break;
    }
    // P1 separation of the candidate from every extracted point.
    const double lmu = log_scale(f.p, f.values[arg]);
    bool separated = true;
    for (int j = 0; j < rep.k(); ++j) {
      const double lm = std::max(lmu, rep.log_mu[j]);
      if (std::log(dist(f.nodes[arg], rep.points[j])) - lm < std::log(separation_cutoff)) separated = false;
    }
    if (!separated) {
      rep.stop = StopReason::Separation;
      break;
    }
    add(arg);
  }

  double p4 = -INFINITY;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.grad[i] == 0.0) continue;
    double R = INFINITY;
    for (const Point& c : rep.points) R = std::min(R, dist(f.nodes[i], c));
    if (R > 0.0) p4 = std::max(p4, std::log(f.p) + std::log(R) + std::log(f.grad[i]));
  }
  rep.p4 = std::exp(p4);

  const int k = rep.k();
  rep.separation.assign(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) rep.separation[i][j] = std::exp(std::log(dist(rep.points[i], rep.points[j])) - rep.log_mu[i]);
  return rep;
}

namespace {

EnergyReport fill(EnergyReport e, double slack, bool nodal) {
  e.nodal = nodal;
  const double bound = kEightPiE * (1.0 - slack);
  e.whole_above = e.p_dirichlet >= bound;
  e.plus_above = nodal && e.p_dirichlet_plus >= bound;
  e.minus_above = nodal && e.p_dirichlet_minus >= bound;
  return e;
}

}  // namespace

EnergyReport energy_report(const RadialSolution& sol, double slack) {
  const RadialEnergy r = radial_energy(sol);
  EnergyReport e;
  e.two_pE = 2.0 * r.pE;
  e.p_dirichlet = r.p_dirichlet;
  e.p_lp1 = r.p_lp1;
  e.p_lp = r.p_lp;
  e.p_dirichlet_plus = r.p_dirichlet_plus;
  e.p_dirichlet_minus = r.p_dirichlet_minus;
  e.p_lp1_plus = r.p_lp1_plus;
  e.p_lp1_minus = r.p_lp1_minus;
  return fill(e, slack, sol.nodal_count > 0);
}

EnergyReport energy_report(const PlanarField& field, double slack) {
  const PlanarEnergy r = planar_energy(assemble_operator(*field.grid), field.u, field.p);
  EnergyReport e;
  e.two_pE = 2.0 * r.pE;
  e.p_dirichlet = r.p_dirichlet;
  e.p_lp1 = r.p_lp1;
  e.p_lp = r.p_lp;
  e.p_dirichlet_plus = r.p_dirichlet_plus;
  e.p_dirichlet_minus = r.p_dirichlet_minus;
  e.p_lp1_plus = r.p_lp1_plus;
  e.p_lp1_minus = r.p_lp1_minus;
  return fill(e, slack, field.u.maxCoeff() > 0.0 && field.u.minCoeff() < 0.0);
}

BubbleFit fit_bubble(const RescaledProfile& prof, ProfileKind family) {
  if (prof.v.size() < 64) throw std::invalid_argument("bubble fit needs at least 64 samples");
  const std::size_t n = prof.v.size();
  BubbleFit fit;
  fit.family = family;
  auto misfit = [&](double ell, double* sup) {
    const SingularProfileParams q = family == ProfileKind::Singular ? singular_params(ell) : SingularProfileParams{};
    double ss = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& x = prof.x[i];
      double model;
      if (family == ProfileKind::Regular) {
        model = eval_U(x);
      } else {
        const double d = std::hypot(x[0] + ell * prof.axis[0], x[1] + ell * prof.axis[1]);
        model = eval_V(d, q);
        if (!std::isfinite(model)) model = -1e6;
      }
      const double e = prof.v[i] - model;
      ss += e * e;
      worst = std::max(worst, std::abs(e));
    }
    if (sup) *sup = worst;
    return ss / n;
  };
  if (family == ProfileKind::Regular) {
    fit.rms = std::sqrt(misfit(0.0, &fit.residual));
    return fit;
  }
  // Coarse scan in log ell, then Brent inside the bracketing cell.
  const int N = 120;
  const double lo = std::log(0.02), hi = std::log(100.0);
  std::vector<double> vals(N + 1);
  int best = 0;
  for (int i = 0; i <= N; ++i) {
    vals[i] = misfit(std::exp(lo + (hi - lo) * i / N), nullptr);
    if (vals[i] < vals[best]) best = i;
  }
  if (best == 0 || best == N) throw SolverError("singular bubble fit: minimum at the edge of the ell bracket");
  auto obj = [&](double t) { return misfit(std::exp(t), nullptr); };
  const auto r = boost::math::tools::brent_find_minima(obj, lo + (hi - lo) * (best - 1) / N,
                                                       lo + (hi - lo) * (best + 1) / N,
                                                       std::numeric_limits<double>::digits / 2);
  fit.ell = std::exp(r.first);
  fit.rms = std::sqrt(misfit(fit.ell, &fit.residual));
  return fit;
}

Point refine_extremum(const FieldView& f, std::size_t i) {
  if (!f.radial || f.nodes[i][0] == 0.0) return f.nodes[i];
  const double sgn = f.values[i] > 0.0 ? -1.0 : 1.0;
  const double lo = i > 0 ? f.nodes[i - 1][0] : f.nodes[i][0];
  const double hi = i + 1 < f.size() ? f.nodes[i + 1][0] : f.nodes[i][0];
  // Brent's absolute tolerance is not scale aware; search in s in [0, 1].
  const auto r = boost::math::tools::brent_find_minima(
      [&](double s) { return sgn * f.eval({lo + s * (hi - lo), 0.0}); }, 0.0, 1.0,
      std::numeric_limits<double>::digits / 2);
  return {lo + r.first * (hi - lo), 0.0};
}

NodalMetrics nodal_metrics(const FieldView& f) {
  std::size_t ip = 0, im = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values[i] > f.values[ip]) ip = i;
    if (f.values[i] < f.values[im]) im = i;
  }
  if (!(f.values[ip] > 0.0 && f.values[im] < 0.0)) throw std::invalid_argument("nodal metrics need a sign-changing field");
  if (f.zero_set.empty()) throw std::invalid_argument("zero set not available");
  NodalMetrics m;
  m.x_plus = refine_extremum(f, ip);
  m.x_minus = refine_extremum(f, im);
  m.log_mu_plus = log_scale(f.p, f.eval(m.x_plus));
  m.log_mu_minus = log_scale(f.p, f.eval(m.x_minus));
  m.mu_plus = std::exp(m.log_mu_plus);
  m.mu_minus = std::exp(m.log_mu_minus);
  // Radial views hold one point per zero circle; distances to a circle of
  // radius z from a point at radius r are |r - z|.
  auto to_set = [&](const Point& x) {
    double d = INFINITY;
    for (const Point& z : f.zero_set) d = std::min(d, f.radial ? std::abs(norm(x) - norm(z)) : dist(x, z));
    return d;
  };
  for (const Point& z : f.zero_set) m.nl_max_radius = std::max(m.nl_max_radius, norm(z));
  m.dist_plus = to_set(m.x_plus);
  m.dist_minus = to_set(m.x_minus);
  m.mu_ratio = std::exp(m.log_mu_plus - m.log_mu_minus);
  m.nl_over_mu_minus = std::exp(std::log(m.nl_max_radius) - m.log_mu_minus);
  m.dist_plus_over_mu = std::exp(std::log(m.dist_plus) - m.log_mu_plus);
  m.dist_minus_over_mu = std::exp(std::log(m.dist_minus) - m.log_mu_minus);
  return m;
}

std::vector<Point> TestAnnulus::samples() const {
  std::vector<Point> s;
  for (int i = 0; i < radii; ++i) {
    const double r = inner + (outer - inner) * i / std::max(1, radii - 1);
    for (int j = 0; j < angles; ++j) {
      const double th = 2.0 * std::numbers::pi * j / angles;
      s.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  return s;
}

std::vector<LimitRow> limit_function_check(const std::vector<FieldView>& family, const ConcentrationReport& report,
                                           const TestAnnulus& set) {
  for (int i = 0; i < report.k(); ++i) {
    const double r = norm(report.points[i]);
    const double gap = std::max({set.inner - r, r - set.outer, 0.0});
    if (gap < 10.0 * std::exp(report.log_mu[i])) throw std::invalid_argument("test set meets a concentration neighborhood");
  }
  const std::vector<Point> pts = set.samples();
  std::vector<LimitRow> rows;
  std::vector<double> prev;
  for (std::size_t m = 0; m < family.size(); ++m) {
    const FieldView& f = family[m];
    if (m > 0 && !(f.p > family[m - 1].p)) throw std::invalid_argument("family must be increasing in p");
    LimitRow row;
    row.p = f.p;
    std::vector<double> pu(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double u = f.eval(pts[i]);
      pu[i] = f.p * u;
      row.sqrtp_sup = std::max(row.sqrtp_sup, std::sqrt(f.p) * std::abs(u));
    }
    if (!prev.empty()) {
      row.cauchy = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) row.cauchy = std::max(row.cauchy, std::abs(pu[i] - prev[i]));
    }
    prev = std::move(pu);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace le
