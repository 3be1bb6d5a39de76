#include "lane_emden/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace le {

DomainSpec DomainSpec::unit_disk() { return {}; }

DomainSpec DomainSpec::annulus(double a) {
  DomainSpec d;
  d.kind = DomainKind::Annulus;
  d.inner = a;
  d.validate();
  return d;
}

DomainSpec DomainSpec::rectangle(double w, double h) {
  DomainSpec d;
  d.kind = DomainKind::Rectangle;
  d.width = w;
  d.height = h;
  d.validate();
  return d;
}

DomainSpec DomainSpec::disk_sector(int s) {
  DomainSpec d;
  d.kind = DomainKind::DiskSector;
  d.order = s;
  d.validate();
  return d;
}

void DomainSpec::validate() const {
  switch (kind) {
    case DomainKind::UnitDisk:
      break;
    case DomainKind::Annulus:
      if (!(inner > 0.0 && inner < 1.0))
        throw std::invalid_argument("annulus inner radius must lie in (0,1)");
      break;
    case DomainKind::Rectangle:
      if (!(width > 0.0 && height > 0.0))
        throw std::invalid_argument("rectangle sides must be positive");
      break;
    case DomainKind::DiskSector:
      if (order < 1) throw std::invalid_argument("symmetry order must be >= 1");
      break;
  }
}

bool DomainSpec::contains(const Point& x) const {
  const double r = std::hypot(x[0], x[1]);
  switch (kind) {
    case DomainKind::Rectangle:
      return std::abs(x[0]) < 0.5 * width && std::abs(x[1]) < 0.5 * height;
    case DomainKind::Annulus:
      return r > inner && r < 1.0;
    default:
      return r < 1.0;
  }
}

std::string DomainSpec::name() const {
  switch (kind) {
    case DomainKind::UnitDisk: return "disk";
    case DomainKind::Annulus: return "annulus";
    case DomainKind::Rectangle: return "rectangle";
    case DomainKind::DiskSector: return "sector";
  }
  return "?";
}

int graded_node_count(double focus, double dt) {
  const double span = std::log(10.0 / focus);
  return std::max(32, static_cast<int>(std::ceil(span / dt)) + 1);
}

RadialMesh build_radial_mesh(const DomainSpec& domain, int n, Grading grading) {
  domain.validate();
  if (domain.kind == DomainKind::Rectangle || domain.kind == DomainKind::DiskSector)
    throw std::invalid_argument("radial meshes need a disk or an annulus");
  if (n < 64) throw std::invalid_argument("radial mesh needs at least 64 nodes");

  RadialMesh mesh;
  mesh.grading = grading;
  mesh.r.resize(n);
  const double r0 = domain.kind == DomainKind::Annulus ? domain.inner : 0.0;

  if (grading.kind == GradingKind::Uniform) {
    for (int i = 0; i < n; ++i) mesh.r[i] = r0 + (1.0 - r0) * i / (n - 1);
    mesh.r.back() = 1.0;
    return mesh;
  }

  if (domain.kind == DomainKind::Annulus)
    throw std::invalid_argument("log-graded meshes are only defined for the disk");
  if (!(grading.focus > 0.0 && grading.focus < 1.0))
    throw std::invalid_argument("grading focus must lie in (0,1)");

  const int n_geo = n - n / 2;
  const int n_lin = n / 2;
  const double lo = std::log(grading.focus / 10.0);
  for (int i = 0; i < n_lin; ++i)
    mesh.r[i] = (grading.focus / 10.0) * i / n_lin;
  for (int i = 0; i < n_geo; ++i)
    mesh.r[n_lin + i] = std::exp(lo * (1.0 - static_cast<double>(i) / (n_geo - 1)));
  mesh.r.back() = 1.0;
  mesh.geometric_begin = n_lin;
  return mesh;
}

Point PlanarGrid::lattice_point(int ix, int iy) const {
  return {-0.5 * domain.width + ix * h, -0.5 * domain.height + iy * h};
}

double PlanarGrid::cell_size() const {
  if (kind == GridKind::Cartesian) return h * std::numbers::sqrt2;
  double worst = 0.0;
  for (int i = 0; i < nr; ++i)
    worst = std::max(worst, std::hypot(rf[i + 1] - rf[i], rf[i + 1] * dtheta));
  return worst;
}

namespace {

PlanarGrid cartesian_grid(const DomainSpec& domain, int resolution) {
  PlanarGrid g;
  g.domain = domain;
  g.kind = GridKind::Cartesian;
  const double side = std::min(domain.width, domain.height);
  g.h = side / (resolution - 1);
  const double mx = domain.width / g.h, my = domain.height / g.h;
  if (std::abs(mx - std::round(mx)) > 1e-9 * mx || std::abs(my - std::round(my)) > 1e-9 * my)
    throw std::invalid_argument("rectangle sides are not commensurate with the spacing");
  g.nx = static_cast<int>(std::lround(mx)) + 1;
  g.ny = static_cast<int>(std::lround(my)) + 1;
  g.lattice_to_unknown.assign(static_cast<std::size_t>(g.nx) * g.ny, -1);
  for (int iy = 1; iy < g.ny - 1; ++iy)
    for (int ix = 1; ix < g.nx - 1; ++ix) {
      g.lattice_to_unknown[iy * g.nx + ix] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(g.lattice_point(ix, iy));
      g.weight.push_back(g.h * g.h);
    }
  return g;
}

PlanarGrid polar_grid(const DomainSpec& domain, int resolution, PolarOptions opt) {
  PlanarGrid g;
  g.domain = domain;
  g.kind = GridKind::Polar;
  g.nr = resolution;
  const int s = domain.kind == DomainKind::DiskSector ? domain.order : 1;
  const int quantum = std::lcm(4, s);
  int nt = opt.ntheta > 0 ? opt.ntheta : std::max(64, resolution);
  nt = (nt + quantum - 1) / quantum * quantum;
  if (opt.ntheta > 0 && opt.ntheta % s != 0)
    throw std::invalid_argument("angular resolution must be a multiple of the symmetry order");
  g.ntheta = nt;
  g.dtheta = 2.0 * std::numbers::pi / nt;

  const double r0 = domain.kind == DomainKind::Annulus ? domain.inner : 0.0;
  g.rf.resize(g.nr + 1);
  if (opt.r_min > 0.0 && r0 == 0.0) {
    if (opt.r_min >= 1.0 / g.nr) throw std::invalid_argument("r_min too large for grading");
    g.rf[0] = 0.0;
    const double lo = std::log(opt.r_min);
    for (int i = 1; i <= g.nr; ++i)
      g.rf[i] = std::exp(lo * (1.0 - static_cast<double>(i - 1) / (g.nr - 1)));
  } else {
    for (int i = 0; i <= g.nr; ++i) g.rf[i] = r0 + (1.0 - r0) * i / g.nr;
  }
  g.rf.back() = 1.0;
  g.rc.resize(g.nr);
  for (int i = 0; i < g.nr; ++i) g.rc[i] = 0.5 * (g.rf[i] + g.rf[i + 1]);

  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.ntheta; ++j) {
      const double th = (j + 0.5) * g.dtheta;
      g.nodes.push_back({g.rc[i] * std::cos(th), g.rc[i] * std::sin(th)});
      g.weight.push_back(0.5 * (g.rf[i + 1] * g.rf[i + 1] - g.rf[i] * g.rf[i]) * g.dtheta);
    }
  return g;
}

}  // namespace

PlanarGrid build_planar_grid(const DomainSpec& domain, int resolution, PolarOptions polar) {
  domain.validate();
  if (resolution < 32) throw std::invalid_argument("planar resolution must be >= 32");
  PlanarGrid g = domain.kind == DomainKind::Rectangle ? cartesian_grid(domain, resolution)
                                                      : polar_grid(domain, resolution, polar);
  g.resolution = resolution;
  g.polar = polar;
  return g;
}

}  // namespace le
