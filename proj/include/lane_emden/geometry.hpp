#pragma once

#include <array>
#include <string>
#include <vector>

namespace le {

using Point = std::array<double, 2>;

enum class DomainKind { UnitDisk, Annulus, Rectangle, DiskSector };

/// Planar domain. Disk-like domains are centered at the origin; rectangles
/// are centered at the origin as well, so [-w/2, w/2] x [-h/2, h/2].
struct DomainSpec {
  DomainKind kind = DomainKind::UnitDisk;
  double inner = 0.0;   // annulus inner radius
  double width = 1.0;   // rectangle
  double height = 1.0;  // rectangle
  int order = 1;        // rotation symmetry order of a sector domain

  static DomainSpec unit_disk();
  static DomainSpec annulus(double a);
  static DomainSpec rectangle(double w, double h);
  static DomainSpec disk_sector(int s);

  void validate() const;
  bool is_disk_like() const { return kind != DomainKind::Rectangle; }
  bool contains(const Point& x) const;
  std::string name() const;
};

enum class GradingKind { Uniform, LogGraded };

struct Grading {
  GradingKind kind = GradingKind::Uniform;
  double focus = 1.0;  // bubble scale resolved by a LogGraded mesh

  static Grading uniform() { return {}; }
  static Grading log_graded(double mu) { return {GradingKind::LogGraded, mu}; }
};

struct RadialMesh {
  std::vector<double> r;
  Grading grading;
  // LogGraded meshes: index of the first node of the geometric block.
  std::size_t geometric_begin = 0;

  std::size_t size() const { return r.size(); }
};

/// Uniform meshes have n nodes. LogGraded meshes put n/2 nodes on a geometric
/// progression from focus/10 to 1 and the rest uniformly on [0, focus/10).
RadialMesh build_radial_mesh(const DomainSpec& domain, int n, Grading grading);

/// Geometric-block node count giving roughly dt log-spacing for a given focus.
int graded_node_count(double focus, double dt = 0.01);

enum class GridKind { Cartesian, Polar };

/// Interior unknowns of a planar discretization. Boundary values are zero.
///
/// Cartesian grids use a lattice of nx x ny nodes including the boundary.
/// Polar grids are cell centered: unknown (i, j) sits at radius rc[i] and
/// angle (j + 1/2) * dtheta, with faces rf[0..nr] and Dirichlet data on the
/// outer face (and on the inner face for an annulus).
struct PolarOptions {
  int ntheta = 0;         // 0 picks a default compatible with the symmetry order
  double r_min = 0.0;     // > 0 requests geometric radial faces from r_min
};

struct PlanarGrid {
  DomainSpec domain;
  GridKind kind = GridKind::Cartesian;
  int resolution = 0;  // construction arguments, enough to rebuild the grid
  PolarOptions polar;

  double h = 0.0;
  int nx = 0, ny = 0;
  std::vector<int> lattice_to_unknown;  // -1 on boundary nodes

  int nr = 0, ntheta = 0;
  std::vector<double> rf, rc;
  double dtheta = 0.0;

  std::vector<Point> nodes;    // interior unknowns
  std::vector<double> weight;  // cell areas, the diagonal mass matrix

  std::size_t size() const { return nodes.size(); }
  int polar_index(int i, int j) const { return i * ntheta + j; }
  Point lattice_point(int ix, int iy) const;
  /// Largest cell diameter; a proxy for "one cell".
  double cell_size() const;
};

PlanarGrid build_planar_grid(const DomainSpec& domain, int resolution,
                             PolarOptions polar = {});

}  // namespace le
