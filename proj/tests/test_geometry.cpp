#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lane_emden/geometry.hpp"

#include <cmath>
#include <numbers>

using namespace le;

TEST_CASE("domain validation rejects degenerate shapes") {
  CHECK_THROWS_AS(DomainSpec::annulus(1.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec::rectangle(0.0, 1.0).validate(), std::invalid_argument);
  CHECK_NOTHROW(DomainSpec::annulus(0.5).validate());
}

TEST_CASE("containment") {
  const DomainSpec a = DomainSpec::annulus(0.5);
  CHECK(a.contains({0.7, 0.0}));
  CHECK_FALSE(a.contains({0.2, 0.1}));
  const DomainSpec sq = DomainSpec::rectangle(1.0, 1.0);
  CHECK(sq.contains({0.49, -0.49}));
  CHECK_FALSE(sq.contains({0.6, 0.0}));
}

TEST_CASE("radial meshes are increasing and span the domain") {
  const RadialMesh u = build_radial_mesh(DomainSpec::unit_disk(), 101, Grading::uniform());
  REQUIRE(u.size() == 101);
  CHECK(u.r.front() == 0.0);
  CHECK(u.r.back() == doctest::Approx(1.0).epsilon(1e-15));

  const RadialMesh g = build_radial_mesh(DomainSpec::unit_disk(), 400, Grading::log_graded(1e-6));
  for (std::size_t i = 1; i < g.size(); ++i) REQUIRE(g.r[i] > g.r[i - 1]);
  CHECK(g.r.back() == doctest::Approx(1.0));
  // The geometric block starts a decade below the focus.
  CHECK(g.r[g.geometric_begin] == doctest::Approx(1e-7).epsilon(1e-9));

  CHECK_THROWS(build_radial_mesh(DomainSpec::annulus(0.5), 400, Grading::log_graded(1e-3)));
  CHECK_THROWS(build_radial_mesh(DomainSpec::unit_disk(), 10, Grading::uniform()));
}

TEST_CASE("polar cell areas tile the disk and the annulus") {
  const PlanarGrid d = build_planar_grid(DomainSpec::unit_disk(), 64);
  double area = 0.0;
  for (double w : d.weight) area += w;
  CHECK(area == doctest::Approx(std::numbers::pi).epsilon(1e-12));

  PolarOptions po;
  po.r_min = 1e-4;
  po.ntheta = 32;
  const PlanarGrid g = build_planar_grid(DomainSpec::unit_disk(), 80, po);
  area = 0.0;
  for (double w : g.weight) area += w;
  CHECK(area == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(g.ntheta == 32);

  const PlanarGrid a = build_planar_grid(DomainSpec::annulus(0.5), 64);
  area = 0.0;
  for (double w : a.weight) area += w;
  CHECK(area == doctest::Approx(std::numbers::pi * 0.75).epsilon(1e-12));
}

TEST_CASE("cartesian grid of the unit square") {
  const PlanarGrid g = build_planar_grid(DomainSpec::rectangle(1.0, 1.0), 33);
  CHECK(g.kind == GridKind::Cartesian);
  CHECK(g.size() == 31u * 31u);
  CHECK(g.h == doctest::Approx(1.0 / 32.0));
  for (const Point& x : g.nodes) REQUIRE(g.domain.contains(x));
  CHECK_THROWS(build_planar_grid(DomainSpec::rectangle(1.0, 1.0), 8));
}
