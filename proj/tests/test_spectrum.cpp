#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lane_emden/spectrum.hpp"

#include <cmath>
#include <functional>
#include <numbers>

using namespace le;

namespace {

// J0 by its power series, first zero by bisection.
double j0_series(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0) / (k * k);
    sum += term;
  }
  return sum;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b), fm = f(m);
    if ((fm < 0) == (fa < 0)) a = m, fa = fm;
    else b = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("disk and annulus first eigenvalues against Bessel oracles") {
  const double j01 = bisect(j0_series, 2.0, 3.0);
  const DomainSpec d = DomainSpec::unit_disk();
  CHECK(first_eigenvalue(d, build_radial_mesh(d, 2001, Grading::uniform())) == doctest::Approx(j01 * j01).epsilon(1e-5));

  const double a = 0.5;
  const double k = bisect([a](double k) {
    return std::cyl_bessel_j(0.0, k * a) * std::cyl_neumann(0.0, k) - std::cyl_bessel_j(0.0, k) * std::cyl_neumann(0.0, k * a);
  }, 5.0, 7.0);
  const DomainSpec an = DomainSpec::annulus(a);
  CHECK(first_eigenvalue(an, build_radial_mesh(an, 2001, Grading::uniform())) == doctest::Approx(k * k).epsilon(1e-5));
  CHECK(k * k == doctest::Approx(39.0133).epsilon(1e-5));

  const PlanarGrid g = build_planar_grid(d, 128);
  CHECK(first_eigenvalue(d, g) == doctest::Approx(j01 * j01).epsilon(1e-3));
}

TEST_CASE("square first eigenvalue") {
  const PlanarGrid g = build_planar_grid(DomainSpec::rectangle(1.0, 1.0), 129);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(first_eigenvalue(g.domain, g) == doctest::Approx(2 * pi2).epsilon(1e-4));
  const DirichletEigenpair e = first_dirichlet_eigenpair(assemble_operator(g));
  CHECK(e.phi.minCoeff() >= 0.0);
}

TEST_CASE("radial Morse indices") {
  const RadialSolution pos = solve_radial(5.0, 0, DomainSpec::unit_disk());
  const SpectrumReport r = morse_index_radial(pos);
  CHECK(r.total == 1);
  CHECK_FALSE(r.indeterminate);

  const RadialSolution nod = solve_radial(200.0, 1, DomainSpec::unit_disk());
  const SpectrumReport n = morse_index_radial(nod);
  CHECK(n.total == 12);
  int sum = 0;
  for (const ModeCount& m : n.modes) sum += m.j == 0 ? m.negative : 2 * m.negative;
  CHECK(sum == n.total);
  // The smallest eigenvalue of each mode increases with j.
  for (std::size_t i = 1; i < n.modes.size(); ++i) CHECK(n.modes[i].eigenvalues[0] > n.modes[i - 1].eigenvalues[0]);
}

TEST_CASE("planar quadratic form on a solution equals (1 - p) times the L^(p+1) sum") {
  auto g = std::make_shared<const PlanarGrid>(build_planar_grid(DomainSpec::rectangle(1.0, 1.0), 49));
  const double p = 3.0;
  const PlanarField f = solve_positive(p, g);
  double lp1 = 0.0;
  for (Eigen::Index i = 0; i < f.u.size(); ++i) lp1 += g->weight[i] * std::pow(std::abs(f.u[i]), p + 1);
  CHECK(quadratic_form(f, f.u) == doctest::Approx((1 - p) * lp1).epsilon(1e-7));
  CHECK(morse_index_planar(f).index() == 1);
}

TEST_CASE("planar Morse indices at p = 5") {
  auto disk = std::make_shared<const PlanarGrid>(build_planar_grid(DomainSpec::unit_disk(), 64));
  CHECK(morse_index_planar(solve_positive(5.0, disk)).index() == 1);
  auto sq = std::make_shared<const PlanarGrid>(build_planar_grid(DomainSpec::rectangle(1.0, 1.0), 49));
  PlanarOptions o;
  o.antisymmetric = true;
  const PlanarMorse m = morse_index_planar(solve_nodal(5.0, sq, o));
  CHECK(m.index() == 2);
  CHECK(m.ritz == 2);
}
