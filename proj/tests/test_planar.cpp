#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lane_emden/planar.hpp"
#include "lane_emden/radial.hpp"

#include <cmath>
#include <numbers>

using namespace le;

namespace {

std::shared_ptr<const PlanarGrid> square(int n) {
  return std::make_shared<const PlanarGrid>(build_planar_grid(DomainSpec::rectangle(1.0, 1.0), n));
}

double weighted(const PlanarGrid& g, const Eigen::VectorXd& u, double q, int sign = 0) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (sign == 0 || sign * u[i] > 0) s += g.weight[i] * std::pow(std::abs(u[i]), q);
  return s;
}

}  // namespace

TEST_CASE("Nehari projections satisfy the discrete identities") {
  auto g = square(33);
  const PlanarOperator op = assemble_operator(*g);
  const double p = 4.0;
  Eigen::VectorXd u(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Point& x = g->nodes[i];
    u[i] = std::cos(std::numbers::pi * x[0]) * std::cos(std::numbers::pi * x[1]) * (1.0 + x[0]);
  }
  const Eigen::VectorXd w = nehari_project(op, u, p);
  CHECK(w.dot(op.K * w) == doctest::Approx(weighted(*g, w, p + 1)).epsilon(1e-12));

  Eigen::VectorXd v = u;
  for (std::size_t i = 0; i < g->size(); ++i) v[i] *= std::sin(2 * std::numbers::pi * g->nodes[i][0] + 0.3);
  const Eigen::VectorXd z = nodal_nehari_project(op, v, p);
  const Eigen::VectorXd zp = z.cwiseMax(0.0), zm = z.cwiseMin(0.0);
  CHECK(zp.dot(op.K * z) == doctest::Approx(weighted(*g, z, p + 1, 1)).epsilon(1e-10));
  CHECK(zm.dot(op.K * z) == doctest::Approx(weighted(*g, z, p + 1, -1)).epsilon(1e-10));
}

TEST_CASE("square positive solution is symmetric with its maximum at the center") {
  auto g = square(65);
  const PlanarField f = solve_positive(3.0, g);
  CHECK(f.residual <= 1e-9);
  Eigen::Index imax;
  f.u.maxCoeff(&imax);
  CHECK(std::hypot(g->nodes[imax][0], g->nodes[imax][1]) < 1e-12);
  // Reflection x -> -x maps the lattice onto itself.
  double defect = 0.0;
  for (int iy = 1; iy < g->ny - 1; ++iy)
    for (int ix = 1; ix < g->nx - 1; ++ix) {
      const int a = g->lattice_to_unknown[iy * g->nx + ix], b = g->lattice_to_unknown[iy * g->nx + (g->nx - 1 - ix)];
      defect = std::max(defect, std::abs(f.u[a] - f.u[b]));
    }
  CHECK(defect < 1e-10);
  CHECK(f.u.minCoeff() > 0.0);
}

TEST_CASE("disk solve matches the radial solution") {
  auto g = std::make_shared<const PlanarGrid>(build_planar_grid(DomainSpec::unit_disk(), 128));
  const PlanarField f = solve_positive(3.0, g);
  const RadialSolution r = solve_radial(3.0, 0, DomainSpec::unit_disk());
  double d = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    d = std::max(d, std::abs(f.u[i] - r.value_at(std::hypot(g->nodes[i][0], g->nodes[i][1]))));
  CHECK(d / r.sup_norm() < 0.02);
}

TEST_CASE("discrete energy converges at second order") {
  std::vector<double> e;
  for (int n : {33, 65, 129}) {
    auto g = square(n);
    const PlanarField f = solve_positive(3.0, g);
    e.push_back(planar_energy(assemble_operator(*g), f.u, 3.0).p_dirichlet);
  }
  const double ratio = (e[0] - e[1]) / (e[1] - e[2]);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("continuation follows the branch") {
  auto g = square(49);
  const PlanarField f = solve_positive(3.0, g);
  const auto branch = continue_in_p(f, {4.0, 5.0, 6.0});
  REQUIRE(branch.size() == 3);
  for (const PlanarField& b : branch) CHECK(b.residual <= 1e-9);
  CHECK(branch.back().p == 6.0);
}

TEST_CASE("nodal solution on the square is antisymmetric and changes sign") {
  auto g = square(49);
  PlanarOptions o;
  o.antisymmetric = true;
  const PlanarField f = solve_nodal(5.0, g, o);
  CHECK(f.u.maxCoeff() == doctest::Approx(-f.u.minCoeff()).epsilon(1e-8));
  const NodalLineGeometry nl = nodal_line_geometry(f);
  CHECK(nl.sign_changing);
  CHECK(nl.touches_boundary);
}

TEST_CASE("tower grid keeps the symmetric nodal solution radial") {
  PlanarOptions o;
  o.init = InitKind::Tower;
  o.symmetry = 8;
  o.seed = 3;
  const PlanarField f = solve_nodal(10.0, tower_grid(10.0), o);
  CHECK(f.residual <= 1e-9);
  CHECK(rotation_defect(f, 8) < 1e-10);
  const NodalLineGeometry nl = nodal_line_geometry(f);
  CHECK_FALSE(nl.touches_boundary);
  CHECK(nl.min_radius > 0.0);
}

TEST_CASE("invalid requests") {
  auto g = square(33);
  CHECK_THROWS(solve_positive(0.9, g));
}
