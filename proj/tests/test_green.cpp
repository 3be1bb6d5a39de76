#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lane_emden/green.hpp"

#include <cmath>
#include <functional>
#include <numbers>

using namespace le;

namespace {
constexpr double kPi = std::numbers::pi;

Point fd_grad(const std::function<double(const Point&)>& f, const Point& x, double h = 1e-6) {
  return {(f({x[0] + h, x[1]}) - f({x[0] - h, x[1]})) / (2 * h), (f({x[0], x[1] + h}) - f({x[0], x[1] - h})) / (2 * h)};
}
}  // namespace

TEST_CASE("Green's function values") {
  CHECK(green_disk({std::exp(-1.0), 0.0}, {0.0, 0.0}) == doctest::Approx(1.0 / (2 * kPi)));
  CHECK(std::abs(green_disk({0.6, 0.8}, {0.3, 0.2})) < 1e-12);
  const Point a{0.2, -0.5}, b{-0.4, 0.1};
  CHECK(green_disk(a, b) == doctest::Approx(green_disk(b, a)).epsilon(1e-14));
  CHECK(green_disk(a, b) > 0.0);
  CHECK(robin_disk(a) == doctest::Approx(regular_part(a, a)));
  CHECK(robin_disk({0.0, 0.0}) == 0.0);
}

TEST_CASE("gradients against finite differences") {
  const Point x{0.3, 0.4}, y{-0.2, 0.1};
  const Point g = grad_x_green(x, y), gf = fd_grad([&](const Point& z) { return green_disk(z, y); }, x);
  CHECK(g[0] == doctest::Approx(gf[0]).epsilon(1e-7));
  CHECK(g[1] == doctest::Approx(gf[1]).epsilon(1e-7));
  const Point h = grad_x_regular(x, y), hf = fd_grad([&](const Point& z) { return regular_part(z, y); }, x);
  CHECK(h[0] == doctest::Approx(hf[0]).epsilon(1e-7));
  CHECK(h[1] == doctest::Approx(hf[1]).epsilon(1e-7));
  const Point r = robin_gradient(x), rf = fd_grad(robin_disk, x);
  CHECK(r[0] == doctest::Approx(rf[0]).epsilon(1e-7));
  CHECK(r[1] == doctest::Approx(rf[1]).epsilon(1e-7));
  // On the diagonal the first-argument gradient of H is half of grad R.
  const Point d = grad_x_regular(x, x);
  CHECK(d[0] == doctest::Approx(0.5 * r[0]));
  CHECK(d[1] == doctest::Approx(0.5 * r[1]));
}

TEST_CASE("balance at the origin") {
  CHECK(check_balance({{0.0, 0.0}}, {1.7})[0] == 0.0);
  CHECK(check_balance({{0.5, 0.0}}, {1.0})[0] > 0.1);
}

TEST_CASE("opposite masses on a diameter balance at one distance") {
  // Independent x-component of the force on (d, 0): half grad R plus the
  // interaction with -1 at (-d, 0), using the explicit image formula.
  auto force = [](double d) {
    const double self = -d / (2 * kPi * (1 - d * d));
    const double y = -d, ystar = 1.0 / y;
    const double inter = (-1.0) * (-(1.0 / (d - y)) + 1.0 / (d - ystar)) / (2 * kPi);
    return self + inter;
  };
  double a = 0.05, b = 0.95;
  REQUIRE(force(a) * force(b) < 0.0);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if ((force(m) < 0) == (force(a) < 0)) a = m;
    else b = m;
  }
  const double d = 0.5 * (a + b);
  const auto res = check_balance({{d, 0.0}, {-d, 0.0}}, {1.0, -1.0});
  CHECK(res[0] < 1e-10);
  CHECK(res[1] < 1e-10);
  CHECK(check_balance({{0.5 * d, 0.0}, {-0.5 * d, 0.0}}, {1.0, -1.0})[0] > 1e-3);

  // Equal positive masses push outward for every separation.
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) CHECK(check_balance({{s, 0.0}, {-s, 0.0}}, {1.0, 1.0})[0] > 1e-3);
}

TEST_CASE("Green limit of the positive family") {
  std::vector<FieldView> fam;
  std::vector<ConcentrationReport> reps;
  for (double p : {100.0, 200.0}) {
    fam.push_back(view_of(solve_radial(p, 0, DomainSpec::unit_disk())));
    reps.push_back(extract_concentration_points(fam.back()));
  }
  const auto rows = check_green_limit(fam, reps);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].residual < rows[0].residual);
  CHECK(rows[1].masses[0] == doctest::Approx(fam[1].values[0]).epsilon(1e-12));
  CHECK(rows[1].mass_energy == doctest::Approx(8 * kPi * rows[1].masses[0] * rows[1].masses[0]));
}
