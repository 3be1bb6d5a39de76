#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lane_emden/radial.hpp"

#include <array>
#include <cmath>
#include <numbers>

using namespace le;

namespace {

// Plain fixed-step RK4 for u'' = -u'/r - |u|^(p-1) u, u(0) = a, started from
// the series u = a - a^p r^2 / 4. Independent of the library integrator.
struct Rk4Result {
  double end = 0.0;
  std::vector<double> zeros;
};

Rk4Result rk4(double p, double a, int steps = 200000) {
  auto f = [p](double r, double u, double v) {
    return std::array<double, 2>{v, -v / r - std::pow(std::abs(u), p - 1) * u};
  };
  const double r0 = 1e-6;
  double u = a - std::pow(a, p) * r0 * r0 / 4, v = -std::pow(a, p) * r0 / 2, r = r0;
  const double h = (1.0 - r0) / steps;
  Rk4Result out;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = f(r, u, v);
    const auto k2 = f(r + h / 2, u + h / 2 * k1[0], v + h / 2 * k1[1]);
    const auto k3 = f(r + h / 2, u + h / 2 * k2[0], v + h / 2 * k2[1]);
    const auto k4 = f(r + h, u + h * k3[0], v + h * k3[1]);
    const double un = u + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    v += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    if (i + 1 < steps && un * u < 0) out.zeros.push_back(r + h * u / (u - un));
    u = un;
    r += h;
  }
  out.end = u;
  return out;
}

}  // namespace

TEST_CASE("positive and nodal disk solutions agree with an independent RK4") {
  for (int k : {0, 1}) {
    for (double p : {3.0, 5.0}) {
      CAPTURE(k);
      CAPTURE(p);
      const RadialSolution s = solve_radial(p, k, DomainSpec::unit_disk());
      CHECK(s.nodal_count == k);
      CHECK(s.zeros.size() == static_cast<std::size_t>(k));
      CHECK(std::abs(s.boundary_residual) <= 1e-10);
      const Rk4Result o = rk4(p, s.center_value);
      CHECK(std::abs(o.end) <= 1e-6 * std::abs(s.center_value));
      REQUIRE(o.zeros.size() == s.zeros.size());
      for (std::size_t i = 0; i < o.zeros.size(); ++i) CHECK(o.zeros[i] == doctest::Approx(s.zeros[i]).epsilon(1e-6));
      if (s.collocation_discrepancy >= 0.0) CHECK(s.collocation_discrepancy < 1e-8);
    }
  }
}

TEST_CASE("scale data is consistent") {
  const RadialSolution s = solve_radial(200.0, 0, DomainSpec::unit_disk());
  CHECK(s.log_amplitude == doctest::Approx(std::log(s.center_value)));
  CHECK(s.log_mu == doctest::Approx(-0.5 * (std::log(200.0) + 199.0 * std::log(s.center_value))));
  CHECK(s.sup_norm() == doctest::Approx(s.center_value));
  for (std::size_t i = 0; i < s.mesh.size(); i += 37) CHECK(s.value_at(s.mesh.r[i]) == doctest::Approx(s.u[i]).epsilon(1e-14));
}

TEST_CASE("energy identity holds on converged solutions") {
  for (int k : {0, 1}) {
    for (double p : {5.0, 100.0, 800.0}) {
      const RadialEnergy e = radial_energy(solve_radial(p, k, DomainSpec::unit_disk()));
      CAPTURE(p);
      CHECK(e.p_dirichlet == doctest::Approx(e.p_lp1).epsilon(1e-6));
      CHECK(e.pE == doctest::Approx(e.p_dirichlet * (0.5 - 1.0 / (p + 1))).epsilon(1e-6));
      if (k == 1) CHECK(e.p_dirichlet_plus + e.p_dirichlet_minus == doctest::Approx(e.p_dirichlet).epsilon(1e-8));
    }
  }
}

TEST_CASE("annulus shooting") {
  const RadialSolution s = solve_radial(3.0, 0, DomainSpec::annulus(0.5));
  CHECK(s.u.front() == 0.0);
  CHECK(std::abs(s.u.back()) <= 1e-10);
  for (std::size_t i = 1; i + 1 < s.u.size(); ++i) REQUIRE(s.u[i] > 0.0);
}

TEST_CASE("scaled zeros increase and match the nodal solution") {
  const auto z = scaled_zeros(10.0, 2);
  REQUIRE(z.size() == 2);
  CHECK(z[1] > z[0]);
  CHECK(z[0] > 0.0);
  const RadialSolution s = solve_radial(10.0, 1, DomainSpec::unit_disk());
  // The second zero of the scaled profile is the boundary.
  CHECK(s.zeros[0] == doctest::Approx(z[0] / z[1]).epsilon(1e-6));
}

TEST_CASE("bad input is rejected") {
  CHECK_THROWS(solve_radial(0.5, 0, DomainSpec::unit_disk()));
  CHECK_THROWS(solve_radial(3.0, 0, DomainSpec::rectangle(1, 1)));
}
