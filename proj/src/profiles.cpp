#include "lane_emden/profiles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace le {

using std::numbers::pi;

SingularProfileParams singular_params(double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("singular profile needs ell > 0");
  SingularProfileParams q;
  q.ell = ell;
  q.alpha = std::sqrt(2.0 * ell * ell + 4.0);
  // (alpha+2)/(alpha-2) with alpha-2 = 2 ell^2 / (alpha+2), stable as ell -> 0.
  const double am2 = 2.0 * ell * ell / (q.alpha + 2.0);
  q.beta = ell * std::pow((q.alpha + 2.0) / am2, 1.0 / q.alpha);
  q.eta = 0.5 * am2;
  q.H = -4.0 * pi * q.eta;
  return q;
}

double eval_U_radial(double r) { return -2.0 * std::log1p(r * r / 8.0); }

double eval_U(const Point& x) { return eval_U_radial(std::hypot(x[0], x[1])); }

namespace {

// log q with q = (r/beta)^alpha
double log_q(double r, const SingularProfileParams& q) {
  return q.alpha * (std::log(r) - std::log(q.beta));
}

double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double eval_V(double r, const SingularProfileParams& q) {
  if (!(r > 0.0)) throw std::invalid_argument("V is singular at r = 0");
  // 2 alpha^2 beta^alpha r^(alpha-2) / (beta^alpha + r^alpha)^2
  //   = 2 alpha^2 q / (r^2 (1+q)^2)
  const double lq = log_q(r, q);
  return std::log(2.0 * q.alpha * q.alpha) + lq - 2.0 * std::log(r) - 2.0 * log1p_exp(lq);
}

double eval_V_derivative(double r, const SingularProfileParams& q) {
  if (!(r > 0.0)) throw std::invalid_argument("V is singular at r = 0");
  const double lq = log_q(r, q);
  // V_tau = (alpha - 2) - 2 alpha q/(1+q), with tau = log r
  const double frac = 1.0 / (1.0 + std::exp(-lq));
  return ((q.alpha - 2.0) - 2.0 * q.alpha * frac) / r;
}

double liouville_residual(ProfileKind kind, double r, const SingularProfileParams& q) {
  if (!(r > 0.0)) throw std::invalid_argument("residual undefined at r = 0");
  const double lr = std::log(r);
  double w_tt = 0.0, value = 0.0;
  if (kind == ProfileKind::Regular) {
    const double z = r * r / 8.0;
    w_tt = -r * r / ((1.0 + z) * (1.0 + z));
    value = eval_U_radial(r);
  } else {
    const double lq = log_q(r, q);
    const double qq = std::exp(-std::abs(lq));  // min(q, 1/q), symmetric formula
    w_tt = -2.0 * q.alpha * q.alpha * qq / ((1.0 + qq) * (1.0 + qq));
    value = eval_V(r, q);
  }
  // In tau = log r:  V'' + V'/r = V_tautau / r^2.
  return (w_tt + std::exp(2.0 * lr + value)) / (r * r);
}

namespace {

// Mass of a radial density given as log(r^2 e^W) in tau = log r.
template <class LogDensity>
double radial_mass(LogDensity&& log_r2_density, double tau_lo, double tau_hi) {
  auto f = [&](double tau) { return 2.0 * pi * std::exp(log_r2_density(tau)); };
  double err = 0.0;
  double total = 0.0;
  constexpr int pieces = 16;
  for (int i = 0; i < pieces; ++i) {
    const double a = tau_lo + (tau_hi - tau_lo) * i / pieces;
    const double b = tau_lo + (tau_hi - tau_lo) * (i + 1) / pieces;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
  }
  return total;
}

}  // namespace

double mass_U() {
  const double r_min = 1e-6, r_max = 1e6;
  const double core = radial_mass(
      [](double tau) { return 2.0 * tau + eval_U_radial(std::exp(tau)); }, std::log(r_min),
      std::log(r_max));
  const double inner = pi * r_min * r_min;       // e^U ~ 1 near the center
  const double tail = 64.0 * pi / (r_max * r_max);  // e^U ~ 64 r^-4
  return core + inner + tail;
}

double mass_V(const SingularProfileParams& q) {
  const double r_min = 1e-6 * std::min(1.0, q.beta);
  const double r_max = 1e6 * std::max(1.0, q.beta);
  const double core = radial_mass(
      [&q](double tau) { return 2.0 * tau + eval_V(std::exp(tau), q); }, std::log(r_min),
      std::log(r_max));
  // e^V ~ 2 alpha^2 beta^-alpha r^(alpha-2) near 0 and 2 alpha^2 beta^alpha r^(-alpha-2) at infinity
  const double inner = 4.0 * pi * q.alpha * std::pow(r_min / q.beta, q.alpha);
  const double tail = 4.0 * pi * q.alpha * std::pow(q.beta / r_max, q.alpha);
  return core + inner + tail;
}

double bubble_tower(const Point& x, const BubbleSpec& plus, const BubbleSpec& minus,
                    const SingularProfileParams& q) {
  if (!(plus.mu > 0.0 && minus.mu > 0.0)) throw std::invalid_argument("bubble scales must be positive");
  double value = 0.0;
  if (plus.amplitude != 0.0) {
    const double rp = std::hypot(x[0] - plus.center[0], x[1] - plus.center[1]) / plus.mu;
    value += plus.amplitude * std::max(0.0, 1.0 + eval_U_radial(rp) / plus.kappa);
  }
  if (minus.amplitude != 0.0) {
    const double rm = std::hypot(x[0] - minus.center[0], x[1] - minus.center[1]) / minus.mu;
    if (rm > 0.0) value -= minus.amplitude * std::max(0.0, 1.0 + eval_V(rm, q) / minus.kappa);
  }
  return value;
}

}  // namespace le
