#include "lane_emden/radial.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace le {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;
using std::numbers::pi;

namespace {

constexpr double kRelTol = 1e-12;
constexpr double kAbsTol = 1e-14;
constexpr double kMaxLogStep = 0.25;

double signed_power_term(double log_prefactor, double p, double w) {
  // exp(log_prefactor) * |w|^(p-1) w, evaluated in log space
  if (w == 0.0) return 0.0;
  const double e = std::min(log_prefactor + p * std::log(std::abs(w)), 700.0);
  return std::copysign(std::exp(e), w);
}

// Scaled problem in t = log s:  w_tt = -(e^(2t)/p) |w|^(p-1) w.
struct ScaledSystem {
  double p, log_p;
  void operator()(const State& x, State& dxdt, double t) const {
    dxdt[0] = x[1];
    dxdt[1] = -signed_power_term(2.0 * t - log_p, p, x[0]);
  }
};

// Series of the scaled profile about s = 0; returns (w, s w_s).
State scaled_series(double p, double s) {
  const double c2 = -1.0 / (4.0 * p);
  const double c4 = 1.0 / (64.0 * p);
  const double c6 = -(1.0 / (64.0 * p) + (p - 1.0) / (32.0 * p * p)) / 36.0;
  const double s2 = s * s;
  return {1.0 + s2 * (c2 + s2 * (c4 + s2 * c6)), s2 * (2.0 * c2 + s2 * (4.0 * c4 + s2 * 6.0 * c6))};
}

struct ScaledRun {
  std::vector<double> zeros_t;
  State end{0.0, 0.0};
  bool reached_end = false;
};

// Integrates the scaled profile from the series start up to t_end, stopping
// early after `stop_zeros` sign changes. Optional samples at sorted times.
ScaledRun integrate_scaled(double p, double t_end, int stop_zeros,
                           const std::vector<double>* sample_t = nullptr,
                           std::vector<State>* samples = nullptr) {
  ScaledSystem sys{p, std::log(p)};
  const double s0 = std::min(1e-3, 1e-3 * std::exp(t_end));
  const double t0 = std::log(s0);
  State x = scaled_series(p, s0);

  std::size_t next = 0;
  if (sample_t) {
    samples->assign(sample_t->size(), State{0.0, 0.0});
    for (; next < sample_t->size() && (*sample_t)[next] <= t0; ++next)
      (*samples)[next] = scaled_series(p, std::exp((*sample_t)[next]));
  }

  // The step cap keeps the error control from striding across a whole lobe
  // where the profile is nearly linear in t.
  auto stepper = odeint::make_dense_output(kAbsTol, kRelTol, kMaxLogStep, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, t0, 1e-3);
  ScaledRun run;
  int tiny_steps = 0;
  while (true) {
    const auto [ta, tb] = stepper.do_step(sys);
    if (tb - ta < 1e-13 * std::max(1.0, std::abs(tb))) {
      if (++tiny_steps > 1000) {
        std::ostringstream os;
        os << "step size underflow in scaled shooting at t = " << tb << " (p = " << p << ")";
        throw SolverError(os.str());
      }
    }
    const State xa = stepper.previous_state();
    const State xb = stepper.current_state();
    const double hi_t = std::min(tb, t_end);

    if (sample_t) {
      State tmp;
      for (; next < sample_t->size() && (*sample_t)[next] <= hi_t; ++next) {
        stepper.calc_state((*sample_t)[next], tmp);
        (*samples)[next] = tmp;
      }
    }

    State xe = xb;
    if (tb >= t_end) stepper.calc_state(t_end, xe);
    const double wb = tb >= t_end ? xe[0] : xb[0];
    if ((xa[0] > 0.0) != (wb > 0.0) && xa[0] != 0.0) {
      double lo = ta, hi = hi_t;
      State tmp;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, tmp);
        if ((tmp[0] > 0.0) == (xa[0] > 0.0)) lo = mid; else hi = mid;
      }
      run.zeros_t.push_back(0.5 * (lo + hi));
      if (static_cast<int>(run.zeros_t.size()) >= stop_zeros && tb < t_end) {
        run.end = xb;
        return run;
      }
    }
    if (tb >= t_end) {
      run.end = xe;
      run.reached_end = true;
      return run;
    }
  }
}

// Plain-radius system for the annulus: u'' = -u'/r - |u|^(p-1) u.
struct AnnulusSystem {
  double p;
  void operator()(const State& x, State& dxdt, double r) const {
    dxdt[0] = x[1];
    dxdt[1] = -x[1] / r - signed_power_term(0.0, p, x[0]);
  }
};

Trajectory shoot_annulus(double p, double b, const RadialMesh& mesh, double a_in) {
  AnnulusSystem sys{p};
  Trajectory tr;
  tr.u.assign(mesh.size(), 0.0);
  tr.du.assign(mesh.size(), 0.0);
  State x{0.0, b};
  tr.du[0] = b;
  auto stepper = odeint::make_dense_output(1e-14 * std::max(1.0, std::abs(b)), kRelTol,
                                           odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, a_in, 1e-4);
  std::size_t next = 1;
  while (next < mesh.size()) {
    const auto [ra, rb] = stepper.do_step(sys);
    const State xa = stepper.previous_state();
    State tmp;
    for (; next < mesh.size() && mesh.r[next] <= rb; ++next) {
      stepper.calc_state(mesh.r[next], tmp);
      tr.u[next] = tmp[0];
      tr.du[next] = tmp[1];
    }
    const double hi_r = std::min(rb, 1.0);
    State xe;
    stepper.calc_state(hi_r, xe);
    if ((xa[0] > 0.0) != (xe[0] > 0.0) && xa[0] != 0.0 && hi_r < 1.0) {
      double lo = ra, hi = hi_r;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, tmp);
        if ((tmp[0] > 0.0) == (xa[0] > 0.0)) lo = mid; else hi = mid;
      }
      tr.zeros.push_back(0.5 * (lo + hi));
    }
  }
  tr.end_value = tr.u.back();
  return tr;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
  std::size_t m = n - 1;  // intervals
  double tail = 0.0;
  if (m % 2 == 1) {       // last three intervals by the 3/8 rule
    tail = 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
    m -= 3;
  }
  double s = f[0] + f[m];
  for (std::size_t i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0 + tail;
}

}  // namespace

double RadialSolution::sup_norm() const {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double RadialSolution::value_at(double r) const {
  const auto& x = mesh.r;
  if (r <= x.front()) return u.front();
  if (r >= x.back()) return u.back();
  const std::size_t i = std::upper_bound(x.begin(), x.end(), r) - x.begin() - 1;
  const double h = x[i + 1] - x[i];
  const double s = (r - x[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * u[i] + h10 * h * du[i] + h01 * u[i + 1] + h11 * h * du[i + 1];
}

std::vector<double> scaled_zeros(double p, int count) {
  // Far enough to pass any zero of interest: the run stops after `count` zeros.
  const ScaledRun run = integrate_scaled(p, 1e4, count);
  std::vector<double> s;
  for (double t : run.zeros_t) s.push_back(std::exp(t));
  if (static_cast<int>(s.size()) < count) throw SolverError("scaled profile has too few zeros");
  return s;
}

namespace {

// Disk shooting parameterized by log|u(0)| so that bracketing and the final
// trajectory see bit-identical boundary positions.
Trajectory shoot_disk(double p, double log_a, double sgn, const RadialMesh& mesh) {
  const double a = sgn * std::exp(log_a);
  const double log_mu = -0.5 * (std::log(p) + (p - 1.0) * log_a);
  const double t_end = -log_mu;

  std::vector<double> ts;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    if (mesh.r[i] > 0.0) {
      ts.push_back(std::log(mesh.r[i]) - log_mu);
      idx.push_back(i);
    }
  std::vector<State> samples;
  const ScaledRun run = integrate_scaled(p, t_end, 1 << 30, &ts, &samples);

  Trajectory tr;
  tr.u.assign(mesh.size(), a);
  tr.du.assign(mesh.size(), 0.0);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    tr.u[idx[j]] = a * samples[j][0];
    tr.du[idx[j]] = a * samples[j][1] / mesh.r[idx[j]];
  }
  for (double t : run.zeros_t)
    if (t < t_end) tr.zeros.push_back(std::exp(t + log_mu));
  tr.end_value = a * run.end[0];
  return tr;
}

}  // namespace

Trajectory shoot(double p, double a, const RadialMesh& mesh, const DomainSpec& domain) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent must exceed 1");
  if (a == 0.0) throw std::invalid_argument("shooting parameter must be nonzero");
  domain.validate();
  if (domain.kind == DomainKind::Annulus) return shoot_annulus(p, a, mesh, domain.inner);
  if (domain.kind != DomainKind::UnitDisk) throw std::invalid_argument("shooting needs a disk or an annulus");
  // Odd nonlinearity: shoot |a| and flip.
  return shoot_disk(p, std::log(std::abs(a)), a > 0 ? 1.0 : -1.0, mesh);
}

namespace {

// Lexicographic bracketing: true when the parameter is below the one giving
// exactly k interior zeros and a zero at the outer boundary.
bool below_target(int zeros, double end_value, int k) {
  if (zeros != k) return zeros < k;
  const bool lobe_positive = (k % 2 == 0);
  return (end_value > 0.0) == lobe_positive;
}

template <class Classify>
std::pair<double, double> bisect_log(Classify&& below, double x0, int max_iter, int& steps,
                                     const char* what) {
  double lo = x0, hi = x0;
  const double step = std::log(2.0);
  int guard = 0;
  if (below(x0)) {
    while (below(hi)) {
      lo = hi;
      hi += step;
      if (++guard > 400) break;
    }
  } else {
    while (!below(lo)) {
      hi = lo;
      lo -= step;
      if (++guard > 400) break;
    }
  }
  if (guard > 400) {
    std::ostringstream os;
    os << "bracketing failed for " << what << " over log-parameter interval [" << lo << ", " << hi << "]";
    throw SolverError(os.str());
  }
  steps = 0;
  while (hi - lo > 4e-16 * std::max(1.0, std::abs(lo)) && steps < max_iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (below(mid) ? lo : hi) = mid;
    ++steps;
  }
  return {lo, hi};
}

}  // namespace

RadialSolution solve_radial(double p, int k, const DomainSpec& domain, const RadialOptions& opt) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent must exceed 1");
  if (k < 0 || k > 2) throw std::invalid_argument("nodal count must be 0, 1 or 2");
  domain.validate();
  if (domain.kind != DomainKind::UnitDisk && domain.kind != DomainKind::Annulus)
    throw std::invalid_argument("radial solutions need a disk or an annulus");

  RadialSolution sol;
  sol.p = p;
  sol.domain = domain;
  sol.nodal_count = k;

  if (domain.kind == DomainKind::Annulus) {
    sol.mesh = opt.mesh ? *opt.mesh : build_radial_mesh(domain, 2049, Grading::uniform());
    auto below = [&](double x) {
      const Trajectory tr = shoot_annulus(p, std::exp(x), sol.mesh, domain.inner);
      return below_target(static_cast<int>(tr.zeros.size()), tr.end_value, k);
    };
    const auto [lo, hi] = bisect_log(below, 0.0, opt.max_bisection, sol.bisection_steps, "u'(a)");
    (void)hi;
    sol.center_value = std::exp(lo);
    Trajectory tr = shoot_annulus(p, sol.center_value, sol.mesh, domain.inner);
    sol.u = std::move(tr.u);
    sol.du = std::move(tr.du);
    sol.zeros = std::move(tr.zeros);
    sol.boundary_residual = std::abs(tr.end_value);
    sol.u.back() = 0.0;
    const double m = sol.sup_norm();
    sol.log_amplitude = std::log(m);
    sol.log_mu = -0.5 * (std::log(p) + (p - 1.0) * sol.log_amplitude);
    return sol;
  }

  // Disk: zero count is monotone in log a because zeros sit at fixed scaled radii.
  auto below = [&](double x) {
    const double t_end = 0.5 * (std::log(p) + (p - 1.0) * x);
    const ScaledRun run = integrate_scaled(p, t_end, k + 1);
    int n = 0;
    for (double t : run.zeros_t) n += t < t_end;
    const double end = run.reached_end ? run.end[0] : (k % 2 == 0 ? -1.0 : 1.0);
    return below_target(n, end, k);
  };
  const auto [lo, hi] = bisect_log(below, 0.0, opt.max_bisection, sol.bisection_steps, "u(0)");
  (void)hi;

  sol.log_amplitude = lo;
  sol.center_value = std::exp(lo);
  sol.log_mu = -0.5 * (std::log(p) + (p - 1.0) * lo);
  if (opt.mesh) {
    sol.mesh = *opt.mesh;
  } else {
    const double mu = std::exp(sol.log_mu);
    if (!(mu < 1.0)) throw SolverError("bubble scale not below 1; exponent too close to 1");
    sol.mesh = build_radial_mesh(domain, std::max(64, 2 * graded_node_count(mu, opt.dt)),
                                 Grading::log_graded(mu));
  }
  Trajectory tr = shoot_disk(p, lo, 1.0, sol.mesh);
  sol.u = std::move(tr.u);
  sol.du = std::move(tr.du);
  sol.zeros = std::move(tr.zeros);
  sol.boundary_residual = std::abs(tr.end_value);
  sol.u.back() = 0.0;
  if (static_cast<int>(sol.zeros.size()) != k) {
    std::ostringstream os;
    os << "shooting produced " << sol.zeros.size() << " interior zeros, expected " << k;
    throw SolverError(os.str());
  }
  if (opt.collocation_check && p <= 50.0) sol.collocation_discrepancy = collocation_check(sol);
  return sol;
}

double collocation_check(const RadialSolution& sol, int n, double perturb) {
  if (sol.domain.kind != DomainKind::UnitDisk) throw std::invalid_argument("collocation check is disk only");
  const double p = sol.p, log_p = std::log(p);
  const double t_end = -sol.log_mu;
  const double s0 = std::min(1e-3, 1e-3 * std::exp(t_end));
  const double t0 = std::log(s0);
  const double h = (t_end - t0) / (n - 1);

  // Initial guess: the stored profile, rescaled to w = u/u(0) and perturbed.
  std::vector<double> w(n);
  const double a = sol.center_value;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const double r = std::exp(t + sol.log_mu);
    w[i] = (1.0 + perturb) * sol.value_at(r) / a;
  }
  w[n - 1] = 0.0;

  auto g = [&](int i, double wi) { return signed_power_term(2.0 * (t0 + i * h) - log_p, p, wi); };
  auto dg = [&](int i, double wi) {
    if (wi == 0.0) return 0.0;
    return std::exp(std::min(2.0 * (t0 + i * h) - log_p + (p - 1.0) * std::log(std::abs(wi)), 700.0)) * p;
  };
  const double robin = s0 * s0 * std::expm1(2.0 * h) / (4.0 * p);
  const double h2 = h * h / 12.0;

  std::vector<double> F(n), lower(n), diag(n), upper(n), dw(n);
  for (int iter = 0; iter < 50; ++iter) {
    // Row 0: w1 - w0 + robin w0^p = 0 ; rows 1..n-2 Numerov ; row n-1: w = 0
    F[0] = w[1] - w[0] + robin * signed_power_term(0.0, p, w[0]);
    diag[0] = -1.0 + robin * p * std::pow(std::abs(w[0]), p - 1.0);
    upper[0] = 1.0;
    for (int i = 1; i < n - 1; ++i) {
      F[i] = w[i + 1] - 2.0 * w[i] + w[i - 1] + h2 * (g(i + 1, w[i + 1]) + 10.0 * g(i, w[i]) + g(i - 1, w[i - 1]));
      lower[i] = 1.0 + h2 * dg(i - 1, w[i - 1]);
      diag[i] = -2.0 + 10.0 * h2 * dg(i, w[i]);
      upper[i] = 1.0 + h2 * dg(i + 1, w[i + 1]);
    }
    F[n - 1] = w[n - 1];
    diag[n - 1] = 1.0;
    lower[n - 1] = 0.0;

    double fmax = 0.0;
    for (double f : F) fmax = std::max(fmax, std::abs(f));
    // Thomas algorithm on J dw = -F
    std::vector<double> c(n), d(n);
    c[0] = upper[0] / diag[0];
    d[0] = -F[0] / diag[0];
    for (int i = 1; i < n; ++i) {
      const double m = diag[i] - lower[i] * c[i - 1];
      c[i] = i < n - 1 ? upper[i] / m : 0.0;
      d[i] = (-F[i] - lower[i] * d[i - 1]) / m;
    }
    dw[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) dw[i] = d[i] - c[i] * dw[i + 1];
    double step = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] += dw[i];
      step = std::max(step, std::abs(dw[i]));
    }
    if (step < 1e-12) break;
    if (iter == 49) throw SolverError("collocation Newton did not converge");
  }
  const double center = w[0] + robin / std::expm1(2.0 * h) * std::pow(std::abs(w[0]), p) * std::copysign(1.0, w[0]);
  return std::abs(center - 1.0);
}

RadialEnergy radial_energy(const RadialSolution& sol) {
  const auto& r = sol.mesh.r;
  const double p = sol.p;
  const std::size_t n = r.size();
  // Densities per unit log r; the factor 2 pi is applied at the end.
  std::vector<double> grad_t(n), lp1_t(n), lp_t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rd = sol.r_du(i);
    grad_t[i] = rd * rd;
    if (r[i] > 0.0 && sol.u[i] != 0.0) {
      const double lu = std::log(std::abs(sol.u[i])), lr = std::log(r[i]);
      lp1_t[i] = std::exp((p + 1.0) * lu + 2.0 * lr);
      lp_t[i] = std::exp(p * lu + 2.0 * lr);
    }
  }

  struct Block { std::size_t begin, end; bool log_spaced; };
  std::vector<Block> blocks;
  const std::size_t g = sol.mesh.grading.kind == GradingKind::LogGraded ? sol.mesh.geometric_begin : n;
  if (g > 0) blocks.push_back({0, std::min(g + 1, n), false});
  if (g < n) blocks.push_back({g, n, true});

  auto integrate = [&](const std::vector<double>& f_t) {
    double total = 0.0;
    for (const Block& b : blocks) {
      std::vector<double> f;
      for (std::size_t i = b.begin; i < b.end; ++i)
        f.push_back(b.log_spaced ? f_t[i] : (r[i] > 0.0 ? f_t[i] / r[i] : 0.0));
      const double h = b.log_spaced ? std::log(r[b.begin + 1] / r[b.begin]) : r[b.begin + 1] - r[b.begin];
      total += simpson(f, h);
    }
    return 2.0 * pi * total;
  };

  // Sign splits: trapezoid with the zero inserted by linear interpolation.
  auto split = [&](const std::vector<double>& f_t, double sign) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const bool log_step = r[i] > 0.0 && i >= g;
      const double x0 = log_step ? std::log(r[i]) : r[i];
      const double x1 = log_step ? std::log(r[i + 1]) : r[i + 1];
      const double f0 = log_step ? f_t[i] : (r[i] > 0.0 ? f_t[i] / r[i] : 0.0);
      const double f1 = log_step ? f_t[i + 1] : f_t[i + 1] / r[i + 1];
      const bool in0 = sign * sol.u[i] > 0.0, in1 = sign * sol.u[i + 1] > 0.0;
      if (in0 && in1) {
        total += 0.5 * (x1 - x0) * (f0 + f1);
      } else if (in0 != in1) {
        const double th = sol.u[i] / (sol.u[i] - sol.u[i + 1]);
        const double fz = f0 + th * (f1 - f0);
        total += in0 ? 0.5 * th * (x1 - x0) * (f0 + fz) : 0.5 * (1.0 - th) * (x1 - x0) * (fz + f1);
      }
    }
    return 2.0 * pi * total;
  };

  RadialEnergy e;
  e.p_dirichlet = p * integrate(grad_t);
  e.p_lp1 = p * integrate(lp1_t);
  e.p_lp = p * integrate(lp_t);
  e.pE = 0.5 * e.p_dirichlet - e.p_lp1 / (p + 1.0);
  e.p_dirichlet_plus = p * split(grad_t, 1.0);
  e.p_dirichlet_minus = p * split(grad_t, -1.0);
  e.p_lp1_plus = p * split(lp1_t, 1.0);
  e.p_lp1_minus = p * split(lp1_t, -1.0);
  return e;
}

}  // namespace le
