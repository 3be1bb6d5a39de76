#include "lane_emden/planar.hpp"

#include "lane_emden/profiles.hpp"
#include "lane_emden/radial.hpp"
#include "lane_emden/spectrum.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace le {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using std::numbers::pi;

PlanarOperator assemble_operator(const PlanarGrid& g) {
  const int n = static_cast<int>(g.size());
  std::vector<Eigen::Triplet<double>> trip;
  PlanarOperator op;
  op.M = Eigen::Map<const Vec>(g.weight.data(), n);

  auto couple = [&](int a, int b, double T) {
    trip.emplace_back(a, a, T);
    if (b >= 0) {
      trip.emplace_back(a, b, -T);
    }
  };

  if (g.kind == GridKind::Cartesian) {
    trip.reserve(5 * n);
    for (int iy = 1; iy < g.ny - 1; ++iy)
      for (int ix = 1; ix < g.nx - 1; ++ix) {
        const int a = g.lattice_to_unknown[iy * g.nx + ix];
        const int nb[4] = {g.lattice_to_unknown[iy * g.nx + ix - 1], g.lattice_to_unknown[iy * g.nx + ix + 1],
                           g.lattice_to_unknown[(iy - 1) * g.nx + ix], g.lattice_to_unknown[(iy + 1) * g.nx + ix]};
        for (int b : nb) couple(a, b, 1.0);
      }
  } else {
    trip.reserve(5 * n);
    const double dth = g.dtheta;
    const bool annulus = g.domain.kind == DomainKind::Annulus;
    for (int i = 0; i < g.nr; ++i) {
      // Radial transmissibilities are exact for r^2: flux = T * (u_out - u_in).
      const double r_out = g.rf[i + 1];
      const double c_out = i + 1 < g.nr ? g.rc[i + 1] : 1.0;
      const double T_out = dth * 2.0 * r_out * r_out / (c_out * c_out - g.rc[i] * g.rc[i]);
      const double r_in = g.rf[i];
      double T_in = 0.0;
      if (i > 0) T_in = dth * 2.0 * r_in * r_in / (g.rc[i] * g.rc[i] - g.rc[i - 1] * g.rc[i - 1]);
      else if (annulus) T_in = dth * 2.0 * r_in * r_in / (g.rc[0] * g.rc[0] - r_in * r_in);
      const double T_th = (g.rf[i + 1] - g.rf[i]) / (g.rc[i] * dth);
      for (int j = 0; j < g.ntheta; ++j) {
        const int a = g.polar_index(i, j);
        couple(a, i + 1 < g.nr ? g.polar_index(i + 1, j) : -1, T_out);
        if (T_in > 0.0) couple(a, i > 0 ? g.polar_index(i - 1, j) : -1, T_in);
        couple(a, g.polar_index(i, (j + 1) % g.ntheta), T_th);
        couple(a, g.polar_index(i, (j + g.ntheta - 1) % g.ntheta), T_th);
      }
    }
  }
  op.K.resize(n, n);
  op.K.setFromTriplets(trip.begin(), trip.end());
  op.K.makeCompressed();
  return op;
}

namespace {

Vec nonlinearity(const Vec& u, double p) {
  return u.unaryExpr([p](double v) { return std::copysign(std::pow(std::abs(v), p), v); });
}

// log sum_i M_i |u_i|^q, stable for large q.
double log_weighted_power(const Vec& M, const Vec& u, double q) {
  double top = -INFINITY;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) top = std::max(top, std::log(M[i]) + q * std::log(std::abs(u[i])));
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) s += std::exp(std::log(M[i]) + q * std::log(std::abs(u[i])) - top);
  return top + std::log(s);
}

}  // namespace

double planar_residual(const PlanarOperator& op, const Vec& u, double p) {
  const Vec f = nonlinearity(u, p);
  const Vec Ku = op.K * u;
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  return (f - Ku.cwiseQuotient(op.M)).cwiseAbs().maxCoeff() / scale;
}

Vec nehari_project(const PlanarOperator& op, const Vec& u, double p) {
  const double a = u.dot(op.K * u);
  if (!(a > 0.0)) throw std::invalid_argument("Nehari projection of the zero function");
  const double log_t = (std::log(a) - log_weighted_power(op.M, u, p + 1.0)) / (p - 1.0);
  return std::exp(log_t) * u;
}

Vec nodal_nehari_project(const PlanarOperator& op, const Vec& u, double p) {
  const Vec up = u.cwiseMax(0.0);
  const Vec um = (-u).cwiseMax(0.0);
  if (up.maxCoeff() <= 0.0 || um.maxCoeff() <= 0.0)
    throw std::invalid_argument("nodal Nehari projection needs a sign-changing function");
  const double ap = up.dot(op.K * up), am = um.dot(op.K * um);
  const double c = up.dot(op.K * um);  // <= 0 for an M-matrix
  const double lbp = log_weighted_power(op.M, up, p + 1.0);
  const double lbm = log_weighted_power(op.M, um, p + 1.0);

  // v = e^x u+ - e^y u-.  Unknowns x, y:
  //   F1 = a+ - c e^(y-x) - e^((p-1)x + log b+) = 0
  //   F2 = a- - c e^(x-y) - e^((p-1)y + log b-) = 0
  double x = (std::log(ap) - lbp) / (p - 1.0);
  double y = (std::log(am) - lbm) / (p - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double e1 = std::exp((p - 1.0) * x + lbp), e2 = std::exp((p - 1.0) * y + lbm);
    const double cyx = c * std::exp(y - x), cxy = c * std::exp(x - y);
    const double F1 = (ap - cyx - e1) / ap, F2 = (am - cxy - e2) / am;
    const double J11 = (cyx - (p - 1.0) * e1) / ap, J12 = -cyx / ap;
    const double J21 = -cxy / am, J22 = (cxy - (p - 1.0) * e2) / am;
    const double det = J11 * J22 - J12 * J21;
    const double dx = (-F1 * J22 + F2 * J12) / det;
    const double dy = (-J11 * F2 + J21 * F1) / det;
    x += std::clamp(dx, -1.0, 1.0);
    y += std::clamp(dy, -1.0, 1.0);
    if (std::abs(dx) + std::abs(dy) < 1e-15) break;
  }
  return std::exp(x) * up - std::exp(y) * um;
}

PlanarEnergy planar_energy(const PlanarOperator& op, const Vec& u, double p) {
  PlanarEnergy e;
  const Vec up = u.cwiseMax(0.0), um = (-u).cwiseMax(0.0);
  auto lp = [&](const Vec& v, double q) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += op.M[i] * std::pow(std::abs(v[i]), q);
    return s;
  };
  e.p_dirichlet = p * u.dot(op.K * u);
  e.p_lp1 = p * lp(u, p + 1.0);
  e.p_lp = p * lp(u, p);
  e.pE = 0.5 * e.p_dirichlet - e.p_lp1 / (p + 1.0);
  // Discrete splits: the cross term of K is shared by construction of the form.
  e.p_dirichlet_plus = p * up.dot(op.K * u);
  e.p_dirichlet_minus = -p * um.dot(op.K * u);
  e.p_lp1_plus = p * lp(up, p + 1.0);
  e.p_lp1_minus = p * lp(um, p + 1.0);
  return e;
}

namespace {

// Projection onto the requested symmetry class.
struct Symmetrizer {
  const PlanarGrid& g;
  int s = 1;
  bool anti = false;
  std::vector<int> swap;  // (x,y) -> (y,x) on square lattices

  Symmetrizer(const PlanarGrid& grid, int order, bool antisym) : g(grid), s(order), anti(antisym) {
    if (s > 1) {
      if (g.kind != GridKind::Polar || g.ntheta % s != 0)
        throw std::invalid_argument("rotation symmetry needs a polar grid with ntheta divisible by s");
    }
    if (anti) {
      if (g.kind != GridKind::Cartesian || g.nx != g.ny)
        throw std::invalid_argument("diagonal antisymmetry needs a square lattice");
      swap.resize(g.size());
      for (int iy = 1; iy < g.ny - 1; ++iy)
        for (int ix = 1; ix < g.nx - 1; ++ix)
          swap[g.lattice_to_unknown[iy * g.nx + ix]] = g.lattice_to_unknown[ix * g.nx + iy];
    }
  }

  void apply(Vec& u) const {
    if (s > 1) {
      const int shift = g.ntheta / s;
      Vec avg = Vec::Zero(u.size());
      for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j) {
          double acc = 0.0;
          for (int k = 0; k < s; ++k) acc += u[g.polar_index(i, (j + k * shift) % g.ntheta)];
          avg[g.polar_index(i, j)] = acc / s;
        }
      u = avg;
    }
    if (anti) {
      Vec v = u;
      for (Eigen::Index i = 0; i < u.size(); ++i) v[i] = 0.5 * (u[i] - u[swap[i]]);
      u = v;
    }
  }
};

Vec eigen_guess(const PlanarGrid& g, bool nodal) {
  Vec u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.nodes[i][0], y = g.nodes[i][1];
    if (g.kind == GridKind::Cartesian) {
      const double X = x / g.domain.width + 0.5, Y = y / g.domain.height + 0.5;
      u[i] = nodal ? std::sin(pi * X) * std::sin(2 * pi * Y) - std::sin(2 * pi * X) * std::sin(pi * Y)
                   : std::sin(pi * X) * std::sin(pi * Y);
    } else {
      const double r = std::hypot(x, y);
      const double r0 = g.domain.kind == DomainKind::Annulus ? g.domain.inner : 0.0;
      const double radial = std::sin(pi * (r - r0) / (1.0 - r0));
      u[i] = nodal ? radial * std::cos(std::atan2(y, x)) : std::max(radial, 0.0) + (r0 == 0.0 ? 1.0 - r * r : 0.0);
    }
  }
  return u;
}

class NewtonSolver {
 public:
  NewtonSolver(const PlanarGrid& g, const PlanarOperator& op, double p, const PlanarOptions& opt)
      : g_(g), op_(op), p_(p), opt_(opt), sym_(g, opt.symmetry, opt.antisymmetric) {}

  double merit(const Vec& u) const {
    const Vec F = op_.K * u - op_.M.cwiseProduct(nonlinearity(u, p_));
    return F.cwiseQuotient(op_.M.cwiseSqrt()).squaredNorm();
  }

  void gradient_steps(Vec& u, bool nodal, int steps) {
    if (steps <= 0) return;
    Eigen::SimplicialLLT<SpMat> chol(op_.K);
    for (int k = 0; k < steps; ++k) {
      const Vec target = chol.solve(op_.M.cwiseProduct(nonlinearity(u, p_)));
      Vec next = 0.5 * u + 0.5 * target;
      sym_.apply(next);
      const bool changes = next.maxCoeff() > 0.0 && next.minCoeff() < 0.0;
      if (nodal && !changes) break;
      u = nodal ? nodal_nehari_project(op_, next, p_) : nehari_project(op_, next, p_);
    }
  }

  int solve(Vec& u) {
    Eigen::SparseLU<SpMat> lu;
    SpMat J = op_.K;
    bool analyzed = false;
    double m = merit(u);
    for (int it = 0; it < opt_.max_newton; ++it) {
      if (planar_residual(op_, u, p_) <= opt_.tol) return it;
      const Vec f = nonlinearity(u, p_);
      const Vec F = op_.K * u - op_.M.cwiseProduct(f);
      const Vec d = op_.M.cwiseProduct(u.unaryExpr([this](double v) { return p_ * std::pow(std::abs(v), p_ - 1.0); }));
      J = op_.K;
      for (Eigen::Index i = 0; i < J.rows(); ++i) J.coeffRef(i, i) -= d[i];
      if (!analyzed) {
        lu.analyzePattern(J);
        analyzed = true;
      }
      lu.factorize(J);
      if (lu.info() != Eigen::Success) throw SolverError("Newton Jacobian factorization failed");
      Vec du = lu.solve(-F);
      double lambda = 1.0;
      while (true) {
        Vec trial = u + lambda * du;
        sym_.apply(trial);
        const double mt = merit(trial);
        if (mt <= (1.0 - 1e-4 * lambda) * m || lambda < 1e-6) {
          if (lambda < 1e-6 && mt > m) {
            if (planar_residual(op_, u, p_) <= opt_.tol) return it;  // at the rounding floor
            std::ostringstream os;
            os << "Newton line search stalled; residual " << planar_residual(op_, u, p_);
            throw SolverError(os.str());
          }
          u = trial;
          m = mt;
          break;
        }
        lambda *= 0.5;
      }
    }
    const double res = planar_residual(op_, u, p_);
    if (res > opt_.tol) {
      std::ostringstream os;
      os << "Newton did not converge; last residual " << res;
      throw SolverError(os.str());
    }
    return opt_.max_newton;
  }

 private:
  const PlanarGrid& g_;
  const PlanarOperator& op_;
  double p_;
  PlanarOptions opt_;
  Symmetrizer sym_;
};

PlanarField finish(std::shared_ptr<const PlanarGrid> grid, const PlanarOperator& op, Vec u, double p,
                   int iterations, const PlanarOptions& opt, const char* init) {
  PlanarField f;
  f.grid = std::move(grid);
  f.u = std::move(u);
  f.p = p;
  f.iterations = iterations;
  f.residual = planar_residual(op, f.u, p);
  f.symmetry = opt.symmetry;
  f.antisymmetric = opt.antisymmetric;
  f.init = init;
  return f;
}

const char* init_name(InitKind k) {
  switch (k) {
    case InitKind::Eigen: return "eigen";
    case InitKind::Tower: return "tower";
    case InitKind::Given: return "given";
  }
  return "?";
}

}  // namespace

PlanarField solve_positive(double p, std::shared_ptr<const PlanarGrid> grid, const PlanarOptions& opt) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent must exceed 1");
  const PlanarOperator op = assemble_operator(*grid);
  Vec u;
  if (opt.init == InitKind::Given) {
    if (!opt.initial || opt.initial->size() != static_cast<Eigen::Index>(grid->size()))
      throw std::invalid_argument("given initial guess has the wrong size");
    u = *opt.initial;
  } else {
    u = first_dirichlet_eigenpair(op).phi;
  }
  u = nehari_project(op, u, p);
  NewtonSolver newton(*grid, op, p, opt);
  newton.gradient_steps(u, false, opt.gradient_steps);
  const int it = newton.solve(u);
  if (u.minCoeff() < -1e-8 * u.maxCoeff()) throw SolverError("positive solve converged to a sign-changing field");
  return finish(std::move(grid), op, std::move(u), p, it, opt, init_name(opt.init));
}

Vec tower_initial_guess(const PlanarGrid& grid, double p, std::uint64_t seed) {
  if (!grid.domain.is_disk_like() || grid.domain.kind == DomainKind::Annulus)
    throw std::invalid_argument("tower initial guesses are built on the disk");
  RadialOptions ropt;
  ropt.collocation_check = false;
  const RadialSolution rad = solve_radial(p, 1, DomainSpec::unit_disk(), ropt);
  std::size_t imin = 0;
  for (std::size_t i = 0; i < rad.u.size(); ++i)
    if (rad.u[i] < rad.u[imin]) imin = i;
  const double a_minus = -rad.u[imin];
  const double log_mu_minus = -0.5 * (std::log(p) + (p - 1.0) * std::log(a_minus));
  const double mu_minus = std::exp(log_mu_minus);
  const SingularProfileParams q = singular_params(rad.mesh.r[imin] / mu_minus);

  BubbleSpec plus{{0.0, 0.0}, std::exp(rad.log_mu), rad.center_value, p};
  BubbleSpec minus{{0.0, 0.0}, mu_minus, a_minus, p};

  double eps = 0.0, phase = 0.0;
  const int s = grid.domain.kind == DomainKind::DiskSector ? grid.domain.order : 1;
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    eps = 0.05 * U(rng);
    phase = 2.0 * pi * U(rng) / s;
  }
  Vec u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point& x = grid.nodes[i];
    const double th = std::atan2(x[1], x[0]);
    u[i] = bubble_tower(x, plus, minus, q) * (1.0 + eps * std::cos(s * (th - phase)));
  }
  return u;
}

std::shared_ptr<const PlanarGrid> tower_grid(double p, int nr, int ntheta) {
  RadialOptions ropt;
  ropt.collocation_check = false;
  const RadialSolution rad = solve_radial(p, 1, DomainSpec::unit_disk(), ropt);
  PolarOptions po;
  po.ntheta = ntheta;
  po.r_min = 0.5 * std::exp(rad.log_mu);
  return std::make_shared<const PlanarGrid>(build_planar_grid(DomainSpec::unit_disk(), nr, po));
}

PlanarField solve_nodal(double p, std::shared_ptr<const PlanarGrid> grid, const PlanarOptions& opt) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent must exceed 1");
  const PlanarOperator op = assemble_operator(*grid);
  Vec u;
  switch (opt.init) {
    case InitKind::Given:
      if (!opt.initial || opt.initial->size() != static_cast<Eigen::Index>(grid->size()))
        throw std::invalid_argument("given initial guess has the wrong size");
      u = *opt.initial;
      break;
    case InitKind::Tower:
      u = tower_initial_guess(*grid, p, opt.seed);
      break;
    case InitKind::Eigen:
      u = eigen_guess(*grid, true);
      break;
  }
  NewtonSolver newton(*grid, op, p, opt);
  {
    Symmetrizer sym(*grid, opt.symmetry, opt.antisymmetric);
    sym.apply(u);
  }
  u = nodal_nehari_project(op, u, p);
  newton.gradient_steps(u, true, opt.gradient_steps);
  const int it = newton.solve(u);
  const double m = u.cwiseAbs().maxCoeff();
  if (!(u.maxCoeff() > 1e-6 * m && u.minCoeff() < -1e-6 * m))
    throw SolverError("nodal solve converged to a single-signed field");
  return finish(std::move(grid), op, std::move(u), p, it, opt, init_name(opt.init));
}

std::vector<PlanarField> continue_in_p(const PlanarField& start, const std::vector<double>& schedule,
                                       const PlanarOptions& opt) {
  std::vector<PlanarField> family;
  const bool nodal = start.u.maxCoeff() > 0.0 && start.u.minCoeff() < 0.0;
  PlanarField prev = start;
  const PlanarOperator op = assemble_operator(*start.grid);
  for (double p_next : schedule) {
    if (!(p_next > prev.p)) throw std::invalid_argument("continuation schedule must increase");
    PlanarOptions o = opt;
    o.init = InitKind::Given;
    o.symmetry = start.symmetry;
    o.antisymmetric = start.antisymmetric;
    o.gradient_steps = 0;
    // Try the full step, then shrink by halving toward the previous p.
    double p_try = p_next;
    bool reached = false;
    for (int shrink = 0; shrink < 6 && !reached; ++shrink) {
      try {
        o.initial = nodal ? nodal_nehari_project(op, prev.u, p_try) : nehari_project(op, prev.u, p_try);
        PlanarField f = nodal ? solve_nodal(p_try, start.grid, o) : solve_positive(p_try, start.grid, o);
        prev = f;
        if (p_try == p_next) {
          family.push_back(f);
          reached = true;
        } else {
          p_try = p_next;
        }
      } catch (const SolverError&) {
        p_try = 0.5 * (prev.p + p_try);
      }
    }
    if (!reached) break;
  }
  return family;
}

NodalLineGeometry nodal_line_geometry(const PlanarField& field) {
  const PlanarGrid& g = *field.grid;
  const Vec& u = field.u;
  NodalLineGeometry geo;
  geo.sign_changing = u.maxCoeff() > 0.0 && u.minCoeff() < 0.0;
  if (!geo.sign_changing) return geo;
  auto edge = [&](int a, int b) {
    if ((u[a] > 0.0) == (u[b] > 0.0)) return;
    const double th = u[a] / (u[a] - u[b]);
    geo.points.push_back({g.nodes[a][0] + th * (g.nodes[b][0] - g.nodes[a][0]),
                          g.nodes[a][1] + th * (g.nodes[b][1] - g.nodes[a][1])});
  };
  bool outer_pos = false, outer_neg = false;
  if (g.kind == GridKind::Cartesian) {
    for (int iy = 1; iy < g.ny - 1; ++iy)
      for (int ix = 1; ix < g.nx - 1; ++ix) {
        const int a = g.lattice_to_unknown[iy * g.nx + ix];
        const int right = g.lattice_to_unknown[iy * g.nx + ix + 1];
        const int up = g.lattice_to_unknown[(iy + 1) * g.nx + ix];
        if (right >= 0) edge(a, right);
        if (up >= 0) edge(a, up);
        if (ix == 1 || iy == 1 || ix == g.nx - 2 || iy == g.ny - 2) {
          outer_pos |= u[a] > 0.0;
          outer_neg |= u[a] < 0.0;
        }
      }
  } else {
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.ntheta; ++j) {
        const int a = g.polar_index(i, j);
        if (i + 1 < g.nr) edge(a, g.polar_index(i + 1, j));
        edge(a, g.polar_index(i, (j + 1) % g.ntheta));
        const bool outer = i == g.nr - 1 || (g.domain.kind == DomainKind::Annulus && i == 0);
        if (outer) {
          outer_pos |= u[a] > 0.0;
          outer_neg |= u[a] < 0.0;
        }
      }
    // The center cells touch across the origin.
    for (int j = 0; j < g.ntheta / 2; ++j) edge(g.polar_index(0, j), g.polar_index(0, j + g.ntheta / 2));
  }
  geo.touches_boundary = outer_pos && outer_neg;
  geo.min_radius = INFINITY;
  for (const Point& x : geo.points) {
    const double r = std::hypot(x[0], x[1]);
    geo.min_radius = std::min(geo.min_radius, r);
    geo.max_radius = std::max(geo.max_radius, r);
  }
  return geo;
}

double rotation_defect(const PlanarField& field, int s) {
  const PlanarGrid& g = *field.grid;
  if (g.kind != GridKind::Polar || g.ntheta % s != 0)
    throw std::invalid_argument("rotation defect needs a polar grid with ntheta divisible by s");
  const int shift = g.ntheta / s;
  double worst = 0.0;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.ntheta; ++j)
      worst = std::max(worst, std::abs(field.u[g.polar_index(i, (j + shift) % g.ntheta)] - field.u[g.polar_index(i, j)]));
  return worst;
}

}  // namespace le
