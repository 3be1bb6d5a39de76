#include "lane_emden/spectrum.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace le {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

namespace {

// Symmetric tridiagonal pencil (A, diag(w)): A has diagonal d, off-diagonal e.
struct Pencil {
  std::vector<double> d, e, w;
  double potential_scale = 1.0;  // max |multiplication coefficient| per unit weight
  std::size_t size() const { return d.size(); }
};

// Number of eigenvalues of A x = sigma W x below sigma (Sylvester inertia of
// A - sigma W through the LDL^T pivot recurrence).
int count_below(const Pencil& P, double sigma) {
  int neg = 0;
  double piv = 1.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    double q = P.d[i] - sigma * P.w[i];
    if (i > 0) q -= P.e[i - 1] * P.e[i - 1] / piv;
    if (q == 0.0) q = -1e-300;
    neg += q < 0.0;
    piv = q;
  }
  return neg;
}

double kth_eigenvalue(const Pencil& P, int k) {
  double lo = INFINITY;
  for (std::size_t i = 0; i < P.size(); ++i) {
    double row = P.d[i];
    if (i > 0) row -= std::abs(P.e[i - 1]);
    if (i + 1 < P.size()) row -= std::abs(P.e[i]);
    lo = std::min(lo, row / P.w[i]);
  }
  double hi = std::max(1.0, std::abs(lo));
  while (count_below(P, hi) < k) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(P, mid) >= k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// log(r^2 p |u|^(p-1)) at node i; -inf where u = 0 or r = 0.
double log_r2_weight(const RadialSolution& sol, std::size_t i) {
  const double r = sol.mesh.r[i], u = sol.u[i];
  if (r <= 0.0 || u == 0.0) return -INFINITY;
  return 2.0 * std::log(r) + std::log(sol.p) + (sol.p - 1.0) * std::log(std::abs(u));
}

bool uses_log_form(const RadialSolution& sol) {
  return sol.domain.kind == DomainKind::UnitDisk && sol.mesh.grading.kind == GradingKind::LogGraded;
}

// Per-mode pencil. Log form: unknowns are the geometric nodes except r = 1,
// with the exterior solution e^{j t} closing the inner end (Robin term j).
// Radius form: linear elements with weight r, Dirichlet at r = 1 and at the
// inner radius of an annulus; at r = 0 natural for j = 0 and Dirichlet else.
Pencil mode_pencil(const RadialSolution& sol, int j) {
  const auto& r = sol.mesh.r;
  const std::size_t n = r.size();
  Pencil P;
  const double j2 = static_cast<double>(j) * j;
  if (uses_log_form(sol)) {
    const std::size_t b = sol.mesh.geometric_begin;
    for (std::size_t i = b; i + 1 < n; ++i) {
      const double hl = i > b ? std::log(r[i] / r[i - 1]) : 0.0;
      const double hr = std::log(r[i + 1] / r[i]);
      const double wt = 0.5 * (hl + hr);
      double d = 1.0 / hr + (hl > 0.0 ? 1.0 / hl : 0.0);
      const double c = j2 - std::exp(log_r2_weight(sol, i));
      P.potential_scale = std::max(P.potential_scale, std::abs(c));
      d += c * wt;
      if (i == b) d += j;
      P.d.push_back(d);
      P.w.push_back(wt);
      if (i + 2 < n) P.e.push_back(-1.0 / hr);
    }
    return P;
  }
  const bool annulus = sol.domain.kind == DomainKind::Annulus;
  const std::size_t first = (annulus || j > 0) ? 1 : 0;
  for (std::size_t i = first; i + 1 < n; ++i) {
    const double hl = i > 0 ? r[i] - r[i - 1] : 0.0;
    const double hr = r[i + 1] - r[i];
    const double lo = r[i] - 0.5 * hl, hi = r[i] + 0.5 * hr;
    const double wt = 0.5 * (hi * hi - lo * lo);  // int r dr over the dual cell
    const double am = 0.5 * (r[i] + r[i + 1]);
    double d = am / hr + (i > 0 ? 0.5 * (r[i] + r[i - 1]) / hl : 0.0);
    const double W = r[i] > 0.0 ? std::exp(log_r2_weight(sol, i)) / (r[i] * r[i]) : sol.p * std::pow(std::abs(sol.u[i]), sol.p - 1.0);
    const double c = (r[i] > 0.0 ? j2 / (r[i] * r[i]) : 0.0) - W;
    P.potential_scale = std::max(P.potential_scale, std::abs(c));
    d += c * wt;
    P.d.push_back(d);
    P.w.push_back(wt);
    if (i + 2 < n) P.e.push_back(-am / hr);
  }
  return P;
}

}  // namespace

ModeCount radial_mode(const RadialSolution& sol, int j, int eigenvalues) {
  const Pencil P = mode_pencil(sol, j);
  ModeCount mc;
  mc.j = j;
  mc.negative = count_below(P, 0.0);
  // Zero tolerance relative to the multiplication part of the operator; the
  // 1/h^2 stiffness scale says nothing about the physical spectrum.
  const double eps = 1e-8 * P.potential_scale;
  mc.indeterminate = count_below(P, -eps) != count_below(P, eps);
  for (int k = 1; k <= eigenvalues; ++k) mc.eigenvalues.push_back(kth_eigenvalue(P, k));
  return mc;
}

SpectrumReport morse_index_radial(const RadialSolution& sol, const MorseOptions& opt) {
  if (opt.j_max < 8) throw std::invalid_argument("j_max must be at least 8");
  SpectrumReport rep;
  int j = 0;
  for (; j <= opt.j_max; ++j) rep.modes.push_back(radial_mode(sol, j, opt.eigenvalues_per_mode));
  if (rep.modes.back().negative > 0) {
    if (!opt.auto_extend) {
      std::ostringstream os;
      os << "j_max = " << opt.j_max << " too small: mode " << opt.j_max << " still has "
         << rep.modes.back().negative << " negative eigenvalues";
      throw std::runtime_error(os.str());
    }
    while (rep.modes.back().negative > 0) {
      if (j > 1000) throw SolverError("angular modes do not terminate");
      rep.modes.push_back(radial_mode(sol, j++, opt.eigenvalues_per_mode));
    }
  }
  rep.j_max = rep.modes.back().j;
  for (const ModeCount& m : rep.modes) {
    rep.total += (m.j == 0 ? 1 : 2) * m.negative;
    rep.indeterminate |= m.indeterminate;
  }
  return rep;
}

DirichletEigenpair first_dirichlet_eigenpair(const PlanarOperator& op, double tol) {
  Eigen::SimplicialLLT<SpMat> chol(op.K);
  if (chol.info() != Eigen::Success) throw SolverError("stiffness matrix is not positive definite");
  DirichletEigenpair ep;
  Vec x = Vec::Ones(op.K.rows());
  double lambda = 0.0;
  for (int it = 1; it <= 2000; ++it) {
    const Vec rhs = op.M.cwiseProduct(x);
    x = chol.solve(rhs);
    x /= std::sqrt(x.dot(op.M.cwiseProduct(x)));
    const double next = x.dot(op.K * x);
    ep.iterations = it;
    if (std::abs(next - lambda) <= tol * next) {
      lambda = next;
      break;
    }
    lambda = next;
    if (it == 2000) throw SolverError("inverse iteration stagnated");
  }
  if (x.sum() < 0.0) x = -x;
  ep.lambda = lambda;
  ep.phi = x;
  return ep;
}

double first_eigenvalue(const DomainSpec& domain, const PlanarGrid& grid) {
  if (grid.domain.kind != domain.kind) throw std::invalid_argument("grid does not match the domain");
  return first_dirichlet_eigenpair(assemble_operator(grid)).lambda;
}

double first_eigenvalue(const DomainSpec& domain, const RadialMesh& mesh) {
  RadialSolution zero;
  zero.p = 2.0;
  zero.domain = domain;
  zero.mesh = mesh;
  zero.mesh.grading = Grading::uniform();  // radius form on any node set
  zero.u.assign(mesh.size(), 0.0);
  const Pencil P = mode_pencil(zero, 0);
  const std::size_t n = P.size();
  // Inverse iteration with a Thomas solve of the SPD tridiagonal A.
  std::vector<double> x(n, 1.0), y(n), c(n), dd(n);
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    for (std::size_t i = 0; i < n; ++i) y[i] = P.w[i] * x[i];
    c[0] = n > 1 ? P.e[0] / P.d[0] : 0.0;
    dd[0] = y[0] / P.d[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = P.d[i] - P.e[i - 1] * c[i - 1];
      c[i] = i + 1 < n ? P.e[i] / m : 0.0;
      dd[i] = (y[i] - P.e[i - 1] * dd[i - 1]) / m;
    }
    x[n - 1] = dd[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dd[i] - c[i] * x[i + 1];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double Ax = P.d[i] * x[i];
      if (i > 0) Ax += P.e[i - 1] * x[i - 1];
      if (i + 1 < n) Ax += P.e[i] * x[i + 1];
      num += x[i] * Ax;
      den += P.w[i] * x[i] * x[i];
    }
    const double next = num / den;
    const double norm = std::sqrt(den);
    for (double& v : x) v /= norm;
    if (std::abs(next - lambda) <= 1e-14 * next) return next;
    lambda = next;
  }
  throw SolverError("radial inverse iteration stagnated");
}

namespace {

Vec potential(const PlanarField& f) {
  const double p = f.p;
  return f.u.unaryExpr([p](double v) { return p * std::pow(std::abs(v), p - 1.0); });
}

}  // namespace

PlanarMorse morse_index_planar(const PlanarField& field) {
  const PlanarOperator op = assemble_operator(*field.grid);
  const Vec W = potential(field);
  SpMat J = op.K;
  for (Eigen::Index i = 0; i < J.rows(); ++i) J.coeffRef(i, i) -= op.M[i] * W[i];

  PlanarMorse out;
  Eigen::SimplicialLDLT<SpMat> ldlt(J);
  if (ldlt.info() != Eigen::Success) throw SolverError("LDL^T factorization of the Jacobian failed");
  const Vec D = ldlt.vectorD();
  for (Eigen::Index i = 0; i < D.size(); ++i) out.inertia += D[i] < 0.0;

  // Subspace iteration on (J - sigma M)^{-1} M with sigma below the spectrum.
  const double sigma = -W.maxCoeff() - 1.0;
  SpMat B = J;
  for (Eigen::Index i = 0; i < B.rows(); ++i) B.coeffRef(i, i) -= sigma * op.M[i];
  Eigen::SimplicialLLT<SpMat> chol(B);
  if (chol.info() != Eigen::Success) throw SolverError("shifted Jacobian is not positive definite");
  const int m = out.inertia + 4;
  const Eigen::Index n = J.rows();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd X(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k) X(i, k) = N(rng);
  Eigen::VectorXd theta;
  const int want = out.inertia + 1;
  for (int it = 0; it < 5000; ++it) {
    Eigen::MatrixXd Y(n, m);
    for (int k = 0; k < m; ++k) Y.col(k) = chol.solve(op.M.cwiseProduct(X.col(k)));
    const Eigen::MatrixXd JY = J * Y;
    const Eigen::MatrixXd MY = op.M.asDiagonal() * Y;
    Eigen::MatrixXd Ar = Y.transpose() * JY;
    Eigen::MatrixXd Br = Y.transpose() * MY;
    Ar = 0.5 * (Ar + Ar.transpose()).eval();
    Br = 0.5 * (Br + Br.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ar, Br);
    theta = ges.eigenvalues();
    X = Y * ges.eigenvectors();
    // residual check on the lowest `want` Ritz pairs
    bool done = true;
    const Eigen::MatrixXd JX = J * X;
    for (int k = 0; k < std::min(want, m); ++k) {
      const Vec res = JX.col(k) - theta[k] * op.M.cwiseProduct(X.col(k));
      const double rel = res.cwiseQuotient(op.M.cwiseSqrt()).norm() /
                         std::max(1.0, JX.col(k).cwiseQuotient(op.M.cwiseSqrt()).norm());
      done &= rel < 1e-7;
    }
    if (done) break;
  }
  const double zero_tol = 1e-8 * std::max(1.0, W.maxCoeff());
  for (int k = 0; k < m; ++k) {
    out.ritz_values.push_back(theta[k]);
    if (theta[k] < -zero_tol) ++out.ritz;
    if (std::abs(theta[k]) <= zero_tol) out.indeterminate = true;
  }
  return out;
}

double quadratic_form(const PlanarField& field, const Vec& phi) {
  const PlanarOperator op = assemble_operator(*field.grid);
  const Vec W = potential(field);
  return phi.dot(op.K * phi) - (op.M.cwiseProduct(W).cwiseProduct(phi.cwiseProduct(phi))).sum();
}

double quadratic_form(const RadialSolution& sol, const std::vector<double>& phi, int j) {
  const auto& r = sol.mesh.r;
  if (phi.size() != r.size()) throw std::invalid_argument("test function must live on the solution mesh");
  const double j2 = static_cast<double>(j) * j;
  const bool logs = uses_log_form(sol);
  const std::size_t g = logs ? sol.mesh.geometric_begin : r.size();
  double q = 0.0;
  // log of the integrand r^2 (j^2/r^2 - W) phi^2 per unit t, split in sign
  auto pot_t = [&](std::size_t i) {
    if (r[i] <= 0.0) return 0.0;
    return (j2 - std::exp(log_r2_weight(sol, i))) * phi[i] * phi[i];
  };
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double dphi = phi[i + 1] - phi[i];
    q += dphi * dphi * 0.5 * (r[i] + r[i + 1]) / (r[i + 1] - r[i]);
    if (i >= g) {
      q += 0.5 * std::log(r[i + 1] / r[i]) * (pot_t(i) + pot_t(i + 1));
    } else {
      // per unit r the integrand is pot_t / r; at r = 0 it vanishes unless j = 0
      auto pot_r = [&](std::size_t k) {
        if (r[k] > 0.0) return pot_t(k) / r[k];
        return 0.0;
      };
      q += 0.5 * (r[i + 1] - r[i]) * (pot_r(i) + pot_r(i + 1));
    }
  }
  return 2.0 * std::numbers::pi * q;
}

}  // namespace le
