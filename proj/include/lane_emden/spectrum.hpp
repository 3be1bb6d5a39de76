#pragma once

#include "lane_emden/planar.hpp"
#include "lane_emden/radial.hpp"

#include <vector>

namespace le {

struct ModeCount {
  int j = 0;
  int negative = 0;
  std::vector<double> eigenvalues;  // smallest few
  bool indeterminate = false;
};

/// Negative eigenvalue counts of the linearization -Delta - p|u|^(p-1) per
/// angular mode. Total = count(0) + 2 sum_{j>=1} count(j).
struct SpectrumReport {
  std::vector<ModeCount> modes;
  int total = 0;
  int j_max = 0;
  bool indeterminate = false;
};

struct MorseOptions {
  int j_max = 12;
  bool auto_extend = true;  // otherwise a nonzero count at j_max is an error
  int eigenvalues_per_mode = 3;
};

/// On log-graded disk meshes the per-mode form is discretized in t = log r,
///   Q_j(phi) = int (phi_t^2 + j^2 phi^2 - r^2 p|u|^(p-1) phi^2) dt,
/// which is the same quadratic form as in r but never forms r^2 or p|u|^(p-1)
/// separately. Reported eigenvalues are those of this t-form with unit weight
/// (same signs, hence the same counts). Other meshes use the r-form.
SpectrumReport morse_index_radial(const RadialSolution& sol, const MorseOptions& opt = {});

/// Negative count for one mode, exposed for tests and the CLI table.
ModeCount radial_mode(const RadialSolution& sol, int j, int eigenvalues = 3);

struct DirichletEigenpair {
  double lambda = 0.0;
  Eigen::VectorXd phi;  // positive, M-normalized
  int iterations = 0;
};

/// Inverse power iteration for the smallest eigenvalue of K x = lambda M x.
DirichletEigenpair first_dirichlet_eigenpair(const PlanarOperator& op, double tol = 1e-12);

double first_eigenvalue(const DomainSpec& domain, const PlanarGrid& grid);
/// Radial (j = 0) Dirichlet eigenvalue on a radial mesh, by inverse iteration
/// on the linear finite-element discretization in r.
double first_eigenvalue(const DomainSpec& domain, const RadialMesh& mesh);

struct PlanarMorse {
  int inertia = 0;              // negative pivots of an LDL^T factorization of the Jacobian
  int ritz = 0;                 // converged negative Ritz values of J x = lambda M x
  std::vector<double> ritz_values;
  bool indeterminate = false;   // an eigenvalue within the zero tolerance
  int index() const { return inertia; }
};

PlanarMorse morse_index_planar(const PlanarField& field);

/// Discrete Q(phi) = phi^T K phi - sum M p|u|^(p-1) phi^2.
double quadratic_form(const PlanarField& field, const Eigen::VectorXd& phi);
/// Radial Q for an angular mode j; phi given on the solution mesh, zero at r = 1.
double quadratic_form(const RadialSolution& sol, const std::vector<double>& phi, int j = 0);

}  // namespace le
