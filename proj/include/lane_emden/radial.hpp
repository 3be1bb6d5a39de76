#pragma once

#include "lane_emden/errors.hpp"
#include "lane_emden/geometry.hpp"

#include <optional>
#include <vector>

namespace le {

/// Radial solution of -u'' - u'/r = |u|^(p-1) u with u = 0 on the outer
/// boundary (and on r = a for an annulus).
///
/// On the disk the solution is stored together with its scale data:
/// log_amplitude = log|u(0)| and log_mu = -(log p + (p-1) log|u(0)|)/2, so
/// that p r^2 |u|^(p-1) never has to be formed in linear scale.
struct RadialSolution {
  double p = 0.0;
  DomainSpec domain;
  RadialMesh mesh;
  std::vector<double> u;   // u(r_i)
  std::vector<double> du;  // u'(r_i)
  int nodal_count = 0;
  double center_value = 0.0;  // u(0) on the disk, u'(a) on the annulus
  std::vector<double> zeros;  // interior zeros
  double log_amplitude = 0.0;
  double log_mu = 0.0;

  double boundary_residual = 0.0;
  double collocation_discrepancy = -1.0;  // relative u(0) change, < 0 if not run
  int bisection_steps = 0;

  double sup_norm() const;
  /// Cubic Hermite interpolation of u at radius r (0 <= r <= 1).
  double value_at(double r) const;
  /// r u'(r); finite even where u' alone is huge.
  double r_du(std::size_t i) const { return mesh.r[i] * du[i]; }
};

/// Trajectory of the initial-value problem sampled on a mesh.
struct Trajectory {
  std::vector<double> u, du;
  std::vector<double> zeros;  // sign changes in the open interval
  double end_value = 0.0;     // u at r = 1
};

/// Disk: u(0) = a, u'(0) = 0. Annulus: u(inner) = 0, u'(inner) = a.
Trajectory shoot(double p, double a, const RadialMesh& mesh, const DomainSpec& domain);

struct RadialOptions {
  std::optional<RadialMesh> mesh;  // default: LogGraded keyed to the computed bubble scale
  double dt = 0.01;                // log spacing of the default mesh
  bool collocation_check = true;   // run the Newton collocation cross-check (p <= 50)
  int max_bisection = 200;
};

RadialSolution solve_radial(double p, int k, const DomainSpec& domain, const RadialOptions& opt = {});

/// Zeros s_1 < s_2 < ... of the scaled profile w with w(0) = 1 solving
/// w'' + w'/s + |w|^(p-1) w / p = 0. Used to size brackets and as a probe.
std::vector<double> scaled_zeros(double p, int count);

/// Newton solve of the scaled boundary-value problem on a uniform log-radius
/// grid (fourth-order Numerov), started from the given solution perturbed by
/// `perturb`. Returns the relative change of the center value.
double collocation_check(const RadialSolution& sol, int n = 20001, double perturb = 0.02);

struct RadialEnergy {
  double pE = 0.0;          // p E_p(u) = p/2 int |grad u|^2 - p/(p+1) int |u|^(p+1)
  double p_dirichlet = 0.0;  // p int |grad u|^2
  double p_lp1 = 0.0;        // p int |u|^(p+1)
  double p_lp = 0.0;         // p int |u|^p
  double p_dirichlet_plus = 0.0, p_dirichlet_minus = 0.0;
  double p_lp1_plus = 0.0, p_lp1_minus = 0.0;
};

RadialEnergy radial_energy(const RadialSolution& sol);

}  // namespace le
