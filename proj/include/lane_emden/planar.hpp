#pragma once

#include "lane_emden/errors.hpp"
#include "lane_emden/geometry.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace le {

/// Discrete Dirichlet Laplacian in weak form: K u = M (-Delta_h u), with K
/// symmetric positive definite and M the diagonal of cell areas.
struct PlanarOperator {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd M;
};

PlanarOperator assemble_operator(const PlanarGrid& grid);

struct PlanarField {
  std::shared_ptr<const PlanarGrid> grid;
  Eigen::VectorXd u;
  double p = 0.0;
  int iterations = 0;
  double residual = 0.0;  // max |Delta_h u + |u|^(p-1) u| / max(1, max |u|^p)
  int symmetry = 1;       // rotation order enforced (polar grids)
  bool antisymmetric = false;
  std::string init;

  double sup_norm() const { return u.size() ? u.cwiseAbs().maxCoeff() : 0.0; }
};

/// Relative discrete residual of -Delta_h u = |u|^(p-1) u.
double planar_residual(const PlanarOperator& op, const Eigen::VectorXd& u, double p);

/// t u with t^(p-1) = u^T K u / sum M |u|^(p+1), so that t u satisfies the
/// discrete Nehari identity.
Eigen::VectorXd nehari_project(const PlanarOperator& op, const Eigen::VectorXd& u, double p);

/// t u+ - s u- with both discrete nodal Nehari identities satisfied, including
/// the cross coupling u+^T K u- of the discrete Dirichlet form.
Eigen::VectorXd nodal_nehari_project(const PlanarOperator& op, const Eigen::VectorXd& u, double p);

/// Discrete energies (all multiplied by p).
struct PlanarEnergy {
  double pE = 0.0, p_dirichlet = 0.0, p_lp1 = 0.0, p_lp = 0.0;
  double p_dirichlet_plus = 0.0, p_dirichlet_minus = 0.0;
  double p_lp1_plus = 0.0, p_lp1_minus = 0.0;
};
PlanarEnergy planar_energy(const PlanarOperator& op, const Eigen::VectorXd& u, double p);

enum class InitKind { Eigen, Tower, Given };

struct PlanarOptions {
  InitKind init = InitKind::Eigen;
  std::optional<Eigen::VectorXd> initial;  // used with InitKind::Given
  int symmetry = 1;                        // rotation order (polar grids)
  bool antisymmetric = false;              // u(x,y) = -u(y,x), square grids
  double tol = 1e-9;
  int max_newton = 60;
  int gradient_steps = 40;  // projected Sobolev-gradient steps before Newton
  std::uint64_t seed = 0;   // nonzero: random cos(s theta) perturbation of tower inits
};

PlanarField solve_positive(double p, std::shared_ptr<const PlanarGrid> grid, const PlanarOptions& opt = {});
PlanarField solve_nodal(double p, std::shared_ptr<const PlanarGrid> grid, const PlanarOptions& opt = {});

/// Continuation from a converged field: each step starts from the previous
/// field rescaled onto the (nodal) Nehari set. Stops early on failure and
/// returns the converged prefix.
std::vector<PlanarField> continue_in_p(const PlanarField& start, const std::vector<double>& schedule,
                                       const PlanarOptions& opt = {});

/// Initial guess for sign-changing solutions built from the radial nodal
/// profile data at the same p (bubble-tower formula).
Eigen::VectorXd tower_initial_guess(const PlanarGrid& grid, double p, std::uint64_t seed);

/// Polar disk grid for tower computations at exponent p: geometric radial
/// faces from half the positive bubble width, so the innermost wedges stay
/// above the rounding floor of the discrete Laplacian.
std::shared_ptr<const PlanarGrid> tower_grid(double p, int nr = 160, int ntheta = 64);

/// Zero level set geometry by linear interpolation along grid edges.
struct NodalLineGeometry {
  bool sign_changing = false;
  bool touches_boundary = false;
  double min_radius = 0.0;  // min |y| over the zero set
  double max_radius = 0.0;  // max |y| over the zero set
  std::vector<Point> points;
};
NodalLineGeometry nodal_line_geometry(const PlanarField& field);

/// Largest deviation of u from its image under rotation by 2 pi / s
/// (polar grids with ntheta divisible by s).
double rotation_defect(const PlanarField& field, int s);

}  // namespace le
