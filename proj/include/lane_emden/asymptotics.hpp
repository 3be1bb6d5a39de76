#pragma once

#include "lane_emden/errors.hpp"
#include "lane_emden/geometry.hpp"
#include "lane_emden/planar.hpp"
#include "lane_emden/profiles.hpp"
#include "lane_emden/radial.hpp"

#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace le {

/// A solution seen as a planar point cloud: candidate nodes with values and
/// gradient magnitudes, plus an interpolant for off-node evaluation.
/// Radial solutions contribute the nodes of one ray (x, 0), x = r_i.
struct FieldView {
  double p = 0.0;
  DomainSpec domain;
  std::vector<Point> nodes;
  std::vector<double> values;
  std::vector<double> grad;  // |grad u| at the nodes
  std::function<double(const Point&)> eval;
  double cell = 0.0;         // node spacing at the coarsest place, "one cell"
  bool radial = false;
  // Radial views: the zero radii; planar views: interpolated zero-set points.
  std::vector<Point> zero_set;

  std::size_t size() const { return nodes.size(); }
};

FieldView view_of(const RadialSolution& sol);
FieldView view_of(const PlanarField& field);

/// Analytic field sum_i m (1 + U(|x - c_i|/mu)/p)_+ with mu = (p m^(p-1))^(-1/2),
/// sampled on log-polar clouds around each center plus a background lattice.
FieldView synthetic_bubbles(double p, double m, const std::vector<Point>& centers);

/// mu = (p |u|^(p-1))^(-1/2), evaluated in log space.
double log_scale(double p, double value);
double scale_of(const FieldView& f, const Point& x);
double scale_of(const RadialSolution& sol, double r);

struct RescaledProfile {
  Point center{0.0, 0.0};
  double mu = 1.0;
  int sign = 1;
  double p = 0.0;
  double window = 0.0;
  Point axis{1.0, 0.0};  // unit vector from the concentration point to the center
  std::vector<Point> x;  // rescaled sample positions
  std::vector<double> v;
  bool truncated = false;
};

/// v(x) = (p/u(c)) (u(c + mu x) - u(c)) on the lattice x in [-R, R]^2 with
/// |x| <= R, `side` points per axis.
RescaledProfile rescale(const FieldView& f, const Point& center, double mu, double window, int side = 65,
                        bool allow_truncation = false);

enum class StopReason { Threshold, Separation, Guard };

struct ConcentrationReport {
  double cstar = 64.0;
  double separation_cutoff = 10.0;
  std::vector<Point> points;
  std::vector<double> log_mu;
  std::vector<double> peaks;  // u(x_i)
  // separation[i][j] = |x_i - x_j| / mu_i
  std::vector<std::vector<double>> separation;
  double p3 = 0.0;  // sup p R_k^2 |u|^(p-1) after the last extraction
  double p4 = 0.0;  // sup p R_k |grad u|
  Point next_candidate{0.0, 0.0};
  StopReason stop = StopReason::Threshold;
  int k() const { return static_cast<int>(points.size()); }
};

/// Greedy exhaustion. x_1 = argmax |u|. While M_n = max p R_n^2 |u|^(p-1) > C*,
/// the argmax is added if it is separated from every x_i by at least
/// `separation_cutoff` times the larger of the two scales; otherwise the
/// exhaustion stops (StopReason::Separation). k = 16 is a hard guard.
ConcentrationReport extract_concentration_points(const FieldView& f, double cstar = 64.0,
                                                 double separation_cutoff = 10.0);

/// log of p R_n(x)^2 |u(x)|^(p-1) at node i for the given centers.
double log_p3_density(const FieldView& f, std::size_t i, const std::vector<Point>& centers);

struct EnergyReport {
  double two_pE = 0.0;
  double p_dirichlet = 0.0, p_lp1 = 0.0, p_lp = 0.0;
  double p_dirichlet_plus = 0.0, p_dirichlet_minus = 0.0;
  double p_lp1_plus = 0.0, p_lp1_minus = 0.0;
  bool nodal = false;
  bool whole_above = false;  // p int |grad u|^2 >= 8 pi e (1 - slack)
  bool plus_above = false;   // per sign part, nodal only
  bool minus_above = false;
};

inline constexpr double kEightPiE = 8.0 * std::numbers::pi * std::numbers::e;

EnergyReport energy_report(const RadialSolution& sol, double slack = 0.05);
EnergyReport energy_report(const PlanarField& field, double slack = 0.05);

struct BubbleFit {
  ProfileKind family = ProfileKind::Regular;
  double ell = 0.0;        // Singular only
  double residual = 0.0;   // sup distance over the samples
  double rms = 0.0;
};

/// Regular: distance to U, no parameters. Singular: least squares over ell
/// for V_ell(|x - x_inf|) with x_inf = -ell * axis.
BubbleFit fit_bubble(const RescaledProfile& profile, ProfileKind family);

struct NodalMetrics {
  Point x_plus{0.0, 0.0}, x_minus{0.0, 0.0};
  double mu_plus = 0.0, mu_minus = 0.0;
  double log_mu_plus = 0.0, log_mu_minus = 0.0;
  double nl_max_radius = 0.0;  // max |y| over the zero set
  double dist_plus = 0.0;      // dist(x+, NL)
  double dist_minus = 0.0;     // dist(x-, NL)
  double mu_ratio = 0.0;       // mu+/mu-
  double nl_over_mu_minus = 0.0;
  double dist_plus_over_mu = 0.0;
  double dist_minus_over_mu = 0.0;
};

/// Extrema are refined off the nodes along the ray for radial views.
NodalMetrics nodal_metrics(const FieldView& f);

/// Node i of a radial view moved to the extremum of the interpolant between
/// its neighbours; planar views return the node itself.
Point refine_extremum(const FieldView& f, std::size_t i);

struct LimitRow {
  double p = 0.0;
  double sqrtp_sup = 0.0;    // sup |sqrt(p) u_p| on the test set
  double cauchy = -1.0;      // sup |p u_p - p' u_p'| against the previous member, < 0 for the first
};

struct TestAnnulus {
  double inner = 0.4, outer = 0.9;
  int radii = 26, angles = 64;
  std::vector<Point> samples() const;
};

/// Family in increasing p. Throws if a 10 mu_i ball around an extracted
/// point meets the test set.
std::vector<LimitRow> limit_function_check(const std::vector<FieldView>& family,
                                           const ConcentrationReport& report, const TestAnnulus& set = {});

}  // namespace le
