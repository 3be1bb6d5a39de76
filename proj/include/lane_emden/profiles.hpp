#pragma once

#include "lane_emden/geometry.hpp"

namespace le {

/// Singular Liouville bubble data for a vanishing radius ell:
/// alpha = sqrt(2 ell^2 + 4), beta = ell ((alpha+2)/(alpha-2))^(1/alpha),
/// eta = alpha/2 - 1 and Dirac coefficient H = -4 pi eta.
struct SingularProfileParams {
  double ell = 0.0;
  double alpha = 2.0;
  double beta = 0.0;
  double eta = 0.0;
  double H = 0.0;
};

SingularProfileParams singular_params(double ell);

/// U(x) = log((1 + |x|^2/8)^-2).
double eval_U(const Point& x);
double eval_U_radial(double r);

/// V(r) = log(2 alpha^2 beta^alpha r^(alpha-2) / (beta^alpha + r^alpha)^2).
double eval_V(double r, const SingularProfileParams& q);
double eval_V_derivative(double r, const SingularProfileParams& q);

/// Total masses of e^U and e^V over the plane, by quadrature.
double mass_U();
double mass_V(const SingularProfileParams& q);

enum class ProfileKind { Regular, Singular };

/// V'' + V'/r + e^V evaluated analytically at radius r.
double liouville_residual(ProfileKind kind, double r, const SingularProfileParams& q = {});

/// One rescaled bubble: center, width mu, amplitude A, and the decay constant
/// kappa of the cut-off profile A (1 + W(|x - c|/mu)/kappa)_+.
struct BubbleSpec {
  Point center{0.0, 0.0};
  double mu = 1.0;
  double amplitude = 1.0;
  double kappa = 1.0;
};

/// Positive regular bubble minus a singular one, each cut off where it
/// changes sign. The singular bubble is evaluated at |x - center|/mu.
double bubble_tower(const Point& x, const BubbleSpec& plus, const BubbleSpec& minus,
                    const SingularProfileParams& q);

}  // namespace le
