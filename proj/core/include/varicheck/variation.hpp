#ifndef VARICHECK_VARIATION_HPP_
#define VARICHECK_VARIATION_HPP_

#include <string>
#include <vector>

#include "varicheck/problem.hpp"

namespace varicheck {

/// A single needle variation: a piecewise-linear bump supported on
/// [theta, theta+epsilon] (Plus) or [theta-epsilon, theta] (Minus) with slope
/// xi on the lambda*epsilon-wide piece next to theta and slope
/// lambda/(lambda-1) xi on the remainder. lambda_equals_epsilon selects the
/// special mode where the split is rebuilt as lambda = epsilon per sample.
struct VariationParams {
  double theta = 0.0;
  double lambda = 0.5;
  bool lambda_equals_epsilon = false;
  Vec xi;
  Side side = Side::Plus;  // Plus or Minus
  double epsilon = 0.0;
};

/// Returns the varied path x + h(.; theta, lambda, xi, epsilon). The bump
/// must fit inside one smooth segment; boundary values are untouched, so the
/// result is admissible for the same problem. xi = 0 (or lambda = 0) returns
/// the original path.
PiecewisePath build_variation(const PiecewisePath& path, const VariationParams& vp);

/// J(varied) - J(original): quadrature of the integrand difference confined
/// to the bump support, split at the slope kink. Absolute error <= 2*tol.
double increment(const ProblemSpec& spec, const PiecewisePath& path,
                 const VariationParams& vp, double tol);

struct ExpansionFit {
  std::vector<int> powers;
  Vec coefficients;
  Vec epsilons;
  Vec increments;
  double residual = 0.0;        // max |dJ - sum c e^p| / e^pmax over samples
  double condition_number = 0.0;
};

/// Least-squares fit of increment(epsilon) against the requested powers over
/// a decreasing epsilon ladder (at least twice as many samples as powers).
/// Rows are weighted by epsilon^-max(powers) so the residual definition above
/// is the quantity minimized.
ExpansionFit fit_expansion(const ProblemSpec& spec, const PiecewisePath& path,
                           const VariationParams& vp_template,
                           const std::vector<int>& powers,
                           const std::vector<double>& epsilons, double quad_tol);

/// 0.9 x the distance from theta to the nearest breakpoint on the chosen
/// side (capped below 1 for the lambda = epsilon mode).
double default_epsilon_max(const PiecewisePath& path, double theta, Side side);

/// Geometric ladder eps_max * 2^-k, k = first_halving..last_halving.
/// The lambda = epsilon expansions fit against epsilon^4 and need the deeper
/// 5..12 ladder to keep the o(epsilon^4) remainder out of the coefficients.
std::vector<double> default_epsilon_ladder(double eps_max, int first_halving = 3,
                                           int last_halving = 10);

struct FitTolerances {
  double c1 = 1e-6;
  double c2 = 1e-4;
  double c3 = 1e-2;
  double c4 = 1e-2;
  double for_power(int power) const;  // tolerance for the epsilon^power coefficient
};

struct CoefficientCheck {
  int power = 0;
  double predicted = 0.0;
  double fitted = 0.0;
  double deviation = 0.0;  // |fitted - predicted|
  double bound = 0.0;      // tolerance * max(1, |predicted|)
  bool pass = false;
};

struct PropositionReport {
  std::string proposition;  // "2.1", "2.2", "2.3"
  Side side = Side::Plus;
  double theta = 0.0;
  double lambda = 0.0;  // NaN in the lambda = epsilon mode
  Vec xi;
  std::vector<CoefficientCheck> coefficients;
  double fit_residual = 0.0;
  double condition_number = 0.0;
  bool pass = false;
};

/// Predicts the expansion coefficients from the condition formulas (Q1, W, G
/// for 2.1; Q1, W for 2.2; E, Legendre and the fourth-order combination for
/// 2.3, signs flipped on the Minus side exactly as the expansions state) and
/// compares them against fit_expansion.
PropositionReport verify_proposition(const ProblemSpec& spec,
                                     const PiecewisePath& path,
                                     const VariationParams& vp_template,
                                     const std::string& proposition,
                                     const FitTolerances& tol, double quad_tol,
                                     double eps_max_override = 0.0);

}  // namespace varicheck

#endif  // VARICHECK_VARIATION_HPP_
