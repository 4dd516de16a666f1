#include "varicheck/variation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "varicheck/conditions.hpp"
#include "varicheck/quadrature.hpp"

namespace varicheck {

namespace {

double mu_of(double lambda) { return lambda / (lambda - 1.0); }

struct BumpGeometry {
  double lo, kink, hi;  // support [lo, hi], slope change at kink
  double lambda;
  int segment;  // original segment holding the support
};

BumpGeometry bump_geometry(const PiecewisePath& path, const VariationParams& vp) {
  if (vp.side == Side::TwoSided)
    throw ProblemError("variation side must be + or -");
  if (!(vp.epsilon > 0.0)) throw ProblemError("variation epsilon must be positive");
  double lambda = vp.lambda_equals_epsilon ? vp.epsilon : vp.lambda;
  if (vp.lambda_equals_epsilon && !(vp.epsilon < 1.0))
    throw ProblemError("lambda = epsilon mode requires epsilon < 1");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw ProblemError("variation lambda must lie in [0, 1)");
  BumpGeometry g;
  g.lambda = lambda;
  const double snap = 1e-12 * (path.t_end() - path.t_begin());
  if (vp.side == Side::Plus) {
    g.lo = vp.theta;
    g.hi = vp.theta + vp.epsilon;
    g.kink = vp.theta + lambda * vp.epsilon;
    if (g.hi > path.t_end() + snap)
      throw ProblemError("variation support exits the interval on the right");
    g.segment = path.segment_index({vp.theta, Side::Plus});
  } else {
    g.lo = vp.theta - vp.epsilon;
    g.hi = vp.theta;
    g.kink = vp.theta - lambda * vp.epsilon;
    if (g.lo < path.t_begin() - snap)
      throw ProblemError("variation support exits the interval on the left");
    g.segment = path.segment_index({vp.theta, Side::Minus});
  }
  const auto& breaks = path.breakpoints();
  if (g.lo < breaks[g.segment] - snap || g.hi > breaks[g.segment + 1] + snap)
    throw ProblemError("variation support [" + std::to_string(g.lo) + ", " +
                       std::to_string(g.hi) +
                       "] is not contained in one smooth segment");
  return g;
}

// h_i(t) on the piece next to theta: (t - theta) xi_i;
// on the far piece: mu (t - far_end) xi_i with far_end = theta +- epsilon.
ExprPtr bump_near(double theta, double xi_i) {
  return make_mul(make_constant(xi_i),
                  make_sub(make_time(), make_constant(theta)));
}

ExprPtr bump_far(double far_end, double mu_xi_i) {
  return make_mul(make_constant(mu_xi_i),
                  make_sub(make_time(), make_constant(far_end)));
}

}  // namespace

PiecewisePath build_variation(const PiecewisePath& path, const VariationParams& vp) {
  if (static_cast<int>(vp.xi.size()) != path.dimension())
    throw ProblemError("variation xi must match the path dimension");
  BumpGeometry g = bump_geometry(path, vp);
  if (norm_inf(vp.xi) == 0.0 || g.lambda == 0.0)
    return path;  // zero bump: identical path

  const auto& breaks = path.breakpoints();
  const int n = path.dimension();
  const double snap = 1e-12 * (path.t_end() - path.t_begin());
  const double far_end = vp.side == Side::Plus ? g.hi : g.lo;
  const double mu = mu_of(g.lambda);

  std::vector<double> new_breaks;
  std::vector<std::vector<ExprPtr>> new_segs;
  std::vector<double> angular(path.angular_points());

  auto push_piece = [&](double from, double to, int orig_seg, int zone) {
    // zone 0: untouched; 1: slope-xi piece; 2: slope-mu*xi piece
    if (to - from <= snap) return;
    if (new_breaks.empty()) new_breaks.push_back(from);
    new_breaks.push_back(to);
    std::vector<ExprPtr> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
      const ExprPtr& orig = path.segment_component(orig_seg, i);
      switch (zone) {
        case 0: comps.push_back(orig); break;
        case 1: comps.push_back(make_add(orig, bump_near(vp.theta, vp.xi[i]))); break;
        default:
          comps.push_back(make_add(orig, bump_far(far_end, mu * vp.xi[i])));
      }
    }
    new_segs.push_back(std::move(comps));
  };

  const double near_lo = vp.side == Side::Plus ? g.lo : g.kink;
  const double near_hi = vp.side == Side::Plus ? g.kink : g.hi;
  const double far_lo = vp.side == Side::Plus ? g.kink : g.lo;
  const double far_hi = vp.side == Side::Plus ? g.hi : g.kink;

  for (int k = 0; k + 1 < static_cast<int>(breaks.size()); ++k) {
    if (k != g.segment) {
      push_piece(breaks[k], breaks[k + 1], k, 0);
      continue;
    }
    push_piece(breaks[k], g.lo, k, 0);
    if (vp.side == Side::Plus) {
      push_piece(near_lo, near_hi, k, 1);
      push_piece(far_lo, far_hi, k, 2);
    } else {
      push_piece(far_lo, far_hi, k, 2);
      push_piece(near_lo, near_hi, k, 1);
    }
    push_piece(g.hi, breaks[k + 1], k, 0);
  }

  // every bump edge where the slope actually jumps becomes angular
  auto mark_angular = [&](double t, double jump) {
    if (std::fabs(jump) <= 1e-14) return;
    if (t <= new_breaks.front() + snap || t >= new_breaks.back() - snap) return;
    for (double existing : angular)
      if (std::fabs(existing - t) <= snap) return;
    angular.push_back(t);
  };
  double xi_scale = norm_inf(vp.xi);
  mark_angular(vp.side == Side::Plus ? g.lo : g.hi, xi_scale);
  mark_angular(g.kink, (mu - 1.0) * xi_scale);
  mark_angular(far_end, mu * xi_scale);

  return PiecewisePath(std::move(new_breaks), std::move(new_segs),
                       std::move(angular));
}

double increment(const ProblemSpec& spec, const PiecewisePath& path,
                 const VariationParams& vp, double tol) {
  if (!(tol > 0.0)) throw ProblemError("increment tolerance must be positive");
  BumpGeometry g = bump_geometry(path, vp);
  if (norm_inf(vp.xi) == 0.0 || g.lambda == 0.0) return 0.0;
  const IntegrandBundle& ib = spec.integrand;
  const double mu = mu_of(g.lambda);
  const double far_end = vp.side == Side::Plus ? g.hi : g.lo;
  const int n = path.dimension();

  // the integrand difference along the bump, with the base path pinned to its
  // owning segment (no breakpoint snapping inside the quadrature)
  auto difference = [&](double t, bool near_piece) {
    Vec x = path.eval_on_segment(g.segment, t, 0);
    Vec v = path.eval_on_segment(g.segment, t, 1);
    EvalPoint base{t, {x.data(), x.size()}, {v.data(), v.size()}};
    double l_base = ib.eval_L(base);
    Vec xv(x), vv(v);
    for (int i = 0; i < n; ++i) {
      if (near_piece) {
        xv[i] += (t - vp.theta) * vp.xi[i];
        vv[i] += vp.xi[i];
      } else {
        xv[i] += mu * (t - far_end) * vp.xi[i];
        vv[i] += mu * vp.xi[i];
      }
    }
    EvalPoint varied{t, {xv.data(), xv.size()}, {vv.data(), vv.size()}};
    return ib.eval_L(varied) - l_base;
  };

  const bool plus = vp.side == Side::Plus;
  double total = 0.0;
  struct Piece { double a, b; bool near; };
  Piece pieces[2] = {plus ? Piece{g.lo, g.kink, true} : Piece{g.lo, g.kink, false},
                     plus ? Piece{g.kink, g.hi, false} : Piece{g.kink, g.hi, true}};
  for (const Piece& piece : pieces) {
    if (piece.b - piece.a <= 0.0) continue;
    auto f = [&](double t) { return difference(t, piece.near); };
    total += integrate_adaptive(f, piece.a, piece.b, tol).value;
  }
  return total;
}

double default_epsilon_max(const PiecewisePath& path, double theta, Side side) {
  double room = path.room_on_side(theta, side);
  if (!(room > 0.0))
    throw ProblemError("no room for a variation at theta on the requested side");
  return std::min(0.9 * room, 0.9);
}

std::vector<double> default_epsilon_ladder(double eps_max, int first_halving,
                                           int last_halving) {
  std::vector<double> out;
  for (int k = first_halving; k <= last_halving; ++k)
    out.push_back(eps_max * std::pow(2.0, -k));
  return out;
}

ExpansionFit fit_expansion(const ProblemSpec& spec, const PiecewisePath& path,
                           const VariationParams& vp_template,
                           const std::vector<int>& powers,
                           const std::vector<double>& epsilons, double quad_tol) {
  if (powers.empty()) throw ProblemError("fit_expansion needs at least one power");
  if (epsilons.size() < 2 * powers.size())
    throw ProblemError("fit_expansion needs at least twice as many epsilons as powers");
  for (std::size_t k = 0; k + 1 < epsilons.size(); ++k)
    if (!(epsilons[k] > epsilons[k + 1]))
      throw ProblemError("epsilon ladder must be strictly decreasing");
  const int pmax = *std::max_element(powers.begin(), powers.end());

  ExpansionFit fit;
  fit.powers = powers;
  fit.epsilons = Vec(epsilons.begin(), epsilons.end());
  fit.increments.resize(epsilons.size());
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    VariationParams vp = vp_template;
    vp.epsilon = epsilons[k];
    fit.increments[k] = increment(spec, path, vp, quad_tol);
  }

  const int rows = static_cast<int>(epsilons.size());
  const int cols = static_cast<int>(powers.size());
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (int k = 0; k < rows; ++k) {
    double w = std::pow(epsilons[k], -pmax);
    for (int j = 0; j < cols; ++j)
      A(k, j) = std::pow(epsilons[k], powers[j]) * w;
    b(k) = fit.increments[k] * w;
  }
  Eigen::VectorXd col_scale(cols);
  for (int j = 0; j < cols; ++j) {
    col_scale(j) = A.col(j).norm();
    if (col_scale(j) == 0.0) col_scale(j) = 1.0;
    A.col(j) /= col_scale(j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smin = svd.singularValues()(cols - 1);
  double smax = svd.singularValues()(0);
  fit.condition_number = smin > 0.0 ? smax / smin
                                    : std::numeric_limits<double>::infinity();
  if (!(fit.condition_number < 1e12))
    throw ProblemError("expansion fit is ill-conditioned (condition number " +
                       std::to_string(fit.condition_number) + ")");
  Eigen::VectorXd c = svd.solve(b);
  fit.coefficients.resize(cols);
  for (int j = 0; j < cols; ++j) fit.coefficients[j] = c(j) / col_scale(j);

  fit.residual = 0.0;
  for (int k = 0; k < rows; ++k) {
    double model = 0.0;
    for (int j = 0; j < cols; ++j)
      model += fit.coefficients[j] * std::pow(epsilons[k], powers[j]);
    fit.residual = std::max(fit.residual, std::fabs(fit.increments[k] - model) /
                                              std::pow(epsilons[k], pmax));
  }
  return fit;
}

double FitTolerances::for_power(int power) const {
  switch (power) {
    case 1: return c1;
    case 2: return c2;
    case 3: return c3;
    default: return c4;
  }
}

PropositionReport verify_proposition(const ProblemSpec& spec,
                                     const PiecewisePath& path,
                                     const VariationParams& vp_template,
                                     const std::string& proposition,
                                     const FitTolerances& tol, double quad_tol,
                                     double eps_max_override) {
  const bool plus = vp_template.side == Side::Plus;
  SidedPoint p{vp_template.theta, vp_template.side};
  const Vec& xi = vp_template.xi;
  const double fd = 0.0;  // default step

  PropositionReport report;
  report.proposition = proposition;
  report.side = vp_template.side;
  report.theta = vp_template.theta;
  report.xi = xi;

  VariationParams vp = vp_template;
  std::vector<int> powers;
  Vec predicted;
  if (proposition == "2.1" || proposition == "2.2") {
    vp.lambda_equals_epsilon = false;
    report.lambda = vp.lambda;
    double q1 = q_form(spec, path, p, vp.lambda, xi, 1);
    double w = w_form(spec, path, p, vp.lambda, xi, fd);
    double half_w = plus ? 0.5 * w : -0.5 * w;
    if (proposition == "2.1") {
      double g = g_form(spec, path, p, vp.lambda, xi, fd);
      powers = {1, 2, 3};
      predicted = {q1, half_w, g / 6.0};
    } else {
      powers = {1, 2};
      predicted = {q1, half_w};
    }
  } else if (proposition == "2.3") {
    vp.lambda_equals_epsilon = true;
    report.lambda = std::numeric_limits<double>::quiet_NaN();
    double e = excess(spec, path, p, xi);
    double legendre = legendre_form(spec, path, p, xi);
    double k0 = degenerate_point_value(spec, path, p, xi, fd);
    double t3 = legendre_third_form(spec, path, p, xi);
    powers = {2, 3, 4};
    double c4 = 0.5 * legendre + (plus ? 0.5 : -0.5) * k0 - t3 / 6.0;
    predicted = {e, 0.5 * legendre, c4};
  } else {
    throw ProblemError("verify_proposition handles 2.1, 2.2 and 2.3");
  }

  double eps_max = eps_max_override > 0.0
                       ? eps_max_override
                       : default_epsilon_max(path, vp.theta, vp.side);
  std::vector<double> ladder = vp.lambda_equals_epsilon
                                   ? default_epsilon_ladder(eps_max, 5, 12)
                                   : default_epsilon_ladder(eps_max);
  ExpansionFit fit = fit_expansion(spec, path, vp, powers, ladder, quad_tol);

  report.fit_residual = fit.residual;
  report.condition_number = fit.condition_number;
  report.pass = true;
  for (std::size_t j = 0; j < powers.size(); ++j) {
    CoefficientCheck check;
    check.power = powers[j];
    check.predicted = predicted[j];
    check.fitted = fit.coefficients[j];
    check.deviation = std::fabs(check.fitted - check.predicted);
    check.bound = tol.for_power(powers[j]) * std::max(1.0, std::fabs(check.predicted));
    check.pass = check.deviation <= check.bound;
    report.pass = report.pass && check.pass;
    report.coefficients.push_back(check);
  }
  return report;
}

}  // namespace varicheck
