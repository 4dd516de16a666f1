#ifndef VARICHECK_CONDITIONS_HPP_
#define VARICHECK_CONDITIONS_HPP_

#include <functional>

#include "varicheck/problem.hpp"

namespace varicheck {

// Scalar functionals along a candidate extremal. Every function evaluates at
// a SidedPoint (one-sided limits at breakpoints) and takes the probe
// direction xi relative to the path velocity.

/// Weierstrass excess E(t+-, xi) = L(t, x, v+xi) - L(t, x, v) - L_v^T xi.
double excess(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, const Vec& xi);

/// Legendre quadratic form xi^T L_vv(t+-) xi.
double legendre_form(const ProblemSpec& spec, const PiecewisePath& path,
                     const SidedPoint& p, const Vec& xi);

/// Third-order Legendre contraction: the v-gradient of xi^T L_vv xi dotted
/// with xi. Zero is the degenerate-Legendre equality conclusion.
double legendre_third_form(const ProblemSpec& spec, const PiecewisePath& path,
                           const SidedPoint& p, const Vec& xi);

/// L_x(t, x, v+xi) - L_x(t, x, v).
Vec delta_Lx(const ProblemSpec& spec, const PiecewisePath& path,
             const SidedPoint& p, const Vec& xi);

/// xi^T [L_x(t,x,v+xi) - L_x(t,x,v) - L_xv(t,x,v) xi]: the shared bracket of
/// the fourth-order point condition and the interval equality condition.
double excess_bracket(const ProblemSpec& spec, const PiecewisePath& path,
                      const SidedPoint& p, const Vec& xi);

/// Q_i = lambda^i E(t, xi) + (1 - lambda^i) E(t, lambda/(lambda-1) xi),
/// i in {1,2,3}; lambda in [0,1).
double q_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, int i);

/// M_i = lambda^i dLx(t,xi)^T xi
///       + (1-lambda)(1/2+lambda)^(i-1) dLx(t, lambda/(lambda-1) xi)^T xi,
/// i in {1,2}. M_1 is the degenerate-Weierstrass equality conclusion.
double m_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, int i);

/// One-sided finite-difference d/dt (order 1) or d^2/dt^2 (order 2) of a
/// scalar field, Richardson-extrapolated over two step halvings. The mesh
/// spans 4*step on the requested side of p.t.
double time_derivative(const std::function<double(double)>& f,
                       const SidedPoint& p, int order, double step);

/// W = lambda M_1 + d/dt Q_2 (the second-order expansion coefficient and the
/// first degenerate point condition). step <= 0 picks the default
/// (1e-4 x segment length, capped to stay inside the segment).
double w_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, double step);

/// G = lambda^2 xi^T [lambda Lxx(t,xi) + (1-lambda) Lxx(t, lambda/(lambda-1) xi)] xi
///     + 2 lambda d/dt M_2 + d^2/dt^2 Q_3 (third-order coefficient).
double g_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, double step);

/// K(t, eps, xi) = excess_bracket + d/dt E + (1+eps)/(2(1-eps)) d/dt
/// (xi^T L_vv xi); the fourth-order coefficient of the lambda = eps variation.
double k_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double epsilon, const Vec& xi, double step);

/// The fourth-order point condition evaluated from its three printed
/// summands: excess_bracket + d/dt E + 1/2 d/dt (xi^T L_vv xi). Coincides
/// with k_form as eps -> 0; both routes are kept and cross-checked in tests.
double degenerate_point_value(const ProblemSpec& spec, const PiecewisePath& path,
                              const SidedPoint& p, const Vec& xi, double step);

/// Interval inequality integrand:
/// eta^T [lb Lxx(t,eta) + (1-lb) Lxx(t, lb/(lb-1) eta)] eta
///   - d/dt dLx(t,eta)^T eta.
double interval_inequality_value(const ProblemSpec& spec, const PiecewisePath& path,
                                 const SidedPoint& p, double lambda_bar,
                                 const Vec& eta, double step);

/// Default one-sided FD step at p (1e-4 x owning segment length, capped so a
/// width-4*step mesh stays inside the segment).
double default_fd_step(const PiecewisePath& path, const SidedPoint& p);

/// Side actually used for one-sided difference meshes at p (TwoSided picks
/// the roomier direction).
Side fd_side(const PiecewisePath& path, const SidedPoint& p);

}  // namespace varicheck

#endif  // VARICHECK_CONDITIONS_HPP_
