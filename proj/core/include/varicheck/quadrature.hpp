#ifndef VARICHECK_QUADRATURE_HPP_
#define VARICHECK_QUADRATURE_HPP_

#include <functional>
#include <stdexcept>

namespace varicheck {

class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// Adaptive bisection driven by a Gauss(7)/Kronrod(15) pair. Targets an
/// absolute error <= abs_tol on [a, b]; throws QuadratureError when the
/// interval budget is exhausted before the tolerance is met. Exact (to
/// roundoff) for polynomials up to degree 13 even without subdivision.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_intervals = 4000);

}  // namespace varicheck

#endif  // VARICHECK_QUADRATURE_HPP_
