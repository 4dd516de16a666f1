#include "varicheck/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace varicheck {

namespace {

// Kronrod-15 abscissae on [-1, 1] (symmetric; odd entries are the Gauss-7
// points) and the matching weights. Standard QUADPACK constants.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double value;
  double error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double kronrod = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  kronrod *= h;
  gauss *= h;
  // plain |K15 - G7|: conservative for smooth integrands
  double err = std::fabs(kronrod - gauss);
  return Interval{a, b, kronrod, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_intervals) {
  if (!(abs_tol > 0.0)) throw QuadratureError("quadrature tolerance must be positive");
  if (a == b) return {0.0, 0.0, 0};
  std::priority_queue<Interval> queue;
  Interval whole = gauss_kronrod(f, a, b);
  double total = whole.value;
  double total_err = whole.error;
  queue.push(whole);
  int count = 1;
  while (total_err > abs_tol) {
    if (count >= max_intervals)
      throw QuadratureError(
          "quadrature did not converge within the interval budget (" +
          std::to_string(max_intervals) + " intervals, error estimate " +
          std::to_string(total_err) + ")");
    Interval worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw QuadratureError("quadrature interval collapsed below machine precision");
    Interval left = gauss_kronrod(f, worst.a, mid);
    Interval right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++count;
  }
  return {total, total_err, count};
}

}  // namespace varicheck
