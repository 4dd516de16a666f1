#include "varicheck/conditions.hpp"

#include <cmath>

namespace varicheck {

namespace {

constexpr double kLambdaCap = 1.0 - 1e-6;

double clamp_lambda(double lambda) {
  if (lambda < 0.0)
    throw ProblemError("lambda must lie in [0, 1)");
  return std::min(lambda, kLambdaCap);
}

double mu_of(double lambda) { return lambda / (lambda - 1.0); }

struct ShiftedPoints {
  PathPoint base;
  Vec shifted_v;
  EvalPoint at_path() const { return base.eval_point(); }
  EvalPoint at_shifted() const {
    return {base.t, {base.x.data(), base.x.size()},
            {shifted_v.data(), shifted_v.size()}};
  }
};

ShiftedPoints shifted(const PiecewisePath& path, const SidedPoint& p, const Vec& xi) {
  ShiftedPoints s{path_point(path, p), {}};
  s.shifted_v = s.base.v;
  for (std::size_t i = 0; i < xi.size(); ++i) s.shifted_v[i] += xi[i];
  return s;
}

}  // namespace

Side fd_side(const PiecewisePath& path, const SidedPoint& p) {
  if (p.side != Side::TwoSided) return p.side;
  double room_plus = p.t >= path.t_end() ? 0.0 : path.room_on_side(p.t, Side::Plus);
  double room_minus = p.t <= path.t_begin() ? 0.0 : path.room_on_side(p.t, Side::Minus);
  return room_plus >= room_minus ? Side::Plus : Side::Minus;
}

double default_fd_step(const PiecewisePath& path, const SidedPoint& p) {
  Side side = fd_side(path, p);
  int seg = path.segment_index({p.t, side});
  double seg_len = path.breakpoints()[seg + 1] - path.breakpoints()[seg];
  double step = 1e-4 * seg_len;
  double room = path.room_on_side(p.t, side);
  if (room <= 0.0)
    throw ProblemError("no room for a one-sided mesh at t=" + std::to_string(p.t));
  if (4.5 * step > room) step = room / 4.5;
  return step;
}

double time_derivative(const std::function<double(double)>& f,
                       const SidedPoint& p, int order, double step) {
  if (order != 1 && order != 2)
    throw ProblemError("time_derivative order must be 1 or 2");
  if (!(step > 0.0)) throw ProblemError("time_derivative step must be positive");
  const double dir = p.side == Side::Minus ? -1.0 : 1.0;
  const double t0 = p.t;
  auto g = [&](double u) { return f(t0 + dir * u); };
  const double s = step;
  if (order == 1) {
    double f0 = g(0.0);
    auto d0 = [&](double h) { return (g(h) - f0) / h; };
    double a = d0(4.0 * s), b = d0(2.0 * s), c = d0(s);
    double r1 = 2.0 * b - a;
    double r2 = 2.0 * c - b;
    double val = (4.0 * r2 - r1) / 3.0;
    return dir * val;
  }
  double f0 = g(0.0);
  auto d0 = [&](double h) { return (g(2.0 * h) - 2.0 * g(h) + f0) / (h * h); };
  double a = d0(2.0 * s), b = d0(s), c = d0(0.5 * s);
  double r1 = 2.0 * b - a;
  double r2 = 2.0 * c - b;
  return (4.0 * r2 - r1) / 3.0;  // second derivative is side-sign invariant
}

namespace {

// one-sided d/dt (or d2/dt2) of a field evaluated along the path near p
double field_time_derivative(const PiecewisePath& path, const SidedPoint& p,
                             int order, double step,
                             const std::function<double(const SidedPoint&)>& field) {
  Side side = fd_side(path, p);
  double s = step > 0.0 ? step : default_fd_step(path, {p.t, side});
  double room = path.room_on_side(p.t, side);
  if (4.0 * s > room)
    throw ProblemError("finite-difference mesh of width " + std::to_string(4.0 * s) +
                       " exits the segment at t=" + std::to_string(p.t));
  auto f = [&](double t) {
    // interior mesh nodes resolve to their segment on either side; the anchor
    // keeps the requested side
    return field({t, t == p.t ? side : Side::TwoSided});
  };
  return time_derivative(f, {p.t, side}, order, s);
}

}  // namespace

double excess(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, const Vec& xi) {
  ShiftedPoints s = shifted(path, p, xi);
  const IntegrandBundle& ib = spec.integrand;
  double l_shift = ib.eval_L(s.at_shifted());
  double l_base = ib.eval_L(s.at_path());
  Vec lv = ib.eval_Lv(s.at_path());
  return l_shift - l_base - dot(lv, xi);
}

double legendre_form(const ProblemSpec& spec, const PiecewisePath& path,
                     const SidedPoint& p, const Vec& xi) {
  PathPoint pp = path_point(path, p);
  return spec.integrand.quad_form_Lvv(pp.eval_point(), xi);
}

double legendre_third_form(const ProblemSpec& spec, const PiecewisePath& path,
                           const SidedPoint& p, const Vec& xi) {
  PathPoint pp = path_point(path, p);
  return spec.integrand.cubic_form_Lvvv(pp.eval_point(), xi);
}

Vec delta_Lx(const ProblemSpec& spec, const PiecewisePath& path,
             const SidedPoint& p, const Vec& xi) {
  ShiftedPoints s = shifted(path, p, xi);
  Vec shifted_lx = spec.integrand.eval_Lx(s.at_shifted());
  Vec base_lx = spec.integrand.eval_Lx(s.at_path());
  for (int i = 0; i < spec.n; ++i) shifted_lx[i] -= base_lx[i];
  return shifted_lx;
}

double excess_bracket(const ProblemSpec& spec, const PiecewisePath& path,
                      const SidedPoint& p, const Vec& xi) {
  Vec d = delta_Lx(spec, path, p, xi);
  ShiftedPoints s = shifted(path, p, xi);
  Mat lxv = spec.integrand.eval_Lxv(s.at_path());
  return dot(xi, d) - quad_form(lxv, xi, xi);
}

double q_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, int i) {
  if (i < 1 || i > 3) throw ProblemError("q_form index must be 1, 2 or 3");
  lambda = clamp_lambda(lambda);
  double li = std::pow(lambda, i);
  double e1 = excess(spec, path, p, xi);
  double e2 = excess(spec, path, p, scaled(xi, mu_of(lambda)));
  return li * e1 + (1.0 - li) * e2;
}

double m_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, int i) {
  if (i < 1 || i > 2) throw ProblemError("m_form index must be 1 or 2");
  lambda = clamp_lambda(lambda);
  double first = std::pow(lambda, i) * dot(delta_Lx(spec, path, p, xi), xi);
  double weight = (1.0 - lambda) * std::pow(0.5 + lambda, i - 1);
  double second = weight * dot(delta_Lx(spec, path, p, scaled(xi, mu_of(lambda))), xi);
  return first + second;
}

double w_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, double step) {
  lambda = clamp_lambda(lambda);
  double m1 = m_form(spec, path, p, lambda, xi, 1);
  double dq2 = field_time_derivative(
      path, p, 1, step,
      [&](const SidedPoint& q) { return q_form(spec, path, q, lambda, xi, 2); });
  return lambda * m1 + dq2;
}

double g_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double lambda, const Vec& xi, double step) {
  lambda = clamp_lambda(lambda);
  ShiftedPoints s1 = shifted(path, p, xi);
  ShiftedPoints s2 = shifted(path, p, scaled(xi, mu_of(lambda)));
  Mat lxx1 = spec.integrand.eval_Lxx(s1.at_shifted());
  Mat lxx2 = spec.integrand.eval_Lxx(s2.at_shifted());
  double quad = 0.0;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      quad += xi[i] * (lambda * lxx1[i][j] + (1.0 - lambda) * lxx2[i][j]) * xi[j];
  quad *= lambda * lambda;
  double dm2 = field_time_derivative(
      path, p, 1, step,
      [&](const SidedPoint& q) { return m_form(spec, path, q, lambda, xi, 2); });
  double d2q3 = field_time_derivative(
      path, p, 2, step,
      [&](const SidedPoint& q) { return q_form(spec, path, q, lambda, xi, 3); });
  return quad + 2.0 * lambda * dm2 + d2q3;
}

double k_form(const ProblemSpec& spec, const PiecewisePath& path,
              const SidedPoint& p, double epsilon, const Vec& xi, double step) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw ProblemError("k_form epsilon must lie in [0, 1)");
  double bracket = excess_bracket(spec, path, p, xi);
  double de = field_time_derivative(
      path, p, 1, step,
      [&](const SidedPoint& q) { return excess(spec, path, q, xi); });
  double dp = field_time_derivative(
      path, p, 1, step,
      [&](const SidedPoint& q) { return legendre_form(spec, path, q, xi); });
  return bracket + de + (1.0 + epsilon) / (2.0 * (1.0 - epsilon)) * dp;
}

double degenerate_point_value(const ProblemSpec& spec, const PiecewisePath& path,
                              const SidedPoint& p, const Vec& xi, double step) {
  double bracket = excess_bracket(spec, path, p, xi);
  double de = field_time_derivative(
      path, p, 1, step,
      [&](const SidedPoint& q) { return excess(spec, path, q, xi); });
  double dp = field_time_derivative(
      path, p, 1, step,
      [&](const SidedPoint& q) { return legendre_form(spec, path, q, xi); });
  return bracket + de + 0.5 * dp;
}

double interval_inequality_value(const ProblemSpec& spec, const PiecewisePath& path,
                                 const SidedPoint& p, double lambda_bar,
                                 const Vec& eta, double step) {
  double lb = clamp_lambda(lambda_bar);
  ShiftedPoints s1 = shifted(path, p, eta);
  ShiftedPoints s2 = shifted(path, p, scaled(eta, mu_of(lb)));
  Mat lxx1 = spec.integrand.eval_Lxx(s1.at_shifted());
  Mat lxx2 = spec.integrand.eval_Lxx(s2.at_shifted());
  double quad = 0.0;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      quad += eta[i] * (lb * lxx1[i][j] + (1.0 - lb) * lxx2[i][j]) * eta[j];
  double ddlx = field_time_derivative(
      path, p, 1, step, [&](const SidedPoint& q) {
        return dot(delta_Lx(spec, path, q, eta), eta);
      });
  return quad - ddlx;
}

}  // namespace varicheck
