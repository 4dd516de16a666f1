#include "varicheck/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varicheck/quadrature.hpp"

namespace varicheck {

namespace {

constexpr double kContinuityTol = 1e-10;
constexpr double kC1Tol = 1e-8;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* side_name(Side s) {
  switch (s) {
    case Side::Minus: return "-";
    case Side::Plus: return "+";
    case Side::TwoSided: return "two-sided";
  }
  return "?";
}

PiecewisePath::PiecewisePath(std::vector<double> breaks,
                             std::vector<std::vector<ExprPtr>> segments,
                             std::vector<double> angular_points)
    : breaks_(std::move(breaks)),
      segs_(std::move(segments)),
      angular_(std::move(angular_points)) {
  if (breaks_.size() < 2) throw ProblemError("path needs at least one segment");
  if (segs_.size() + 1 != breaks_.size())
    throw ProblemError("path has " + std::to_string(segs_.size()) +
                       " segments but " + std::to_string(breaks_.size()) +
                       " breakpoints");
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k)
    if (!(breaks_[k] < breaks_[k + 1]))
      throw ProblemError("breakpoints must be strictly increasing (offending pair " +
                         fmt(breaks_[k]) + ", " + fmt(breaks_[k + 1]) + ")");
  n_ = static_cast<int>(segs_.front().size());
  if (n_ < 1) throw ProblemError("path segments must have at least one component");
  for (const auto& seg : segs_) {
    if (static_cast<int>(seg.size()) != n_)
      throw ProblemError("all segments must have the same component count");
    for (const auto& comp : seg)
      if (!depends_only_on_time(comp))
        throw ProblemError("path segment expression '" + to_string(comp) +
                           "' may depend on t only");
  }
  snap_tol_ = 1e-9 * (breaks_.back() - breaks_.front());

  std::sort(angular_.begin(), angular_.end());
  for (double tau : angular_) {
    bool interior_break = false;
    for (std::size_t k = 1; k + 1 < breaks_.size(); ++k)
      if (std::fabs(breaks_[k] - tau) <= snap_tol_) interior_break = true;
    if (!interior_break)
      throw ProblemError("angular point " + fmt(tau) +
                         " is not an interior breakpoint");
  }

  // cache d/dt, d2/dt2, d3/dt3 of every component
  derivs_.resize(segs_.size());
  for (std::size_t k = 0; k < segs_.size(); ++k) {
    derivs_[k].resize(3);
    for (int order = 0; order < 3; ++order) {
      derivs_[k][order].resize(n_);
      for (int i = 0; i < n_; ++i) {
        const ExprPtr& prev = order == 0 ? segs_[k][i] : derivs_[k][order - 1][i];
        derivs_[k][order][i] = differentiate(prev, VarId::time());
      }
    }
  }

  // continuity at every interior breakpoint; C1 agreement where not angular
  for (std::size_t k = 1; k + 1 < breaks_.size(); ++k) {
    double s = breaks_[k];
    EvalPoint ep{s, {}, {}};
    for (int i = 0; i < n_; ++i) {
      double left = evaluate(segs_[k - 1][i], ep);
      double right = evaluate(segs_[k][i], ep);
      if (std::fabs(left - right) > kContinuityTol)
        throw ProblemError("path discontinuity at breakpoint t=" + fmt(s) +
                           ", component " + std::to_string(i + 1) + ": gap " +
                           fmt(right - left));
      if (!is_angular(s)) {
        double dleft = evaluate(derivs_[k - 1][0][i], ep);
        double dright = evaluate(derivs_[k][0][i], ep);
        if (std::fabs(dleft - dright) > kC1Tol)
          throw ProblemError(
              "derivative jump " + fmt(dright - dleft) + " at breakpoint t=" +
              fmt(s) + " (component " + std::to_string(i + 1) +
              ") which is not declared angular");
      }
    }
  }
}

bool PiecewisePath::is_angular(double t) const {
  for (double tau : angular_)
    if (std::fabs(tau - t) <= snap_tol_) return true;
  return false;
}

int PiecewisePath::segment_index(const SidedPoint& p) const {
  const double t = p.t;
  if (!std::isfinite(t)) throw ProblemError("point t must be finite");
  if (t < breaks_.front() - snap_tol_ || t > breaks_.back() + snap_tol_)
    throw ProblemError("point t=" + fmt(t) + " outside the path interval [" +
                       fmt(breaks_.front()) + ", " + fmt(breaks_.back()) + "]");
  // snap to a breakpoint?
  int at_break = -1;
  for (std::size_t k = 0; k < breaks_.size(); ++k)
    if (std::fabs(breaks_[k] - t) <= snap_tol_) {
      at_break = static_cast<int>(k);
      break;
    }
  const int last = static_cast<int>(segs_.size()) - 1;
  if (at_break < 0) {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    int k = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(k, 0, last);
  }
  if (at_break == 0) {
    if (p.side == Side::Minus)
      throw ProblemError("side '-' requested at the left endpoint t0");
    return 0;
  }
  if (at_break == static_cast<int>(breaks_.size()) - 1) {
    if (p.side == Side::Plus)
      throw ProblemError("side '+' requested at the right endpoint t1");
    return last;
  }
  switch (p.side) {
    case Side::Plus: return at_break;
    case Side::Minus: return at_break - 1;
    case Side::TwoSided:
      if (is_angular(breaks_[at_break]))
        throw ProblemError("two-sided evaluation requested at angular point t=" +
                           fmt(breaks_[at_break]));
      return at_break - 1;  // sides agree here; pick the left segment
  }
  return last;
}

Vec PiecewisePath::eval(const SidedPoint& p, int order) const {
  return eval_on_segment(segment_index(p), p.t, order);
}

Vec PiecewisePath::eval_on_segment(int segment, double t, int order) const {
  if (order < 0 || order > 3)
    throw ProblemError("path derivative order must be in 0..3");
  if (segment < 0 || segment >= static_cast<int>(segs_.size()))
    throw ProblemError("segment index out of range");
  Vec out(n_);
  EvalPoint ep{t, {}, {}};
  for (int i = 0; i < n_; ++i) {
    const ExprPtr& e = order == 0 ? segs_[segment][i] : derivs_[segment][order - 1][i];
    out[i] = evaluate(e, ep);
  }
  return out;
}

double PiecewisePath::room_on_side(double t, Side side) const {
  SidedPoint p{t, side};
  int k = segment_index(p);
  if (side == Side::Minus) return t - breaks_[k];
  if (side == Side::Plus) return breaks_[k + 1] - t;
  return std::min(t - breaks_[k], breaks_[k + 1] - t);
}

PathPoint path_point(const PiecewisePath& path, const SidedPoint& p) {
  return PathPoint{p.t, path.eval(p, 0), path.eval(p, 1)};
}

// ---------------------------------------------------------------------------
// classical checks

Vec euler_residual(const ProblemSpec& spec, const PiecewisePath& path,
                   const SidedPoint& p) {
  PathPoint pp = path_point(path, p);
  Vec xdd = path.eval(p, 2);
  EvalPoint ep = pp.eval_point();
  const IntegrandBundle& ib = spec.integrand;
  // (d/dt L_v)_i = L_vt_i + sum_j L_vx[i][j] xdot_j + sum_j L_vv[i][j] xddot_j
  Vec res = ib.eval_Lvt(ep);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      res[i] += evaluate(ib.Lvx(i, j), ep) * pp.v[j];
      res[i] += evaluate(ib.Lvv(i, j), ep) * xdd[j];
    }
    res[i] -= evaluate(ib.Lx(i), ep);
  }
  return res;
}

ErdmannGaps erdmann_gaps(const ProblemSpec& spec, const PiecewisePath& path,
                         double tau) {
  if (!path.is_angular(tau))
    throw ProblemError("t=" + fmt(tau) + " is not a declared angular point");
  PathPoint plus = path_point(path, {tau, Side::Plus});
  PathPoint minus = path_point(path, {tau, Side::Minus});
  EvalPoint ep_p = plus.eval_point();
  EvalPoint ep_m = minus.eval_point();
  const IntegrandBundle& ib = spec.integrand;
  Vec lv_p = ib.eval_Lv(ep_p);
  Vec lv_m = ib.eval_Lv(ep_m);
  ErdmannGaps g;
  g.momentum_gap.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) g.momentum_gap[i] = lv_p[i] - lv_m[i];
  double energy_p = ib.eval_L(ep_p) - dot(plus.v, lv_p);
  double energy_m = ib.eval_L(ep_m) - dot(minus.v, lv_m);
  g.energy_gap = energy_p - energy_m;
  Vec lx_p = ib.eval_Lx(ep_p);
  Vec lx_m = ib.eval_Lx(ep_m);
  g.lx_gap.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) g.lx_gap[i] = lx_p[i] - lx_m[i];
  return g;
}

double functional_value(const ProblemSpec& spec, const PiecewisePath& path,
                        double tol) {
  if (!(tol > 0.0)) throw ProblemError("functional_value: tol must be positive");
  const auto& breaks = path.breakpoints();
  double total = 0.0;
  double span = path.t_end() - path.t_begin();
  for (int k = 0; k + 1 < static_cast<int>(breaks.size()); ++k) {
    double a = breaks[k], b = breaks[k + 1];
    double seg_tol = tol * (b - a) / span;
    auto f = [&](double t) {
      Vec x = path.eval_on_segment(k, t, 0);
      Vec v = path.eval_on_segment(k, t, 1);
      EvalPoint ep{t, {x.data(), x.size()}, {v.data(), v.size()}};
      return spec.integrand.eval_L(ep);
    };
    total += integrate_adaptive(f, a, b, seg_tol).value;
  }
  return total;
}

}  // namespace varicheck
