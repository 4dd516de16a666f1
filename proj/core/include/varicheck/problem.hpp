#ifndef VARICHECK_PROBLEM_HPP_
#define VARICHECK_PROBLEM_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varicheck/integrand.hpp"

namespace varicheck {

class ProblemError : public std::runtime_error {
 public:
  explicit ProblemError(const std::string& what) : std::runtime_error(what) {}
};

/// Which one-sided limit a query refers to. TwoSided is only meaningful where
/// both limits exist and agree (it is rejected at angular points).
enum class Side { Minus, Plus, TwoSided };

struct SidedPoint {
  double t = 0.0;
  Side side = Side::TwoSided;
};

const char* side_name(Side s);

/// Fixed-interval variational problem: minimize the integral of L(t, x, xdot)
/// over [t0, t1] with x(t0) = x0 and either a fixed or a free right endpoint.
struct ProblemSpec {
  int n = 1;
  double t0 = 0.0;
  double t1 = 1.0;
  Vec x0;
  std::optional<Vec> x1;  // nullopt: free right end
  IntegrandBundle integrand;
};

/// Candidate extremal: expression segments between ordered breakpoints, with
/// a declared subset of interior breakpoints marked angular (derivative
/// jumps). Immutable after construction; all invariants are checked eagerly.
class PiecewisePath {
 public:
  /// segments[k][i] is component i on [breaks[k], breaks[k+1]], an expression
  /// in t alone.
  PiecewisePath(std::vector<double> breaks,
                std::vector<std::vector<ExprPtr>> segments,
                std::vector<double> angular_points);

  int dimension() const { return n_; }
  double t_begin() const { return breaks_.front(); }
  double t_end() const { return breaks_.back(); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& angular_points() const { return angular_; }
  bool is_angular(double t) const;
  int segment_count() const { return static_cast<int>(breaks_.size()) - 1; }
  const ExprPtr& segment_component(int seg, int i) const { return segs_[seg][i]; }

  /// Index of the segment owning p, honoring the side at breakpoints.
  /// Throws on side violations (Plus at t1, Minus at t0, TwoSided at an
  /// angular point).
  int segment_index(const SidedPoint& p) const;

  /// Value of the order-th derivative (order <= 3) on the requested side.
  Vec eval(const SidedPoint& p, int order) const;

  /// Same, pinned to an explicit segment (no breakpoint snapping); t may be
  /// anywhere within that segment's closed span.
  Vec eval_on_segment(int segment, double t, int order) const;

  /// Distance from t to the nearest breakpoint of the segment owning
  /// (t, side), measured into that segment.
  double room_on_side(double t, Side side) const;

 private:
  int n_ = 0;
  std::vector<double> breaks_;
  std::vector<std::vector<ExprPtr>> segs_;
  std::vector<std::vector<std::vector<ExprPtr>>> derivs_;  // [seg][order-1][i]
  std::vector<double> angular_;
  double snap_tol_ = 0.0;
};

/// Parses and validates a problem file (see docs/problem-format.md).
/// Checks continuity (1e-10), C1 agreement at non-angular breakpoints (1e-8)
/// and the boundary conditions (1e-10; right end only when fixed).
std::pair<ProblemSpec, PiecewisePath> load_problem(const std::string& path);
std::pair<ProblemSpec, PiecewisePath> load_problem_from_string(
    const std::string& text, const std::string& origin = "<string>");

/// Euler residual (d/dt)L_v - L_x at p, the total derivative expanded through
/// the chain rule (uses the second path derivative). Zero iff the path is an
/// extremal at p.
Vec euler_residual(const ProblemSpec& spec, const PiecewisePath& path,
                   const SidedPoint& p);

struct ErdmannGaps {
  Vec momentum_gap;   // L_v(tau+) - L_v(tau-)
  double energy_gap;  // [L - v^T L_v](tau+) - same at tau-
  Vec lx_gap;         // L_x(tau+) - L_x(tau-); reported alongside, see docs
};

/// Weierstrass-Erdmann corner gaps at a declared angular point.
ErdmannGaps erdmann_gaps(const ProblemSpec& spec, const PiecewisePath& path,
                         double tau);

/// J(path) by adaptive quadrature, segment by segment (never across a
/// breakpoint). Absolute error <= tol.
double functional_value(const ProblemSpec& spec, const PiecewisePath& path,
                        double tol);

/// L and its partials all take (t, x(t+-), xdot(t+-)) along the path; this
/// builds that evaluation point.
struct PathPoint {
  double t;
  Vec x;
  Vec v;
  EvalPoint eval_point() const { return {t, {x.data(), x.size()}, {v.data(), v.size()}}; }
};
PathPoint path_point(const PiecewisePath& path, const SidedPoint& p);

}  // namespace varicheck

#endif  // VARICHECK_PROBLEM_HPP_
