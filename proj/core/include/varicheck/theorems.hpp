#ifndef VARICHECK_THEOREMS_HPP_
#define VARICHECK_THEOREMS_HPP_

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "varicheck/conditions.hpp"

namespace varicheck {

enum class Verdict { Violated, Satisfied, NotApplicable };
enum class Mode { Strong, Weak };

const char* verdict_name(Verdict v);
const char* mode_name(Mode m);

/// A necessary-condition query at a point: the probe direction eta (nonzero),
/// the variation split lambda_bar in (0,1), the sided point, and the
/// tolerance under which a quantity counts as zero.
struct DegenerationQuery {
  Vec eta;
  double lambda_bar = 0.5;
  SidedPoint point;
  double tolerance = 1e-9;
  double fd_step = 0.0;  // <= 0: default step
};

/// Interval variant for the Section-4 checks: conclusions must hold at every
/// mesh point of (a, b).
struct IntervalQuery {
  Vec eta;
  double lambda_bar = 0.5;
  double a = 0.0;
  double b = 1.0;
  double tolerance = 1e-9;
  double fd_step = 0.0;
};

/// Ball-scan configuration for the weak (local) theorem variants.
struct ScanConfig {
  double delta = 1.0;   // radius of the eta ball
  int grid = 11;        // samples per dimension
  int lambda_grid = 11; // lambda_bar samples in (0,1)
  double zero_tol = 1e-9;
  double fd_step = 0.0;
};

struct Evidence {
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  bool holds = false;
};

struct ScanSample {
  double t = 0.0;
  Side side = Side::TwoSided;
  Vec eta;
  double lambda_bar = std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  bool applicable = false;
  bool violated = false;
};

struct ConditionReport {
  std::string theorem;     // e.g. "3.1(i)", "4.2"
  std::string conclusion;  // equation label, e.g. "(3.3)"
  std::string relation;    // ">= 0", "<= 0", "= 0"
  Mode mode = Mode::Strong;
  Verdict verdict = Verdict::NotApplicable;
  Vec tested_value;  // scalar conclusions use one entry
  std::vector<Evidence> evidence;
  std::vector<ScanSample> samples;
  std::optional<ScanSample> witness;  // present on Violated
  int total_samples = 0;
  int applicable_samples = 0;
  double zero_tol = 0.0;
  double fd_step = 0.0;  // 0: per-point default

  /// Necessary conditions reject candidates; they never certify one.
  /// Satisfied always reads "inconclusive - candidate retained".
  std::string verdict_text() const;
};

enum class TheoremPart { Auto, I, II, III };

/// Point conditions for a strong local minimum (Section 3, Theorems 3.1-3.3).
/// part Auto resolves from the query side: one-sided points run part (i) of
/// 3.1/3.2 and part (ii) of 3.3; two-sided points run part (ii) of 3.1/3.2
/// and part (iii) of 3.3. 3.3 part (i) must be requested explicitly.
ConditionReport check_point_strong(const ProblemSpec& spec, const PiecewisePath& path,
                                   const DegenerationQuery& q,
                                   const std::string& theorem,
                                   TheoremPart part = TheoremPart::Auto);

/// Weak-minimum variants (Theorems 3.4-3.7): scans (eta, lambda_bar) over the
/// delta-ball grid, keeps samples whose degeneration hypotheses hold within
/// zero_tol (and, where the theorem requires it, whose companion vector
/// lambda_bar/(lambda_bar-1) eta also lies in the ball), and evaluates the
/// conclusion on each. Any applicable violation decides Violated.
ConditionReport check_point_weak(const ProblemSpec& spec, const PiecewisePath& path,
                                 const SidedPoint& point, const std::string& theorem,
                                 const ScanConfig& scan);

/// Interval conditions (Section 4, Theorems 4.1-4.3) on a grid_t mesh of
/// (a, b); Weak mode wraps the check in a ball scan as in check_point_weak.
ConditionReport check_interval(const ProblemSpec& spec, const PiecewisePath& path,
                               const IntervalQuery& q, const std::string& theorem,
                               Mode mode, const ScanConfig& scan, int grid_t);

/// Discovery aid: grid over (eta, lambda_bar) reporting where the Weierstrass
/// excess degenerates, with the companion quantity of each hypothesis family
/// (paired excess for the lambda forms, the Legendre form for the
/// Weierstrass+Legendre forms). Values are reported unpolished.
struct DegenerationFinding {
  Vec eta;
  double max_abs_excess = 0.0;    // max |E(., eta)| over the probe set
  double legendre_value = 0.0;    // max |eta^T Lvv eta|
  bool excess_legendre_pair = false;  // both of the above within zero_tol
  struct LambdaCompanion {
    double lambda_bar;
    double max_abs_excess_mu;  // max |E(., mu eta)|
    bool degenerate;
    bool mu_eta_in_ball;
  };
  std::vector<LambdaCompanion> lambdas;
};

std::vector<DegenerationFinding> scan_degenerations(const ProblemSpec& spec,
                                                    const PiecewisePath& path,
                                                    const SidedPoint& point,
                                                    const ScanConfig& scan);
std::vector<DegenerationFinding> scan_degenerations(const ProblemSpec& spec,
                                                    const PiecewisePath& path,
                                                    double a, double b, int grid_t,
                                                    const ScanConfig& scan);

/// Deterministic eta grid: regular lattice on [-delta, delta]^n restricted to
/// the closed ball plus lattice boundary points projected onto the sphere;
/// the origin is excluded.
std::vector<Vec> eta_ball_grid(int n, double delta, int per_dim);

/// lambda_bar grid: k/(count+1), k = 1..count.
std::vector<double> lambda_bar_grid(int count);

/// Uniform strictly-interior mesh of (a, b) that avoids path breakpoints.
std::vector<double> interval_mesh(const PiecewisePath& path, double a, double b,
                                  int grid_t);

}  // namespace varicheck

#endif  // VARICHECK_THEOREMS_HPP_
