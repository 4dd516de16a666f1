#ifndef VARICHECK_REPORT_HPP_
#define VARICHECK_REPORT_HPP_

#include <string>
#include <vector>

#include "varicheck/theorems.hpp"
#include "varicheck/variation.hpp"

namespace varicheck {

/// Classical necessary conditions along the whole candidate: Euler residual
/// on a per-segment mesh, Weierstrass-Erdmann gaps at declared corners, and
/// the functional value.
struct ClassicalReport {
  int mesh_points_per_segment = 0;
  double residual_tol = 0.0;
  double max_euler_residual = 0.0;
  double worst_residual_t = 0.0;
  struct Corner {
    double tau = 0.0;
    Vec momentum_gap;
    double energy_gap = 0.0;
    Vec lx_gap;  // the literal first corner-condition quantity as printed;
                 // reported alongside the momentum gap (see docs)
    bool ok = false;
  };
  std::vector<Corner> corners;
  double functional_value = 0.0;
  double quad_tol = 0.0;
  bool euler_ok = false;
  Verdict verdict() const;
};

ClassicalReport run_classical(const ProblemSpec& spec, const PiecewisePath& path,
                              int mesh_points_per_segment, double residual_tol,
                              double quad_tol);

/// One analysis run: whichever checks the request produced, in order.
struct AnalysisResult {
  std::string problem_file;
  std::vector<ConditionReport> theorem_reports;
  std::vector<ClassicalReport> classical_reports;
  std::vector<PropositionReport> proposition_reports;
  struct ScanResult {
    std::string target;  // "point t=..." or "interval (a, b)"
    std::vector<DegenerationFinding> findings;
  };
  std::vector<ScanResult> scan_results;

  /// 0: satisfied/inconclusive everywhere; 2: some violation (or failed
  /// oracle comparison); 3: every requested check inapplicable.
  int exit_code() const;
};

std::string render_text(const AnalysisResult& result);
std::string render_json(const AnalysisResult& result);

}  // namespace varicheck

#endif  // VARICHECK_REPORT_HPP_
