#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "varicheck/report.hpp"

namespace {

using namespace varicheck;

Side parse_side(const std::string& s) {
  if (s == "+" || s == "plus") return Side::Plus;
  if (s == "-" || s == "minus") return Side::Minus;
  if (s == "both" || s == "2" || s == "two-sided") return Side::TwoSided;
  throw CLI::ValidationError("--side must be one of +, -, both");
}

TheoremPart parse_part(const std::string& s) {
  if (s.empty() || s == "auto") return TheoremPart::Auto;
  if (s == "i" || s == "1") return TheoremPart::I;
  if (s == "ii" || s == "2") return TheoremPart::II;
  if (s == "iii" || s == "3") return TheoremPart::III;
  throw CLI::ValidationError("--part must be one of i, ii, iii, auto");
}

struct CommonOptions {
  std::string problem_file;
  bool json = false;
  double zero_tol = 1e-9;
  double fd_step = 0.0;
  double quad_tol = 1e-10;
};

void validate_overrides(const CommonOptions& common) {
  if (!(common.zero_tol > 0.0))
    throw CLI::ValidationError("--zero-tol must be positive");
  if (!(common.quad_tol > 0.0))
    throw CLI::ValidationError("--quad-tol must be positive");
  if (common.fd_step < 0.0)
    throw CLI::ValidationError("--fd-step must be positive (or 0 for auto)");
}

int run_analyze(const CommonOptions& common, bool classical, int classical_mesh,
                const std::string& theorem, const std::string& mode_str,
                const std::string& part_str, double theta,
                const std::string& side_str, const std::vector<double>& eta,
                double lambda, const std::vector<double>& interval, bool do_scan,
                double delta, int grid, int lambda_grid, int grid_t) {
  validate_overrides(common);
  auto [spec, path] = load_problem(common.problem_file);
  AnalysisResult result;
  result.problem_file = common.problem_file;

  Side side = parse_side(side_str);
  ScanConfig scan{delta, grid, lambda_grid, common.zero_tol, common.fd_step};

  if (classical) {
    result.classical_reports.push_back(
        run_classical(spec, path, classical_mesh, common.zero_tol, common.quad_tol));
  } else if (do_scan) {
    AnalysisResult::ScanResult sr;
    if (interval.size() == 2) {
      sr.target = "interval (" + std::to_string(interval[0]) + ", " +
                  std::to_string(interval[1]) + ")";
      sr.findings = scan_degenerations(spec, path, interval[0], interval[1],
                                       grid_t, scan);
    } else {
      sr.target = "point t=" + std::to_string(theta);
      sr.findings = scan_degenerations(spec, path, {theta, side}, scan);
    }
    result.scan_results.push_back(std::move(sr));
  } else if (!theorem.empty()) {
    Mode mode = mode_str == "weak" ? Mode::Weak : Mode::Strong;
    if (theorem.rfind("4.", 0) == 0) {
      if (interval.size() != 2)
        throw CLI::ValidationError("interval theorems need --interval A B");
      IntervalQuery q;
      q.a = interval[0];
      q.b = interval[1];
      q.eta = eta;
      q.lambda_bar = lambda;
      q.tolerance = common.zero_tol;
      q.fd_step = common.fd_step;
      result.theorem_reports.push_back(
          check_interval(spec, path, q, theorem, mode, scan, grid_t));
    } else if (theorem == "3.1" || theorem == "3.2" || theorem == "3.3") {
      if (mode == Mode::Weak)
        throw CLI::ValidationError(
            "weak point conditions carry their own numbers; use --theorem 3.4-3.7");
      DegenerationQuery q;
      q.eta = eta;
      q.lambda_bar = lambda;
      q.point = {theta, side};
      q.tolerance = common.zero_tol;
      q.fd_step = common.fd_step;
      result.theorem_reports.push_back(
          check_point_strong(spec, path, q, theorem, parse_part(part_str)));
    } else {
      result.theorem_reports.push_back(
          check_point_weak(spec, path, {theta, side}, theorem, scan));
    }
  } else {
    throw CLI::ValidationError("analyze needs one of --classical, --theorem, --scan");
  }

  std::cout << (common.json ? render_json(result) : render_text(result));
  return result.exit_code();
}

int run_oracle(const CommonOptions& common, const std::string& prop, double theta,
               double lambda, const std::vector<double>& xi,
               const std::string& side_str, double eps_max, FitTolerances tol) {
  validate_overrides(common);
  auto [spec, path] = load_problem(common.problem_file);
  AnalysisResult result;
  result.problem_file = common.problem_file;

  VariationParams vp;
  vp.theta = theta;
  vp.lambda = lambda;
  vp.xi = xi;
  vp.side = parse_side(side_str);
  if (vp.side == Side::TwoSided)
    throw CLI::ValidationError("oracle runs need --side + or --side -");

  double quad_tol = common.quad_tol < 1e-12 ? common.quad_tol : 1e-12;
  result.proposition_reports.push_back(
      verify_proposition(spec, path, vp, prop, tol, quad_tol, eps_max));

  std::cout << (common.json ? render_json(result) : render_text(result));
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varicheck - necessary-condition checks for variational problems"};
  app.require_subcommand(1);

  CommonOptions common;

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "classical checks, theorem conditions and degeneration scans");
  bool classical = false;
  int classical_mesh = 100;
  std::string theorem, mode_str = "strong", part_str = "auto", side_str = "both";
  double theta = 0.0, lambda = 0.5, delta = 1.0;
  std::vector<double> eta, interval;
  bool do_scan = false;
  int grid = 11, lambda_grid = 11, grid_t = 41;

  analyze->add_option("problem", common.problem_file, "problem file")->required();
  analyze->add_flag("--classical", classical, "Euler residual + corner conditions");
  analyze->add_option("--mesh", classical_mesh, "classical mesh points per segment");
  analyze->add_option("--theorem", theorem,
                      "theorem id: 3.1-3.7 (point) or 4.1-4.3 (interval)");
  analyze->add_option("--mode", mode_str, "strong|weak (interval theorems)")
      ->check(CLI::IsMember({"strong", "weak"}));
  analyze->add_option("--part", part_str, "theorem part: i|ii|iii|auto");
  analyze->add_flag("--scan", do_scan, "degeneration discovery scan");
  analyze->add_option("--theta", theta, "evaluation point");
  analyze->add_option("--side", side_str, "side at theta: +|-|both");
  analyze->add_option("--eta", eta, "probe direction (comma separated)")
      ->delimiter(',');
  analyze->add_option("--lambda", lambda, "variation split lambda_bar in (0,1)");
  analyze->add_option("--interval", interval, "interval endpoints A B")
      ->expected(2);
  analyze->add_option("--delta", delta, "ball radius for weak scans");
  analyze->add_option("--grid", grid, "eta grid points per dimension");
  analyze->add_option("--lambda-grid", lambda_grid, "lambda_bar grid points");
  analyze->add_option("--grid-t", grid_t, "mesh points for interval checks");
  analyze->add_option("--zero-tol", common.zero_tol, "degeneration zero tolerance");
  analyze->add_option("--fd-step", common.fd_step,
                      "one-sided finite-difference step (0: auto)");
  analyze->add_option("--quad-tol", common.quad_tol, "quadrature tolerance");
  analyze->add_flag("--json", common.json, "machine-readable output");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "verify the increment expansions against brute-force quadrature");
  std::string prop = "2.2", oracle_side = "+";
  std::vector<double> xi;
  double oracle_theta = 0.0, oracle_lambda = 0.5, eps_max = 0.0;
  FitTolerances fit_tol;
  oracle->add_option("problem", common.problem_file, "problem file")->required();
  oracle->add_option("--prop", prop, "proposition: 2.1|2.2|2.3")
      ->check(CLI::IsMember({"2.1", "2.2", "2.3"}));
  oracle->add_option("--theta", oracle_theta, "variation anchor point")->required();
  oracle->add_option("--lambda", oracle_lambda, "split lambda (2.1/2.2)");
  oracle->add_option("--xi", xi, "variation direction (comma separated)")
      ->delimiter(',')
      ->required();
  oracle->add_option("--side", oracle_side, "variation side: +|-");
  oracle->add_option("--eps-max", eps_max, "override the epsilon ladder start");
  oracle->add_option("--tol-c1", fit_tol.c1, "tolerance for the epsilon^1 coefficient");
  oracle->add_option("--tol-c2", fit_tol.c2, "tolerance for the epsilon^2 coefficient");
  oracle->add_option("--tol-c3", fit_tol.c3, "tolerance for the epsilon^3 coefficient");
  oracle->add_option("--tol-c4", fit_tol.c4, "tolerance for the epsilon^4 coefficient");
  oracle->add_option("--quad-tol", common.quad_tol, "quadrature tolerance");
  oracle->add_flag("--json", common.json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed())
      return run_analyze(common, classical, classical_mesh, theorem, mode_str,
                         part_str, theta, side_str, eta, lambda, interval, do_scan,
                         delta, grid, lambda_grid, grid_t);
    return run_oracle(common, prop, oracle_theta, oracle_lambda, xi, oracle_side,
                      eps_max, fit_tol);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
