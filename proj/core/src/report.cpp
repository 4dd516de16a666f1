#include "varicheck/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace varicheck {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << fmt(v[i]);
  }
  os << "]";
  return os.str();
}

ordered_json json_vec(const Vec& v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

ordered_json json_sample(const ScanSample& s) {
  ordered_json j;
  j["t"] = s.t;
  j["side"] = side_name(s.side);
  j["eta"] = json_vec(s.eta);
  if (!std::isnan(s.lambda_bar)) j["lambda_bar"] = s.lambda_bar;
  j["applicable"] = s.applicable;
  if (s.applicable) {
    j["value"] = s.value;
    j["violated"] = s.violated;
  }
  return j;
}

ordered_json json_theorem(const ConditionReport& r) {
  ordered_json j;
  j["kind"] = "theorem";
  j["theorem"] = r.theorem;
  j["conclusion"] = r.conclusion;
  j["relation"] = r.relation;
  j["mode"] = mode_name(r.mode);
  j["verdict"] = verdict_name(r.verdict);
  j["verdict_text"] = r.verdict_text();
  j["tested_value"] = json_vec(r.tested_value);
  ordered_json evidence = ordered_json::array();
  for (const Evidence& e : r.evidence) {
    ordered_json je;
    je["quantity"] = e.quantity;
    je["value"] = e.value;
    je["tolerance"] = e.tolerance;
    je["holds"] = e.holds;
    evidence.push_back(je);
  }
  j["evidence"] = evidence;
  j["witness"] = r.witness ? json_sample(*r.witness) : ordered_json(nullptr);
  ordered_json samples = ordered_json::array();
  for (const ScanSample& s : r.samples) samples.push_back(json_sample(s));
  j["samples"] = samples;
  j["counts"] = {{"total", r.total_samples}, {"applicable", r.applicable_samples}};
  j["tolerances"] = {{"zero_tol", r.zero_tol}, {"fd_step", r.fd_step}};
  return j;
}

ordered_json json_classical(const ClassicalReport& r) {
  ordered_json j;
  j["kind"] = "classical";
  j["verdict"] = verdict_name(r.verdict());
  j["euler"] = {{"max_abs_residual", r.max_euler_residual},
                {"worst_t", r.worst_residual_t},
                {"mesh_points_per_segment", r.mesh_points_per_segment},
                {"tolerance", r.residual_tol},
                {"ok", r.euler_ok}};
  ordered_json corners = ordered_json::array();
  for (const auto& c : r.corners) {
    ordered_json jc;
    jc["tau"] = c.tau;
    jc["momentum_gap"] = json_vec(c.momentum_gap);
    jc["energy_gap"] = c.energy_gap;
    jc["lx_gap"] = json_vec(c.lx_gap);
    jc["ok"] = c.ok;
    corners.push_back(jc);
  }
  j["corners"] = corners;
  j["functional"] = {{"value", r.functional_value}, {"quad_tol", r.quad_tol}};
  return j;
}

ordered_json json_proposition(const PropositionReport& r) {
  ordered_json j;
  j["kind"] = "proposition";
  j["proposition"] = r.proposition;
  j["side"] = r.side == Side::Plus ? "+" : "-";
  j["theta"] = r.theta;
  if (!std::isnan(r.lambda)) j["lambda"] = r.lambda;
  j["xi"] = json_vec(r.xi);
  ordered_json coeffs = ordered_json::array();
  for (const CoefficientCheck& c : r.coefficients) {
    ordered_json jc;
    jc["power"] = c.power;
    jc["predicted"] = c.predicted;
    jc["fitted"] = c.fitted;
    jc["deviation"] = c.deviation;
    jc["bound"] = c.bound;
    jc["pass"] = c.pass;
    coeffs.push_back(jc);
  }
  j["coefficients"] = coeffs;
  j["fit_residual"] = r.fit_residual;
  j["condition_number"] = r.condition_number;
  j["pass"] = r.pass;
  return j;
}

ordered_json json_scan(const AnalysisResult::ScanResult& r) {
  ordered_json j;
  j["kind"] = "degeneration-scan";
  j["target"] = r.target;
  ordered_json findings = ordered_json::array();
  for (const DegenerationFinding& f : r.findings) {
    ordered_json jf;
    jf["eta"] = json_vec(f.eta);
    jf["max_abs_excess"] = f.max_abs_excess;
    jf["legendre_value"] = f.legendre_value;
    jf["excess_legendre_pair"] = f.excess_legendre_pair;
    ordered_json lambdas = ordered_json::array();
    for (const auto& lc : f.lambdas) {
      ordered_json jl;
      jl["lambda_bar"] = lc.lambda_bar;
      jl["max_abs_excess_mu"] = lc.max_abs_excess_mu;
      jl["degenerate"] = lc.degenerate;
      jl["mu_eta_in_ball"] = lc.mu_eta_in_ball;
      lambdas.push_back(jl);
    }
    jf["lambda_companions"] = lambdas;
    findings.push_back(jf);
  }
  j["findings"] = findings;
  return j;
}

}  // namespace

Verdict ClassicalReport::verdict() const {
  bool ok = euler_ok;
  for (const auto& c : corners) ok = ok && c.ok;
  return ok ? Verdict::Satisfied : Verdict::Violated;
}

ClassicalReport run_classical(const ProblemSpec& spec, const PiecewisePath& path,
                              int mesh_points_per_segment, double residual_tol,
                              double quad_tol) {
  if (mesh_points_per_segment < 2)
    throw ProblemError("classical check needs at least two mesh points per segment");
  ClassicalReport report;
  report.mesh_points_per_segment = mesh_points_per_segment;
  report.residual_tol = residual_tol;
  report.quad_tol = quad_tol;
  const auto& breaks = path.breakpoints();
  for (int k = 0; k + 1 < static_cast<int>(breaks.size()); ++k) {
    for (int m = 0; m < mesh_points_per_segment; ++m) {
      double u = (m + 0.5) / mesh_points_per_segment;
      double t = breaks[k] + u * (breaks[k + 1] - breaks[k]);
      Vec r = euler_residual(spec, path, {t, Side::TwoSided});
      double mag = norm_inf(r);
      if (mag > report.max_euler_residual) {
        report.max_euler_residual = mag;
        report.worst_residual_t = t;
      }
    }
  }
  report.euler_ok = report.max_euler_residual <= residual_tol;
  for (double tau : path.angular_points()) {
    ErdmannGaps g = erdmann_gaps(spec, path, tau);
    ClassicalReport::Corner corner;
    corner.tau = tau;
    corner.momentum_gap = g.momentum_gap;
    corner.energy_gap = g.energy_gap;
    corner.lx_gap = g.lx_gap;
    corner.ok = norm_inf(g.momentum_gap) <= residual_tol &&
                std::fabs(g.energy_gap) <= residual_tol;
    report.corners.push_back(std::move(corner));
  }
  report.functional_value = functional_value(spec, path, quad_tol);
  return report;
}

int AnalysisResult::exit_code() const {
  bool any_violated = false, any_satisfied = false, any_check = false;
  auto fold = [&](Verdict v) {
    any_check = true;
    if (v == Verdict::Violated) any_violated = true;
    if (v == Verdict::Satisfied) any_satisfied = true;
  };
  for (const auto& r : theorem_reports) fold(r.verdict);
  for (const auto& r : classical_reports) fold(r.verdict());
  for (const auto& r : proposition_reports)
    fold(r.pass ? Verdict::Satisfied : Verdict::Violated);
  for (const auto& r : scan_results) {
    (void)r;
    any_check = true;
    any_satisfied = true;  // a scan is informational
  }
  if (any_violated) return 2;
  if (any_satisfied) return 0;
  return any_check ? 3 : 0;
}

std::string render_text(const AnalysisResult& result) {
  std::ostringstream os;
  os << "problem: " << result.problem_file << "\n";
  for (const auto& r : result.classical_reports) {
    os << "\nclassical checks\n";
    os << "  euler residual:  max |r| = " << fmt(r.max_euler_residual) << " at t="
       << fmt(r.worst_residual_t) << "  (tol " << fmt(r.residual_tol) << ", "
       << r.mesh_points_per_segment << " pts/segment)  "
       << (r.euler_ok ? "ok" : "VIOLATED") << "\n";
    if (r.corners.empty()) {
      os << "  corners:         none declared\n";
    } else {
      for (const auto& c : r.corners)
        os << "  corner t=" << fmt(c.tau) << ":  momentum gap "
           << fmt_vec(c.momentum_gap) << ", energy gap " << fmt(c.energy_gap)
           << ", Lx gap " << fmt_vec(c.lx_gap) << "  "
           << (c.ok ? "ok" : "VIOLATED") << "\n";
    }
    os << "  functional:      J = " << fmt(r.functional_value) << " (quad tol "
       << fmt(r.quad_tol) << ")\n";
    os << "  verdict:         " << verdict_name(r.verdict()) << "\n";
  }
  for (const auto& r : result.theorem_reports) {
    os << "\ntheorem " << r.theorem << " (" << mode_name(r.mode) << "), conclusion "
       << r.conclusion << " " << r.relation << "\n";
    os << "  verdict:      " << r.verdict_text() << "\n";
    if (!r.tested_value.empty())
      os << "  tested value: " << (r.tested_value.size() == 1
                                       ? fmt(r.tested_value[0])
                                       : fmt_vec(r.tested_value))
         << "\n";
    if (r.witness) {
      os << "  witness:      t=" << fmt(r.witness->t) << ", eta="
         << fmt_vec(r.witness->eta);
      if (!std::isnan(r.witness->lambda_bar))
        os << ", lambda=" << fmt(r.witness->lambda_bar);
      os << ", value=" << fmt(r.witness->value) << "\n";
    }
    if (!r.evidence.empty()) {
      os << "  evidence:\n";
      std::size_t width = 0;
      for (const Evidence& e : r.evidence) width = std::max(width, e.quantity.size());
      for (const Evidence& e : r.evidence)
        os << "    " << std::left << std::setw(static_cast<int>(width) + 2)
           << e.quantity << std::right << fmt(e.value) << "  (tol "
           << fmt(e.tolerance) << ")  " << (e.holds ? "holds" : "fails") << "\n";
    }
    if (r.total_samples > 1)
      os << "  samples:      " << r.applicable_samples << " applicable of "
         << r.total_samples << "\n";
    os << "  tolerances:   zero_tol=" << fmt(r.zero_tol) << ", fd_step="
       << (r.fd_step > 0 ? fmt(r.fd_step) : std::string("auto")) << "\n";
  }
  for (const auto& r : result.proposition_reports) {
    os << "\nproposition " << r.proposition << "  side "
       << (r.side == Side::Plus ? "+" : "-") << "  theta=" << fmt(r.theta);
    if (!std::isnan(r.lambda)) os << "  lambda=" << fmt(r.lambda);
    os << "  xi=" << fmt_vec(r.xi) << "\n";
    os << "  power  predicted           fitted              |deviation|         "
          "bound          status\n";
    for (const CoefficientCheck& c : r.coefficients) {
      os << "  " << std::left << std::setw(7) << c.power << std::setw(20)
         << fmt(c.predicted) << std::setw(20) << fmt(c.fitted) << std::setw(20)
         << fmt(c.deviation) << std::setw(15) << fmt(c.bound)
         << (c.pass ? "pass" : "FAIL") << std::right << "\n";
    }
    os << "  fit residual " << fmt(r.fit_residual) << ", condition "
       << fmt(r.condition_number) << ", overall "
       << (r.pass ? "pass" : "FAIL") << "\n";
  }
  for (const auto& r : result.scan_results) {
    os << "\ndegeneration scan at " << r.target << "\n";
    if (r.findings.empty()) {
      os << "  no direction with degenerate Weierstrass excess on the grid\n";
      continue;
    }
    for (const DegenerationFinding& f : r.findings) {
      os << "  eta=" << fmt_vec(f.eta) << "  sup|E|=" << fmt(f.max_abs_excess)
         << "  sup|eta^T Lvv eta|=" << fmt(f.legendre_value)
         << (f.excess_legendre_pair ? "  [excess+Legendre degenerate]" : "") << "\n";
      for (const auto& lc : f.lambdas)
        if (lc.degenerate)
          os << "    lambda=" << fmt(lc.lambda_bar) << "  sup|E(mu eta)|="
             << fmt(lc.max_abs_excess_mu)
             << (lc.mu_eta_in_ball ? "" : "  (mu eta outside the ball)") << "\n";
    }
  }
  os << "\nexit code " << result.exit_code() << "\n";
  return os.str();
}

std::string render_json(const AnalysisResult& result) {
  ordered_json root;
  root["schema"] = "varicheck-report/1";
  root["problem"] = result.problem_file;
  ordered_json checks = ordered_json::array();
  for (const auto& r : result.classical_reports) checks.push_back(json_classical(r));
  for (const auto& r : result.theorem_reports) checks.push_back(json_theorem(r));
  for (const auto& r : result.proposition_reports)
    checks.push_back(json_proposition(r));
  for (const auto& r : result.scan_results) checks.push_back(json_scan(r));
  root["checks"] = checks;
  root["exit_code"] = result.exit_code();
  return root.dump(2) + "\n";
}

}  // namespace varicheck
