// Acceptance suite: every release criterion, one pass/fail line each.
// Usage: acceptance --cli /path/to/varicheck

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"
#include "varicheck/report.hpp"

using namespace varicheck;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kFixtures = VARICHECK_FIXTURES_DIR;
std::string g_cli;
int g_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const std::string& id, bool pass, const std::string& detail) {
  std::cout << id << (pass ? " PASS  " : " FAIL  ") << detail << "\n";
  if (!pass) ++g_failures;
}

std::pair<ProblemSpec, PiecewisePath> fixture(const std::string& name) {
  return load_problem(kFixtures + "/" + name);
}

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  CliRun run;
  std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return run;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) run.output.append(buf, got);
  int status = pclose(pipe);
  if (WIFEXITED(status)) run.exit_code = WEXITSTATUS(status);
  return run;
}

std::string poly_string(const std::vector<double>& c) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) os << " + ";
    os << c[k];
    if (k == 1) os << "*t";
    if (k > 1) os << "*t^" << k;
  }
  os << ")";
  return os.str();
}

double poly_eval(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

// --- criteria ---------------------------------------------------------------

void criterion_1() {
  auto start = Clock::now();
  bool pass = true;
  std::ostringstream detail;

  auto [spec, path] = fixture("ex5_1.toml");
  IntervalQuery q{{2.0}, 0.5, 0.0, 1.0, 1e-9, 0.0};
  ConditionReport r = check_interval(spec, path, q, "4.2", Mode::Strong,
                                     ScanConfig{}, 41);
  pass = pass && r.verdict == Verdict::Violated;
  pass = pass && std::fabs(r.tested_value[0] + 24.0) <= 1e-9;

  CliRun cli = run_cli("analyze " + kFixtures +
                       "/ex5_1.toml --theorem 4.2 --lambda 0.5 --eta 2 "
                       "--interval 0 1 --json");
  pass = pass && cli.exit_code == 2;
  double cli_value = 0.0;
  try {
    auto parsed = nlohmann::json::parse(cli.output);
    cli_value = parsed["checks"][0]["tested_value"][0].get<double>();
  } catch (...) {
    pass = false;
  }
  pass = pass && std::fabs(cli_value + 24.0) <= 1e-9;

  double elapsed = seconds_since(start);
  pass = pass && elapsed < 1.0;
  detail << "5.1 strong rejection: (4.10) = " << r.tested_value[0]
         << ", cli exit " << cli.exit_code << ", " << elapsed << " s";
  report("C1", pass, detail.str());
}

void criterion_2() {
  auto start = Clock::now();
  auto [spec, path] = fixture("ex5_1.toml");
  IntervalQuery q{{2.0}, 0.5, 0.0, 1.0, 1e-9, 0.0};
  ScanConfig scan{1.0, 21, 21, 1e-9, 0.0};
  ConditionReport r = check_interval(spec, path, q, "4.2", Mode::Weak, scan, 21);
  bool no_violation = true;
  for (const ScanSample& s : r.samples) no_violation = no_violation && !s.violated;
  double elapsed = seconds_since(start);
  bool pass = r.verdict == Verdict::Satisfied && no_violation && elapsed < 10.0;
  std::ostringstream detail;
  detail << "5.1 weak retention: delta=1 scan 21x21, " << r.applicable_samples
         << " applicable, verdict " << verdict_name(r.verdict) << ", " << elapsed
         << " s";
  report("C2", pass, detail.str());
}

void criterion_3() {
  auto [spec, path] = fixture("ex5_2.toml");
  IntervalQuery q{{1.0, 1.0}, 0.5, 0.0, 1.0, 1e-9, 0.0};
  ConditionReport r = check_interval(spec, path, q, "4.3", Mode::Strong,
                                     ScanConfig{}, 41);
  bool pass = r.verdict == Verdict::Violated &&
              std::fabs(r.tested_value[0] - 1.0) <= 1e-9;
  std::ostringstream detail;
  detail << "5.2 interval equality: (4.14) = " << r.tested_value[0]
         << ", verdict " << verdict_name(r.verdict);
  report("C3", pass, detail.str());
}

void criterion_4() {
  auto [spec, path] = fixture("ex5_3.toml");
  bool pass = true;
  std::ostringstream detail;

  double max_residual = 0.0;
  for (int k = 0; k < 100; ++k) {
    double t = (k + 0.5) / 100.0;
    max_residual = std::max(max_residual,
                            std::fabs(euler_residual(spec, path, {t, Side::TwoSided})[0]));
  }
  pass = pass && max_residual <= 1e-9;

  std::mt19937 rng(451);
  std::uniform_real_distribution<double> pt(0.02, 0.98);
  std::uniform_real_distribution<double> dir(-3.0, 3.0);
  double max_form_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    double t = pt(rng), xi = dir(rng);
    double e = excess(spec, path, {t, Side::TwoSided}, {xi});
    double expected_e = (1.0 - t) * xi * xi * (xi + 3.0);
    double p = legendre_form(spec, path, {t, Side::TwoSided}, {xi});
    double expected_p = 6.0 * (1.0 - t) * xi * xi;
    max_form_err = std::max(max_form_err, std::fabs(e - expected_e));
    max_form_err = std::max(max_form_err, std::fabs(p - expected_p));
  }
  pass = pass && max_form_err <= 1e-9;

  ScanConfig scan{6.0, 21, 5, 1e-9, 0.0};
  ConditionReport r = check_point_weak(spec, path, {1.0, Side::Minus}, "3.7", scan);
  double max_closed_form_gap = 0.0;
  bool all_nonpositive = true;
  for (const ScanSample& s : r.samples) {
    if (!s.applicable) {
      pass = false;
      continue;
    }
    double xi = s.eta[0];
    max_closed_form_gap =
        std::max(max_closed_form_gap, std::fabs(s.value + xi * xi * (xi + 6.0)));
    all_nonpositive = all_nonpositive && s.value <= 1e-9;
  }
  pass = pass && max_closed_form_gap <= 1e-5 && all_nonpositive &&
         r.verdict == Verdict::Satisfied;

  detail << "5.3: max euler residual " << max_residual << ", max closed-form gap "
         << max_form_err << ", 3.7(j) gap " << max_closed_form_gap << ", verdict "
         << verdict_name(r.verdict);
  report("C4", pass, detail.str());
}

void criterion_5() {
  auto [spec, path] = fixture("ex5_4.toml");
  bool pass = true;

  ScanConfig scan{1.5, 7, 3, 1e-9, 0.0};
  auto findings = scan_degenerations(spec, path, 0.0, 1.0, 15, scan);
  bool found = false;
  for (const DegenerationFinding& f : findings) {
    if (f.eta != Vec{1.0, 1.0}) continue;
    for (const auto& lc : f.lambdas)
      if (std::fabs(lc.lambda_bar - 0.5) <= 1e-12 && lc.degenerate) found = true;
    // (4.13) must fail for the same direction: eta^T Lvv eta = 2
    pass = pass && !f.excess_legendre_pair &&
           std::fabs(f.legendre_value - 2.0) <= 1e-9;
  }
  pass = pass && found;

  IntervalQuery q{{1.0, 1.0}, 0.5, 0.0, 1.0, 1e-9, 0.0};
  ConditionReport r = check_interval(spec, path, q, "4.1", Mode::Strong,
                                     ScanConfig{}, 41);
  pass = pass && r.verdict == Verdict::Violated &&
         std::fabs(r.tested_value[0] - 1.0) <= 1e-9;

  std::ostringstream detail;
  detail << "5.4 discovery: eta=(1,1) lambda=1/2 degenerate, (4.2) = "
         << r.tested_value[0] << " -> " << verdict_name(r.verdict)
         << ", Legendre companion 2";
  report("C5", pass, detail.str());
}

void criterion_6() {
  auto start = Clock::now();
  bool pass = true;
  int runs = 0;
  FitTolerances tol;  // |dc1| <= 1e-6, |dc2| <= 1e-4, |dc3|,|dc4| <= 1e-2

  auto [spec3, path3] = fixture("ex5_3.toml");
  for (const char* prop : {"2.1", "2.2"}) {
    for (Side side : {Side::Plus, Side::Minus}) {
      for (double theta : {0.3, 0.5, 0.7}) {
        VariationParams vp;
        vp.theta = theta;
        vp.lambda = 0.5;
        vp.xi = {1.0};
        vp.side = side;
        PropositionReport r = verify_proposition(spec3, path3, vp, prop, tol, 1e-13);
        pass = pass && r.pass;
        ++runs;
      }
    }
  }

  auto [spec1, path1] = fixture("ex5_1.toml");
  for (Side side : {Side::Plus, Side::Minus}) {
    for (double theta : {0.3, 0.6}) {
      VariationParams vp;
      vp.theta = theta;
      vp.xi = {1.0};
      vp.side = side;
      PropositionReport r = verify_proposition(spec1, path1, vp, "2.3", tol, 1e-13);
      pass = pass && r.pass;
      ++runs;
    }
  }

  double elapsed = seconds_since(start);
  pass = pass && elapsed < 60.0;
  std::ostringstream detail;
  detail << "oracle/formula equivalence: " << runs
         << " proposition runs all within fit tolerances, " << elapsed << " s";
  report("C6", pass, detail.str());
}

void criterion_7() {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 3);
  bool pass = true;
  double worst = 0.0;
  for (int instance = 0; instance < 25; ++instance) {
    int n = dim(rng);
    std::vector<std::vector<std::vector<double>>> A(n), B(n), C(n);
    for (int i = 0; i < n; ++i) {
      A[i].resize(n);
      B[i].resize(n);
      C[i].resize(n);
      for (int j = 0; j < n; ++j) {
        A[i][j] = {coef(rng), coef(rng), coef(rng)};
        B[i][j] = {coef(rng), coef(rng), coef(rng)};
        C[i][j] = {coef(rng), coef(rng), coef(rng)};
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) A[i][j] = A[j][i];

    std::ostringstream L;
    bool first = true;
    auto term = [&](const std::string& txt) {
      if (!first) L << " + ";
      L << txt;
      first = false;
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::string vi = "v" + std::to_string(i + 1);
        std::string vj = "v" + std::to_string(j + 1);
        std::string xi = "x" + std::to_string(i + 1);
        std::string xj = "x" + std::to_string(j + 1);
        term(poly_string(A[i][j]) + "*" + vi + "*" + vj);
        term("2*" + poly_string(B[i][j]) + "*" + vi + "*" + xj);
        term(poly_string(C[i][j]) + "*" + xi + "*" + xj);
      }
    std::ostringstream doc;
    doc.precision(17);
    doc << "[problem]\nn = " << n << "\nt0 = 0.0\nt1 = 1.0\nx0 = [";
    for (int i = 0; i < n; ++i) doc << (i ? ", " : "") << "0.0";
    doc << "]\nx1 = \"free\"\nlagrangian = \"" << L.str() << "\"\n";
    doc << "\n[[segment]]\nfrom = 0.0\nto = 1.0\nx = [";
    for (int i = 0; i < n; ++i) {
      if (i) doc << ", ";
      doc << "\"" << coef(rng) << "*t + " << coef(rng) << "*t^3\"";
    }
    doc << "]\n";
    auto [spec, path] = load_problem_from_string(doc.str());

    std::uniform_real_distribution<double> pt(0.02, 0.98);
    for (int probe = 0; probe < 6; ++probe) {
      double t = pt(rng);
      Vec eta(n);
      for (int i = 0; i < n; ++i) eta[i] = 2.0 * coef(rng);
      double quad = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          quad += eta[i] * poly_eval(A[i][j], t) * eta[j];
      double e = excess(spec, path, {t, Side::TwoSided}, eta);
      double rel = std::fabs(e - quad) / std::max(1.0, std::fabs(quad));
      worst = std::max(worst, rel);
      pass = pass && rel <= 1e-9;
      // the engine Hessian form is exactly twice the A-form on this family
      double p = legendre_form(spec, path, {t, Side::TwoSided}, eta);
      pass = pass &&
             std::fabs(p - 2.0 * quad) / std::max(1.0, std::fabs(quad)) <= 1e-9;
    }
  }
  std::ostringstream detail;
  detail << "quadratic family: 25 instances, E(t,eta) = eta^T A(t) eta, worst "
            "relative gap "
         << worst;
  report("C7", pass, detail.str());
}

void criterion_8() {
  bool pass = true;
  std::ostringstream detail;

  // E(., 0) = 0, Q_i(., ., 0) = 0, M_i(., ., 0) = 0 everywhere
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> pt(0.02, 0.98);
  for (const char* name : {"ex5_1.toml", "ex5_2.toml", "ex5_3.toml", "ex5_4.toml"}) {
    auto [spec, path] = fixture(name);
    Vec zero(spec.n, 0.0);
    for (int i = 0; i < 20; ++i) {
      SidedPoint p{pt(rng), Side::TwoSided};
      pass = pass && excess(spec, path, p, zero) == 0.0;
      for (double lb : lambda_bar_grid(9)) {
        for (int qi = 1; qi <= 3; ++qi)
          pass = pass && q_form(spec, path, p, lb, zero, qi) == 0.0;
        for (int mi = 1; mi <= 2; ++mi)
          pass = pass && m_form(spec, path, p, lb, zero, mi) == 0.0;
      }
    }
  }

  // variation admissibility and the sup-norm bounds
  auto [spec3, path3] = fixture("ex5_3.toml");
  for (Side side : {Side::Plus, Side::Minus}) {
    VariationParams vp;
    vp.theta = 0.5;
    vp.lambda = 0.3;
    vp.xi = {2.0};
    vp.side = side;
    vp.epsilon = 0.25;
    PiecewisePath varied = build_variation(path3, vp);
    pass = pass && varied.eval({0.0, Side::Plus}, 0)[0] ==
                       path3.eval({0.0, Side::Plus}, 0)[0];
    pass = pass && varied.eval({1.0, Side::Minus}, 0)[0] ==
                       path3.eval({1.0, Side::Minus}, 0)[0];
    double mu = vp.lambda / (vp.lambda - 1.0);
    double sup_h = 0.0, sup_hd = 0.0;
    for (int k = 1; k < 4000; ++k) {
      double t = k / 4000.0;
      if (varied.is_angular(t)) continue;
      sup_h = std::max(sup_h, std::fabs(varied.eval({t, Side::TwoSided}, 0)[0] -
                                        path3.eval({t, Side::TwoSided}, 0)[0]));
      sup_hd = std::max(sup_hd, std::fabs(varied.eval({t, Side::TwoSided}, 1)[0] -
                                          path3.eval({t, Side::TwoSided}, 1)[0]));
    }
    pass = pass && sup_h <= vp.lambda * vp.epsilon * 2.0 + 1e-12;
    pass = pass && sup_h <= 2.0 + 1e-12;
    pass = pass && std::fabs(sup_hd - std::max(2.0, std::fabs(mu) * 2.0)) <= 1e-9;
  }

  // symbolic derivative vs Richardson central differences on the fixture
  // integrands, every partial, random points
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  double worst_fd = 0.0;
  for (const char* name : {"ex5_1.toml", "ex5_2.toml", "ex5_3.toml", "ex5_4.toml"}) {
    auto [spec, path] = fixture(name);
    const ExprPtr& L = spec.integrand.lagrangian();
    for (int trial = 0; trial < 25; ++trial) {
      double t = pt(rng);
      std::vector<double> x(spec.n), v(spec.n);
      for (auto& c : x) c = box(rng);
      for (auto& c : v) c = box(rng);
      struct Probe {
        VarId var;
        double* slot;
      };
      std::vector<Probe> probes{{VarId::time(), &t}};
      for (int i = 0; i < spec.n; ++i) {
        probes.push_back({VarId::state(i + 1), &x[i]});
        probes.push_back({VarId::velocity(i + 1), &v[i]});
      }
      for (const Probe& probe : probes) {
        ExprPtr d = differentiate(L, probe.var);
        double symbolic =
            evaluate(d, {t, {x.data(), x.size()}, {v.data(), v.size()}});
        auto fd = [&](double h) {
          double saved = *probe.slot;
          *probe.slot = saved + h;
          double up = evaluate(L, {t, {x.data(), x.size()}, {v.data(), v.size()}});
          *probe.slot = saved - h;
          double dn = evaluate(L, {t, {x.data(), x.size()}, {v.data(), v.size()}});
          *probe.slot = saved;
          return (up - dn) / (2.0 * h);
        };
        double numeric = (4.0 * fd(5e-6) - fd(1e-5)) / 3.0;
        double rel = std::fabs(symbolic - numeric) /
                     std::max(1.0, std::fabs(symbolic));
        worst_fd = std::max(worst_fd, rel);
      }
    }
  }
  pass = pass && worst_fd <= 1e-6;

  // deterministic JSON across runs and thread counts
  auto make_json = [&] {
    auto [spec, path] = fixture("ex5_1.toml");
    IntervalQuery q{{2.0}, 0.5, 0.0, 1.0, 1e-9, 0.0};
    ScanConfig scan{1.0, 9, 9, 1e-9, 0.0};
    AnalysisResult result;
    result.problem_file = "ex5_1.toml";
    result.theorem_reports.push_back(
        check_interval(spec, path, q, "4.2", Mode::Weak, scan, 11));
    return render_json(result);
  };
  std::string once = make_json();
  setenv("VARICHECK_THREADS", "3", 1);
  std::string threaded = make_json();
  unsetenv("VARICHECK_THREADS");
  pass = pass && once == threaded && once == make_json();

  detail << "invariants: zero-direction identities, variation bounds, FD "
            "agreement (worst "
         << worst_fd << "), deterministic JSON";
  report("C8", pass, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
  if (g_cli.empty()) {
    std::cerr << "usage: acceptance --cli /path/to/varicheck\n";
    return 64;
  }
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures == 0)
    std::cout << "all acceptance criteria green\n";
  else
    std::cout << g_failures << " acceptance criteria failing\n";
  return g_failures == 0 ? 0 : 1;
}
