#include "varicheck/theorems.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace varicheck {

namespace {

enum class Relation { GeqZero, LeqZero, EqZero };

const char* relation_text(Relation r) {
  switch (r) {
    case Relation::GeqZero: return ">= 0";
    case Relation::LeqZero: return "<= 0";
    case Relation::EqZero: return "= 0";
  }
  return "?";
}

bool violates(double value, Relation rel, double tol) {
  switch (rel) {
    case Relation::GeqZero: return value < -tol;
    case Relation::LeqZero: return value > tol;
    case Relation::EqZero: return std::fabs(value) > tol;
  }
  return false;
}

// ranks how badly `value` breaks the relation; used to pick the worst sample
double severity(double value, Relation rel) {
  switch (rel) {
    case Relation::GeqZero: return -value;
    case Relation::LeqZero: return value;
    case Relation::EqZero: return std::fabs(value);
  }
  return 0.0;
}

double mu_of(double lambda) { return lambda / (lambda - 1.0); }

std::string vec_text(const Vec& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << "]";
  return os.str();
}

std::string point_text(const SidedPoint& p) {
  std::ostringstream os;
  os << "theta";
  if (p.side == Side::Plus) os << "+";
  else if (p.side == Side::Minus) os << "-";
  return os.str();
}

int thread_cap() {
  const char* env = std::getenv("VARICHECK_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  return v < 1 ? 1 : v;
}

template <typename F>
void parallel_for(int count, F&& fn) {
  int threads = std::min(thread_cap(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

struct TheoremId {
  int major = 0;  // 3 or 4
  int minor = 0;  // 1..7 / 1..3
};

TheoremId parse_theorem(const std::string& s) {
  std::size_t dotpos = s.find('.');
  if (dotpos == std::string::npos || dotpos == 0 || dotpos + 1 >= s.size())
    throw ProblemError("malformed theorem id '" + s + "'");
  TheoremId id;
  id.major = std::atoi(s.substr(0, dotpos).c_str());
  id.minor = std::atoi(s.substr(dotpos + 1).c_str());
  return id;
}

void validate_query(const ProblemSpec& spec, const DegenerationQuery& q) {
  if (static_cast<int>(q.eta.size()) != spec.n)
    throw ProblemError("eta must have dimension n = " + std::to_string(spec.n));
  if (norm2(q.eta) == 0.0) throw ProblemError("eta must be nonzero");
  if (!(q.lambda_bar > 0.0 && q.lambda_bar < 1.0))
    throw ProblemError("lambda_bar must lie strictly inside (0, 1)");
  if (!(q.tolerance > 0.0)) throw ProblemError("tolerance must be positive");
}

void validate_scan(const ScanConfig& scan) {
  if (!(scan.delta > 0.0)) throw ProblemError("scan delta must be positive");
  if (scan.grid < 3) throw ProblemError("scan grid must be at least 3");
  if (scan.lambda_grid < 1) throw ProblemError("scan lambda_grid must be >= 1");
  if (!(scan.zero_tol > 0.0)) throw ProblemError("scan zero_tol must be positive");
}

void require_interior(const ProblemSpec& spec, double theta, const char* what) {
  double snap = 1e-9 * (spec.t1 - spec.t0);
  if (theta <= spec.t0 + snap || theta >= spec.t1 - snap)
    throw ProblemError(std::string(what) +
                       " requires an interior two-sided point theta in (t0, t1)");
}

// A fully evaluated point condition: hypothesis list plus conclusion.
struct PointOutcome {
  std::string theorem_label;
  std::string conclusion_label;
  Relation rel = Relation::EqZero;
  std::vector<Evidence> hypotheses;
  bool applicable = false;
  double value = 0.0;  // meaningful when applicable
};

struct PointLabels {
  std::string theorem;
  std::string conclusion;
  Relation rel;
};

PointLabels point_labels(int minor, TheoremPart part, Side side) {
  const bool plus = side != Side::Minus;
  switch (minor * 10 + static_cast<int>(part)) {
    case 31 * 10 + static_cast<int>(TheoremPart::I):
      return {"3.1(i)", plus ? "(3.3)" : "(3.4)",
              plus ? Relation::GeqZero : Relation::LeqZero};
    case 31 * 10 + static_cast<int>(TheoremPart::II):
      return {"3.1(ii)", "(3.6)", Relation::EqZero};
    case 32 * 10 + static_cast<int>(TheoremPart::I):
      return {"3.2(i)", plus ? "(3.12)" : "(3.13)", Relation::GeqZero};
    case 32 * 10 + static_cast<int>(TheoremPart::II):
      return {"3.2(ii)", "(3.14)", Relation::GeqZero};
    case 33 * 10 + static_cast<int>(TheoremPart::I):
      return {"3.3(i)", "(3.16)", Relation::EqZero};
    case 33 * 10 + static_cast<int>(TheoremPart::II):
      return {"3.3(ii)", plus ? "(3.19)" : "(3.20)",
              plus ? Relation::GeqZero : Relation::LeqZero};
    case 33 * 10 + static_cast<int>(TheoremPart::III):
      return {"3.3(iii)", "(3.22)", Relation::EqZero};
  }
  throw ProblemError("unsupported theorem/part combination");
}

TheoremPart resolve_part(int minor, TheoremPart part, Side side) {
  if (part == TheoremPart::Auto) {
    if (minor == 3) return side == Side::TwoSided ? TheoremPart::III : TheoremPart::II;
    return side == Side::TwoSided ? TheoremPart::II : TheoremPart::I;
  }
  return part;
}

Evidence make_evidence(const std::string& quantity, double value, double tol) {
  return Evidence{quantity, value, tol, std::fabs(value) <= tol};
}

PointOutcome run_point_check(const ProblemSpec& spec, const PiecewisePath& path,
                             const Vec& eta, double lambda_bar,
                             const SidedPoint& p, double tol, double step,
                             int minor, TheoremPart part) {
  PointOutcome out;
  const double mu = mu_of(lambda_bar);
  const Vec mu_eta = scaled(eta, mu);
  const std::string at = point_text(p);

  auto hyp_excess_pair = [&] {
    out.hypotheses.push_back(
        make_evidence("E(" + at + ", eta)", excess(spec, path, p, eta), tol));
    out.hypotheses.push_back(make_evidence("E(" + at + ", mu*eta)",
                                           excess(spec, path, p, mu_eta), tol));
  };
  auto hyp_legendre = [&] {
    out.hypotheses.push_back(make_evidence(
        "eta^T Lvv(" + at + ") eta", legendre_form(spec, path, p, eta), tol));
  };

  PointLabels labels = point_labels(minor, part, p.side);
  out.theorem_label = labels.theorem;
  out.conclusion_label = labels.conclusion;
  out.rel = labels.rel;

  switch (minor * 10 + static_cast<int>(part)) {
    case 31 * 10 + static_cast<int>(TheoremPart::I): {
      if (p.side == Side::TwoSided)
        throw ProblemError("theorem 3.1(i) needs a one-sided point");
      hyp_excess_pair();
      break;
    }
    case 31 * 10 + static_cast<int>(TheoremPart::II): {
      require_interior(spec, p.t, "theorem 3.1(ii)");
      hyp_excess_pair();
      break;
    }
    case 32 * 10 + static_cast<int>(TheoremPart::I): {
      if (p.side == Side::TwoSided)
        throw ProblemError("theorem 3.2(i) needs a one-sided point");
      hyp_excess_pair();
      out.hypotheses.push_back(
          make_evidence("W(" + at + ", lambda, eta)",
                        w_form(spec, path, p, lambda_bar, eta, step), tol));
      break;
    }
    case 32 * 10 + static_cast<int>(TheoremPart::II): {
      require_interior(spec, p.t, "theorem 3.2(ii)");
      hyp_excess_pair();
      break;
    }
    case 33 * 10 + static_cast<int>(TheoremPart::I): {
      hyp_legendre();
      break;
    }
    case 33 * 10 + static_cast<int>(TheoremPart::II): {
      if (p.side == Side::TwoSided)
        throw ProblemError("theorem 3.3(ii) needs a one-sided point");
      out.hypotheses.push_back(
          make_evidence("E(" + at + ", eta)", excess(spec, path, p, eta), tol));
      hyp_legendre();
      break;
    }
    case 33 * 10 + static_cast<int>(TheoremPart::III): {
      require_interior(spec, p.t, "theorem 3.3(iii)");
      out.hypotheses.push_back(
          make_evidence("E(" + at + ", eta)", excess(spec, path, p, eta), tol));
      hyp_legendre();
      break;
    }
  }

  out.applicable = std::all_of(out.hypotheses.begin(), out.hypotheses.end(),
                               [](const Evidence& e) { return e.holds; });
  if (!out.applicable) return out;

  switch (minor * 10 + static_cast<int>(part)) {
    case 31 * 10 + static_cast<int>(TheoremPart::I):
      out.value = w_form(spec, path, p, lambda_bar, eta, step);
      break;
    case 31 * 10 + static_cast<int>(TheoremPart::II):
      out.value = m_form(spec, path, p, lambda_bar, eta, 1);
      break;
    case 32 * 10 + static_cast<int>(TheoremPart::I):
    case 32 * 10 + static_cast<int>(TheoremPart::II):
      out.value = g_form(spec, path, p, lambda_bar, eta, step);
      break;
    case 33 * 10 + static_cast<int>(TheoremPart::I):
      out.value = legendre_third_form(spec, path, p, eta);
      break;
    case 33 * 10 + static_cast<int>(TheoremPart::II):
      out.value = degenerate_point_value(spec, path, p, eta, step);
      break;
    case 33 * 10 + static_cast<int>(TheoremPart::III):
      out.value = excess_bracket(spec, path, p, eta);
      break;
  }
  return out;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Violated: return "Violated";
    case Verdict::Satisfied: return "Satisfied";
    case Verdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

const char* mode_name(Mode m) { return m == Mode::Strong ? "strong" : "weak"; }

std::string ConditionReport::verdict_text() const {
  switch (verdict) {
    case Verdict::Violated:
      return mode == Mode::Strong
                 ? "Violated: not a strong local minimum"
                 : "Violated: not a weak local minimum";
    case Verdict::Satisfied:
      return "Satisfied: inconclusive - candidate retained";
    case Verdict::NotApplicable:
      return "NotApplicable: degeneration hypotheses not met";
  }
  return "?";
}

ConditionReport check_point_strong(const ProblemSpec& spec, const PiecewisePath& path,
                                   const DegenerationQuery& q,
                                   const std::string& theorem, TheoremPart part) {
  validate_query(spec, q);
  TheoremId id = parse_theorem(theorem);
  if (id.major != 3 || id.minor < 1 || id.minor > 3)
    throw ProblemError("check_point_strong handles theorems 3.1, 3.2 and 3.3");
  TheoremPart resolved = resolve_part(id.minor, part, q.point.side);
  int minor = 30 + id.minor;

  PointOutcome res = run_point_check(spec, path, q.eta, q.lambda_bar, q.point,
                                     q.tolerance, q.fd_step, minor, resolved);
  ConditionReport report;
  report.theorem = res.theorem_label;
  report.conclusion = res.conclusion_label;
  report.relation = relation_text(res.rel);
  report.mode = Mode::Strong;
  report.evidence = res.hypotheses;
  report.zero_tol = q.tolerance;
  report.fd_step = q.fd_step;
  report.total_samples = 1;
  if (!res.applicable) {
    report.verdict = Verdict::NotApplicable;
    return report;
  }
  report.applicable_samples = 1;
  report.tested_value = {res.value};
  ScanSample sample{q.point.t, q.point.side, q.eta, q.lambda_bar, res.value, true,
                    violates(res.value, res.rel, q.tolerance)};
  report.samples.push_back(sample);
  if (sample.violated) {
    report.verdict = Verdict::Violated;
    report.witness = sample;
  } else {
    report.verdict = Verdict::Satisfied;
  }
  return report;
}

namespace {

struct WeakPlan {
  int strong_minor = 0;         // 31..33
  TheoremPart part = TheoremPart::Auto;
  bool uses_lambda = false;     // scan over lambda_bar and filter mu*eta ball
  std::string weak_label;
};

WeakPlan weak_plan(const std::string& theorem, Side side) {
  TheoremId id = parse_theorem(theorem);
  if (id.major != 3 || id.minor < 4 || id.minor > 7)
    throw ProblemError("check_point_weak handles theorems 3.4-3.7");
  WeakPlan plan;
  switch (id.minor) {
    case 4:
      plan.strong_minor = 31;
      plan.uses_lambda = true;
      plan.part = side == Side::TwoSided ? TheoremPart::II : TheoremPart::I;
      plan.weak_label = side == Side::TwoSided ? "3.4(jj)" : "3.4(j)";
      break;
    case 5:
      plan.strong_minor = 32;
      plan.uses_lambda = true;
      plan.part = side == Side::TwoSided ? TheoremPart::II : TheoremPart::I;
      plan.weak_label = side == Side::TwoSided ? "3.5(jj)" : "3.5(j)";
      break;
    case 6:
      plan.strong_minor = 33;
      plan.part = TheoremPart::I;
      plan.weak_label = "3.6";
      break;
    case 7:
      plan.strong_minor = 33;
      plan.part = side == Side::TwoSided ? TheoremPart::III : TheoremPart::II;
      plan.weak_label = side == Side::TwoSided ? "3.7(jj)" : "3.7(j)";
      break;
  }
  return plan;
}

struct SamplePoint {
  Vec eta;
  double lambda_bar;
};

std::vector<SamplePoint> build_samples(int n, const ScanConfig& scan,
                                       bool uses_lambda) {
  std::vector<Vec> etas = eta_ball_grid(n, scan.delta, scan.grid);
  std::vector<SamplePoint> out;
  if (uses_lambda) {
    std::vector<double> lambdas = lambda_bar_grid(scan.lambda_grid);
    out.reserve(etas.size() * lambdas.size());
    for (const Vec& eta : etas)
      for (double lb : lambdas) out.push_back({eta, lb});
  } else {
    out.reserve(etas.size());
    for (const Vec& eta : etas)
      out.push_back({eta, std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

// shared verdict assembly for all scanning checks
void finish_scan_report(ConditionReport& report, Relation rel) {
  report.total_samples = static_cast<int>(report.samples.size());
  report.applicable_samples = 0;
  const ScanSample* worst = nullptr;
  for (const ScanSample& s : report.samples) {
    if (!s.applicable) continue;
    ++report.applicable_samples;
    if (s.violated && !report.witness) {
      report.verdict = Verdict::Violated;
      report.witness = s;
    }
    if (!worst || severity(s.value, rel) > severity(worst->value, rel)) worst = &s;
  }
  if (report.applicable_samples == 0) {
    report.verdict = Verdict::NotApplicable;
    return;
  }
  if (report.witness) {
    report.verdict = Verdict::Violated;
    report.tested_value = {report.witness->value};
  } else {
    report.verdict = Verdict::Satisfied;
    report.tested_value = {worst->value};
  }
}

}  // namespace

ConditionReport check_point_weak(const ProblemSpec& spec, const PiecewisePath& path,
                                 const SidedPoint& point, const std::string& theorem,
                                 const ScanConfig& scan) {
  validate_scan(scan);
  WeakPlan plan = weak_plan(theorem, point.side);
  std::vector<SamplePoint> pts = build_samples(spec.n, scan, plan.uses_lambda);
  if (pts.empty()) throw ProblemError("scan grid produced no samples");

  ConditionReport report;
  report.mode = Mode::Weak;
  report.zero_tol = scan.zero_tol;
  report.fd_step = scan.fd_step;
  report.samples.resize(pts.size());

  PointLabels labels = point_labels(plan.strong_minor, plan.part, point.side);
  const Relation rel = labels.rel;
  report.theorem = plan.weak_label + " [" + labels.theorem + "]";
  report.conclusion = labels.conclusion;
  report.relation = relation_text(rel);

  // samples whose companion vector mu*eta escapes the ball lie outside the
  // theorem's quantifier and are never evaluated
  std::vector<char> in_ball(pts.size(), 1);
  if (plan.uses_lambda)
    for (std::size_t i = 0; i < pts.size(); ++i)
      in_ball[i] = norm2(scaled(pts[i].eta, mu_of(pts[i].lambda_bar))) <=
                   scan.delta * (1.0 + 1e-12);

  std::vector<std::exception_ptr> errors(pts.size());
  std::vector<PointOutcome> outcomes(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    if (!in_ball[i]) return;
    try {
      const SamplePoint& sp = pts[i];
      double lb = plan.uses_lambda ? sp.lambda_bar : 0.5;
      outcomes[i] = run_point_check(spec, path, sp.eta, lb, point, scan.zero_tol,
                                    scan.fd_step, plan.strong_minor, plan.part);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::vector<Evidence> best_evidence;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const SamplePoint& sp = pts[i];
    const PointOutcome& res = outcomes[i];
    ScanSample& sample = report.samples[i];
    sample.t = point.t;
    sample.side = point.side;
    sample.eta = sp.eta;
    sample.lambda_bar = sp.lambda_bar;
    sample.applicable = in_ball[i] && res.applicable;
    if (sample.applicable) {
      sample.value = res.value;
      sample.violated = violates(res.value, rel, scan.zero_tol);
    } else if (in_ball[i]) {
      // remember the hypothesis list of the nearest miss for the report
      double gap = 0.0;
      for (const Evidence& e : res.hypotheses)
        gap = std::max(gap, std::fabs(e.value) / e.tolerance);
      if (gap < best_gap) {
        best_gap = gap;
        best_evidence = res.hypotheses;
        for (Evidence& e : best_evidence)
          e.quantity += " at eta=" + vec_text(sp.eta);
      }
    }
  }

  finish_scan_report(report, rel);
  if (report.verdict == Verdict::NotApplicable) report.evidence = best_evidence;
  return report;
}

// ---------------------------------------------------------------------------
// interval checks

std::vector<double> interval_mesh(const PiecewisePath& path, double a, double b,
                                  int grid_t) {
  if (!(a < b)) throw ProblemError("interval requires a < b");
  if (grid_t < 1) throw ProblemError("grid_t must be at least 1");
  double span = path.t_end() - path.t_begin();
  std::vector<double> mesh;
  mesh.reserve(grid_t);
  for (int k = 1; k <= grid_t; ++k) {
    double t = a + (b - a) * k / (grid_t + 1);
    for (double s : path.breakpoints())
      if (std::fabs(t - s) <= 1e-9 * span) t += (b - a) * 1e-5;
    mesh.push_back(t);
  }
  return mesh;
}

namespace {

struct IntervalOutcome {
  std::string theorem_label;
  std::string conclusion_label;
  Relation rel = Relation::EqZero;
  std::vector<Evidence> hypotheses;  // worst over the mesh
  bool applicable = false;
  double value = 0.0;  // worst conclusion value
  double worst_t = 0.0;
  bool violated = false;
};

IntervalOutcome run_interval_check(const ProblemSpec& spec, const PiecewisePath& path,
                                   const Vec& eta, double lambda_bar, int minor,
                                   const std::vector<double>& mesh, double tol,
                                   double step) {
  IntervalOutcome out;
  const Vec mu_eta = scaled(eta, mu_of(lambda_bar));
  double worst_e1 = 0.0, worst_companion = 0.0;
  const bool legendre_companion = minor == 43;
  for (double t : mesh) {
    SidedPoint p{t, Side::TwoSided};
    worst_e1 = std::max(worst_e1, std::fabs(excess(spec, path, p, eta)));
    double companion = legendre_companion
                           ? std::fabs(legendre_form(spec, path, p, eta))
                           : std::fabs(excess(spec, path, p, mu_eta));
    worst_companion = std::max(worst_companion, companion);
  }
  out.hypotheses.push_back(make_evidence("sup |E(t, eta)|", worst_e1, tol));
  out.hypotheses.push_back(make_evidence(legendre_companion
                                             ? "sup |eta^T Lvv(t) eta|"
                                             : "sup |E(t, mu*eta)|",
                                         worst_companion, tol));
  switch (minor) {
    case 41:
      out.theorem_label = "4.1";
      out.conclusion_label = "(4.2)";
      out.rel = Relation::EqZero;
      break;
    case 42:
      out.theorem_label = "4.2";
      out.conclusion_label = "(4.10)";
      out.rel = Relation::GeqZero;
      break;
    case 43:
      out.theorem_label = "4.3";
      out.conclusion_label = "(4.14)";
      out.rel = Relation::EqZero;
      break;
    default:
      throw ProblemError("check_interval handles theorems 4.1, 4.2 and 4.3");
  }
  out.applicable = out.hypotheses[0].holds && out.hypotheses[1].holds;
  if (!out.applicable) return out;

  bool first = true;
  for (double t : mesh) {
    SidedPoint p{t, Side::TwoSided};
    double v = 0.0;
    switch (minor) {
      case 41: v = m_form(spec, path, p, lambda_bar, eta, 1); break;
      case 42:
        v = interval_inequality_value(spec, path, p, lambda_bar, eta, step);
        break;
      case 43: v = excess_bracket(spec, path, p, eta); break;
    }
    if (first || severity(v, out.rel) > severity(out.value, out.rel)) {
      out.value = v;
      out.worst_t = t;
      first = false;
    }
  }
  out.violated = violates(out.value, out.rel, tol);
  return out;
}

}  // namespace

ConditionReport check_interval(const ProblemSpec& spec, const PiecewisePath& path,
                               const IntervalQuery& q, const std::string& theorem,
                               Mode mode, const ScanConfig& scan, int grid_t) {
  TheoremId id = parse_theorem(theorem);
  if (id.major != 4 || id.minor < 1 || id.minor > 3)
    throw ProblemError("check_interval handles theorems 4.1, 4.2 and 4.3");
  const int minor = 40 + id.minor;
  if (!(q.a < q.b)) throw ProblemError("interval requires a < b");
  if (q.a < spec.t0 - 1e-12 || q.b > spec.t1 + 1e-12)
    throw ProblemError("interval must lie inside [t0, t1]");
  for (double tau : path.angular_points())
    if (tau > q.a && tau < q.b)
      throw ProblemError("interval (a, b) contains the angular point t=" +
                         std::to_string(tau));
  std::vector<double> mesh = interval_mesh(path, q.a, q.b, grid_t);

  ConditionReport report;
  report.mode = mode;

  if (mode == Mode::Strong) {
    if (static_cast<int>(q.eta.size()) != spec.n)
      throw ProblemError("eta must have dimension n = " + std::to_string(spec.n));
    if (norm2(q.eta) == 0.0) throw ProblemError("eta must be nonzero");
    if (!(q.lambda_bar > 0.0 && q.lambda_bar < 1.0))
      throw ProblemError("lambda_bar must lie strictly inside (0, 1)");
    report.zero_tol = q.tolerance;
    report.fd_step = q.fd_step;
    IntervalOutcome res = run_interval_check(spec, path, q.eta, q.lambda_bar,
                                             minor, mesh, q.tolerance, q.fd_step);
    report.theorem = res.theorem_label;
    report.conclusion = res.conclusion_label;
    report.relation = relation_text(res.rel);
    report.evidence = res.hypotheses;
    report.total_samples = 1;
    if (!res.applicable) {
      report.verdict = Verdict::NotApplicable;
      return report;
    }
    report.applicable_samples = 1;
    report.tested_value = {res.value};
    ScanSample sample{res.worst_t, Side::TwoSided, q.eta, q.lambda_bar,
                      res.value, true, res.violated};
    report.samples.push_back(sample);
    if (res.violated) {
      report.verdict = Verdict::Violated;
      report.witness = sample;
    } else {
      report.verdict = Verdict::Satisfied;
    }
    return report;
  }

  // weak mode: quantify over the ball grid
  validate_scan(scan);
  const bool uses_lambda = minor != 43;
  std::vector<SamplePoint> pts = build_samples(spec.n, scan, uses_lambda);
  report.zero_tol = scan.zero_tol;
  report.fd_step = scan.fd_step;
  report.samples.resize(pts.size());

  const Relation rel = minor == 42 ? Relation::GeqZero : Relation::EqZero;
  report.theorem = std::string("4.") + std::to_string(id.minor) + "(ii)";
  report.conclusion = minor == 41 ? "(4.2)" : (minor == 42 ? "(4.10)" : "(4.14)");
  report.relation = relation_text(rel);

  std::vector<char> in_ball(pts.size(), 1);
  if (uses_lambda)
    for (std::size_t i = 0; i < pts.size(); ++i)
      in_ball[i] = norm2(scaled(pts[i].eta, mu_of(pts[i].lambda_bar))) <=
                   scan.delta * (1.0 + 1e-12);

  std::vector<std::exception_ptr> errors(pts.size());
  std::vector<IntervalOutcome> outcomes(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    if (!in_ball[i]) return;
    try {
      double lb = uses_lambda ? pts[i].lambda_bar : q.lambda_bar;
      outcomes[i] = run_interval_check(spec, path, pts[i].eta, lb, minor, mesh,
                                       scan.zero_tol, scan.fd_step);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::vector<Evidence> best_evidence;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const IntervalOutcome& res = outcomes[i];
    ScanSample& sample = report.samples[i];
    sample.t = res.worst_t;
    sample.side = Side::TwoSided;
    sample.eta = pts[i].eta;
    sample.lambda_bar = pts[i].lambda_bar;
    sample.applicable = in_ball[i] && res.applicable;
    if (sample.applicable) {
      sample.value = res.value;
      sample.violated = res.violated;
    } else if (in_ball[i]) {
      double gap = 0.0;
      for (const Evidence& e : res.hypotheses)
        gap = std::max(gap, std::fabs(e.value) / e.tolerance);
      if (gap < best_gap) {
        best_gap = gap;
        best_evidence = res.hypotheses;
        for (Evidence& e : best_evidence)
          e.quantity += " at eta=" + vec_text(pts[i].eta);
      }
    }
  }
  finish_scan_report(report, rel);
  if (report.verdict == Verdict::NotApplicable) report.evidence = best_evidence;
  return report;
}

// ---------------------------------------------------------------------------
// degeneration discovery

namespace {

std::vector<DegenerationFinding> scan_impl(const ProblemSpec& spec,
                                           const PiecewisePath& path,
                                           const std::vector<SidedPoint>& probes,
                                           const ScanConfig& scan) {
  validate_scan(scan);
  std::vector<Vec> etas = eta_ball_grid(spec.n, scan.delta, scan.grid);
  std::vector<double> lambdas = lambda_bar_grid(scan.lambda_grid);
  std::vector<DegenerationFinding> findings;
  for (const Vec& eta : etas) {
    double max_e = 0.0, max_p = 0.0;
    for (const SidedPoint& p : probes) {
      max_e = std::max(max_e, std::fabs(excess(spec, path, p, eta)));
      max_p = std::max(max_p, std::fabs(legendre_form(spec, path, p, eta)));
    }
    if (max_e > scan.zero_tol) continue;
    DegenerationFinding f;
    f.eta = eta;
    f.max_abs_excess = max_e;
    f.legendre_value = max_p;
    f.excess_legendre_pair = max_p <= scan.zero_tol;
    for (double lb : lambdas) {
      double max_mu = 0.0;
      Vec mu_eta = scaled(eta, mu_of(lb));
      for (const SidedPoint& p : probes)
        max_mu = std::max(max_mu, std::fabs(excess(spec, path, p, mu_eta)));
      f.lambdas.push_back({lb, max_mu, max_mu <= scan.zero_tol,
                           norm2(mu_eta) <= scan.delta * (1.0 + 1e-12)});
    }
    findings.push_back(std::move(f));
  }
  return findings;
}

}  // namespace

std::vector<DegenerationFinding> scan_degenerations(const ProblemSpec& spec,
                                                    const PiecewisePath& path,
                                                    const SidedPoint& point,
                                                    const ScanConfig& scan) {
  return scan_impl(spec, path, {point}, scan);
}

std::vector<DegenerationFinding> scan_degenerations(const ProblemSpec& spec,
                                                    const PiecewisePath& path,
                                                    double a, double b, int grid_t,
                                                    const ScanConfig& scan) {
  std::vector<SidedPoint> probes;
  for (double t : interval_mesh(path, a, b, grid_t))
    probes.push_back({t, Side::TwoSided});
  return scan_impl(spec, path, probes, scan);
}

// ---------------------------------------------------------------------------
// grids

std::vector<Vec> eta_ball_grid(int n, double delta, int per_dim) {
  if (n < 1 || per_dim < 3 || !(delta > 0.0))
    throw ProblemError("eta grid needs n >= 1, per_dim >= 3 and delta > 0");
  std::vector<double> axis(per_dim);
  for (int j = 0; j < per_dim; ++j)
    axis[j] = -delta + 2.0 * delta * j / (per_dim - 1);
  std::vector<Vec> out;
  std::vector<int> idx(n, 0);
  const double eps = delta * 1e-12;
  for (;;) {
    Vec p(n);
    for (int d = 0; d < n; ++d) p[d] = axis[idx[d]];
    double r = norm2(p);
    if (r > eps) {
      if (r <= delta + eps) {
        out.push_back(p);
      } else {
        Vec q = scaled(p, delta / r);
        bool duplicate = false;
        for (const Vec& existing : out) {
          double diff = 0.0;
          for (int d = 0; d < n; ++d) diff += std::fabs(existing[d] - q[d]);
          if (diff <= eps * n) {
            duplicate = true;
            break;
          }
        }
        if (!duplicate) out.push_back(std::move(q));
      }
    }
    int d = n - 1;
    while (d >= 0 && ++idx[d] == per_dim) idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

std::vector<double> lambda_bar_grid(int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int k = 1; k <= count; ++k)
    out.push_back(static_cast<double>(k) / (count + 1));
  return out;
}

}  // namespace varicheck
