#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "varicheck/expr.hpp"
#include "varicheck/integrand.hpp"

using namespace varicheck;

namespace {

double eval_at(const ExprPtr& e, double t, std::vector<double> x,
               std::vector<double> v) {
  return evaluate(e, {t, {x.data(), x.size()}, {v.data(), v.size()}});
}

// random expressions from a singularity-free grammar: log/sqrt wrap u^2 + c,
// denominators are u^2 + 1
ExprPtr random_expr(std::mt19937& rng, int n, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 4 : 12);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> var(1, n);
  switch (pick(rng)) {
    case 0: return make_constant(coef(rng));
    case 1: return make_time();
    case 2: return make_state(var(rng));
    case 3: return make_velocity(var(rng));
    case 4: return make_constant(coef(rng));
    case 5: return make_add(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
    case 6: return make_sub(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
    case 7: return make_mul(random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
    case 8: {
      ExprPtr d = random_expr(rng, n, depth - 1);
      return make_div(random_expr(rng, n, depth - 1),
                      make_add(make_pow(d, 2), make_constant(1.0)));
    }
    case 9: return make_fun(FunKind::Sin, random_expr(rng, n, depth - 1));
    case 10: return make_fun(FunKind::Cos, random_expr(rng, n, depth - 1));
    case 11: {
      ExprPtr u = random_expr(rng, n, depth - 1);
      return make_fun(FunKind::Log,
                      make_add(make_pow(u, 2), make_constant(1.5)));
    }
    default: {
      std::uniform_int_distribution<int> exp_pick(2, 4);
      return make_pow(random_expr(rng, n, depth - 1), exp_pick(rng));
    }
  }
}

}  // namespace

TEST_CASE("parsing the worked integrands") {
  ExprPtr e1 = parse_expression("x1^2*(1 - v1^2)", 1);
  CHECK(eval_at(e1, 0.5, {2.0}, {3.0}) == doctest::Approx(-32.0).epsilon(1e-15));

  ExprPtr e2 = parse_expression("t", 1);
  CHECK(e2->kind == ExprKind::TimeVar);

  ExprPtr e3 = parse_expression("(v1 - v2^3)^2 + x1*v2^2", 2);
  CHECK(eval_at(e3, 0.0, {1.0, 0.0}, {2.0, 1.0}) ==
        doctest::Approx((2.0 - 1.0) * (2.0 - 1.0) + 1.0).epsilon(1e-15));

  ExprPtr e4 = parse_expression("(1-t)*v1^3 - 3*x1", 1);
  CHECK(eval_at(e4, 0.0, {0.0}, {1.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_expression("x1 +", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("x2", 1), ParseError);   // index out of range
  CHECK_THROWS_AS(parse_expression("y1", 1), ParseError);   // unknown variable
  CHECK_THROWS_AS(parse_expression("foo(x1)", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("2 x1", 1), ParseError); // implicit product
  CHECK_THROWS_AS(parse_expression("(x1", 1), ParseError);
  try {
    parse_expression("x1 + y3", 1);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("differentiation of the worked examples") {
  // d/dv1 of x1^2 (1 - v1^2) = -2 x1^2 v1
  ExprPtr L = parse_expression("x1^2*(1 - v1^2)", 1);
  ExprPtr dLdv = differentiate(L, VarId::velocity(1));
  for (double v1 : {0.3, -1.2, 2.0})
    CHECK(eval_at(dLdv, 0.0, {1.5}, {v1}) ==
          doctest::Approx(-2.0 * 1.5 * 1.5 * v1).epsilon(1e-14));
  // along x = 0 the momentum vanishes identically
  CHECK(eval_at(dLdv, 0.7, {0.0}, {9.0}) == 0.0);

  // d/dt x1 = 0
  ExprPtr x = parse_expression("x1", 1);
  ExprPtr dxdt = differentiate(x, VarId::time());
  CHECK(dxdt->kind == ExprKind::Constant);
  CHECK(dxdt->constant == 0.0);

  // d/dx1 of (v1 - v2^3)^2 + x1 v2^2 = v2^2
  ExprPtr L2 = parse_expression("(v1 - v2^3)^2 + x1*v2^2", 2);
  ExprPtr d2 = differentiate(L2, VarId::state(1));
  for (double v2 : {0.5, -2.0})
    CHECK(eval_at(d2, 0.0, {3.0, 1.0}, {7.0, v2}) ==
          doctest::Approx(v2 * v2).epsilon(1e-15));
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(eval_at(parse_expression("log(t)", 1), -1.0, {0.0}, {0.0}),
                  EvalError);
  CHECK_THROWS_AS(eval_at(parse_expression("sqrt(t)", 1), -1.0, {0.0}, {0.0}),
                  EvalError);
  CHECK_THROWS_AS(eval_at(parse_expression("x1/t", 1), 0.0, {1.0}, {0.0}),
                  EvalError);
  // abs itself is fine at 0; its derivative is not
  ExprPtr a = parse_expression("abs(x1)", 1);
  CHECK(eval_at(a, 0.0, {0.0}, {0.0}) == 0.0);
  ExprPtr da = differentiate(a, VarId::state(1));
  CHECK(eval_at(da, 0.0, {2.0}, {0.0}) == 1.0);
  CHECK(eval_at(da, 0.0, {-2.0}, {0.0}) == -1.0);
  CHECK_THROWS_AS(eval_at(da, 0.0, {0.0}, {0.0}), EvalError);
  CHECK_THROWS_AS(eval_at(da, 0.0, {1e-13}, {0.0}), EvalError);
}

TEST_CASE("fractional powers run through exp/log") {
  ExprPtr e = parse_expression("t^0.5", 1);
  CHECK(eval_at(e, 4.0, {0.0}, {0.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(eval_at(e, -4.0, {0.0}, {0.0}), EvalError);  // log of negative
  ExprPtr i = parse_expression("t^3", 1);
  CHECK(eval_at(i, -2.0, {0.0}, {0.0}) == -8.0);  // integer power keeps sign
  ExprPtr neg = parse_expression("t^(-2)", 1);
  CHECK(eval_at(neg, 2.0, {0.0}, {0.0}) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("print / reparse round trip is structural identity") {
  std::mt19937 rng(20240817);
  const char* fixtures[] = {
      "x1^2*(1 - v1^2)", "(1-t)*v1^3 - 3*x1", "(v1 - v2^3)^2 + x1*v2^2",
      "(v1 - v2^2)^4 + x1*v2^2", "sin(t)*cos(x1) - exp(v1/(x1^2 + 1))",
      "-t^3 + sqrt(t^2 + 1) - abs(x1)"};
  for (const char* text : fixtures) {
    ExprPtr e = parse_expression(text, 2);
    ExprPtr round = parse_expression(to_string(e), 2);
    CHECK(structurally_equal(e, round));
  }
  for (int trial = 0; trial < 200; ++trial) {
    ExprPtr e = random_expr(rng, 2, 4);
    ExprPtr round = parse_expression(to_string(e), 2);
    CHECK(structurally_equal(e, round));
  }
}

TEST_CASE("symbolic derivative matches Richardson central differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  const int n = 2;
  int checked = 0;
  int trial = 0;
  while (checked < 100 && trial < 400) {
    ++trial;
    ExprPtr e = random_expr(rng, n, 4);
    double t = point(rng);
    std::vector<double> x{point(rng), point(rng)};
    std::vector<double> v{point(rng), point(rng)};
    struct Probe {
      VarId var;
      double* slot;
    };
    double tt = t;
    Probe probes[] = {{VarId::time(), &tt},
                      {VarId::state(1), &x[0]},
                      {VarId::state(2), &x[1]},
                      {VarId::velocity(1), &v[0]},
                      {VarId::velocity(2), &v[1]}};
    bool usable = true;
    try {
      double magnitude = evaluate(e, {tt, {x.data(), 2}, {v.data(), 2}});
      if (std::fabs(magnitude) > 1e3) continue;  // keep FD roundoff below 1e-6
    } catch (const EvalError&) {
      continue;
    }
    for (const Probe& probe : probes) {
      ExprPtr de = differentiate(e, probe.var);
      double symbolic = 0.0, numeric = 0.0;
      try {
        symbolic = evaluate(de, {tt, {x.data(), 2}, {v.data(), 2}});
        auto f = [&](double h) {
          double saved = *probe.slot;
          *probe.slot = saved + h;
          double up = evaluate(e, {tt, {x.data(), 2}, {v.data(), 2}});
          *probe.slot = saved - h;
          double dn = evaluate(e, {tt, {x.data(), 2}, {v.data(), 2}});
          *probe.slot = saved;
          return (up - dn) / (2.0 * h);
        };
        double d1 = f(1e-5), d2 = f(5e-6);
        numeric = (4.0 * d2 - d1) / 3.0;  // Richardson on the central difference
      } catch (const EvalError&) {
        usable = false;
        break;
      }
      if (std::fabs(symbolic) > 1e3 || !std::isfinite(numeric)) {
        usable = false;
        break;
      }
      double scale = std::max(1.0, std::fabs(symbolic));
      CHECK(std::fabs(symbolic - numeric) <= 1e-6 * scale);
    }
    if (usable) ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("evaluation is pure") {
  ExprPtr e = parse_expression("sin(t)*x1 + exp(v1)/(x1^2 + 2)", 1);
  double a = eval_at(e, 0.37, {1.1}, {-0.6});
  double b = eval_at(e, 0.37, {1.1}, {-0.6});
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("constant folding and identity simplification preserve value") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  ExprPtr e = parse_expression("sin(t) + x1^3 - v1/(t^2 + 1)", 1);
  // rebuilt with folded-away identities
  ExprPtr wrapped = make_add(make_mul(e, make_constant(1.0)), make_constant(0.0));
  CHECK(structurally_equal(e, wrapped));
  ExprPtr doubled = make_sub(make_mul(make_constant(2.0), e), e);
  for (int i = 0; i < 1000; ++i) {
    double t = point(rng), x = point(rng), v = point(rng);
    double base = eval_at(e, t, {x}, {v});
    double other = eval_at(doubled, t, {x}, {v});
    CHECK(std::fabs(other - 2.0 * base + base) <=
          1e-12 * std::max(1.0, std::fabs(base)));
  }
  CHECK(parse_expression("2*3 + 4^2", 1)->constant == doctest::Approx(22.0));
  CHECK(parse_expression("x1*(4 - 4)", 1)->constant == 0.0);
}

TEST_CASE("integrand bundle: symmetry and idempotent cache") {
  ExprPtr L = parse_expression("sin(x1*v1) + exp(t*x1)*v1^2 + x2^2*v2", 2);
  IntegrandBundle ib(2, L);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> point(-0.8, 0.8);
  for (int trial = 0; trial < 25; ++trial) {
    double t = point(rng);
    std::vector<double> x{point(rng), point(rng)};
    std::vector<double> v{point(rng), point(rng)};
    EvalPoint p{t, {x.data(), 2}, {v.data(), 2}};
    Mat lxx = ib.eval_Lxx(p);
    Mat lvv = ib.eval_Lvv(p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(std::fabs(lxx[i][j] - lxx[j][i]) <=
              1e-9 * std::max(1.0, std::fabs(lxx[i][j])));
        CHECK(std::fabs(lvv[i][j] - lvv[j][i]) <=
              1e-9 * std::max(1.0, std::fabs(lvv[i][j])));
      }
  }
  // cached partials are exactly fresh differentiation
  CHECK(structurally_equal(ib.Lx(0), differentiate(L, VarId::state(1))));
  CHECK(structurally_equal(ib.Lvv(1, 0),
                           differentiate(differentiate(L, VarId::velocity(2)),
                                         VarId::velocity(1))));
  CHECK(structurally_equal(
      ib.Lvvv(0, 0, 1),
      differentiate(differentiate(differentiate(L, VarId::velocity(1)),
                                  VarId::velocity(1)),
                    VarId::velocity(2))));
}
