#ifndef VARICHECK_EXPR_HPP_
#define VARICHECK_EXPR_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace varicheck {

/// Thrown when an expression cannot be evaluated at a point (log of a
/// non-positive number, division by zero, the derivative of abs at its kink,
/// or any non-finite intermediate). The message names the offending
/// subexpression and the input that triggered it.
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by parse_expression; position() is a 0-based byte offset into the
/// input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

enum class ExprKind {
  Constant,
  TimeVar,   // t
  StateVar,  // x_i
  VelVar,    // v_i
  Negate,
  Add,
  Subtract,
  Multiply,
  Divide,
  Power,  // integer exponent
  Fun,
};

enum class FunKind { Sin, Cos, Exp, Log, Sqrt, Abs, Sign };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Expressions are shared freely across threads;
/// nothing mutates after construction.
struct Expr {
  ExprKind kind;
  double constant = 0.0;       // Constant
  int index = 0;               // StateVar / VelVar, 1-based
  int exponent = 0;            // Power
  FunKind fun = FunKind::Sin;  // Fun
  ExprPtr a, b;
};

/// Evaluation point: t plus component vectors x (state) and v (velocity).
struct EvalPoint {
  double t = 0.0;
  std::span<const double> x;
  std::span<const double> v;
};

// Simplifying factories (constant folding plus 0/1 identities; no deeper
// rewriting).
ExprPtr make_constant(double value);
ExprPtr make_time();
ExprPtr make_state(int index);
ExprPtr make_velocity(int index);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr base, int exponent);
ExprPtr make_fun(FunKind fun, ExprPtr arg);

/// Variable identifier for differentiation: kind must be TimeVar, StateVar or
/// VelVar; index is ignored for TimeVar.
struct VarId {
  ExprKind kind;
  int index = 0;
  static VarId time() { return {ExprKind::TimeVar, 0}; }
  static VarId state(int i) { return {ExprKind::StateVar, i}; }
  static VarId velocity(int i) { return {ExprKind::VelVar, i}; }
};

/// Parses an infix expression over t, x1..xn, v1..vn. Power uses ^ (right
/// associative, integer exponents kept exact; anything else is routed through
/// exp/log). Implicit multiplication is a syntax error. See
/// docs/problem-format.md for the grammar.
ExprPtr parse_expression(std::string_view text, int dimension);

/// Exact symbolic derivative. Derivatives of abs introduce a sign node whose
/// evaluation within 1e-12 of the kink raises EvalError.
ExprPtr differentiate(const ExprPtr& e, VarId var);

/// Recursive IEEE-double evaluation. Singular inputs and non-finite
/// intermediates raise EvalError; a NaN is never returned silently.
double evaluate(const ExprPtr& e, const EvalPoint& p);

/// Prints in the parseable grammar; parse(to_string(e)) is structurally equal
/// to e.
std::string to_string(const ExprPtr& e);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// Largest variable index referenced, per kind. Used to validate that path
/// segment expressions depend on t alone.
bool depends_only_on_time(const ExprPtr& e);

}  // namespace varicheck

#endif  // VARICHECK_EXPR_HPP_
