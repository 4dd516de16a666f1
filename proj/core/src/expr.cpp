#include "varicheck/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>
#include <vector>

namespace varicheck {

namespace {

constexpr double kSignKinkTol = 1e-12;
constexpr int kMaxExponent = 64;

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

bool is_const(const ExprPtr& e, double v) {
  return e->kind == ExprKind::Constant && e->constant == v;
}

bool is_const(const ExprPtr& e) { return e->kind == ExprKind::Constant; }

double pow_int(double base, int k) {
  // exponentiation by squaring; negative exponents via reciprocal
  bool invert = k < 0;
  unsigned long long n = invert ? -static_cast<long long>(k) : k;
  double acc = 1.0, p = base;
  while (n) {
    if (n & 1ULL) acc *= p;
    p *= p;
    n >>= 1;
  }
  return invert ? 1.0 / acc : acc;
}

}  // namespace

ExprPtr make_constant(double value) {
  Expr e;
  e.kind = ExprKind::Constant;
  e.constant = value;
  return node(std::move(e));
}

ExprPtr make_time() {
  Expr e;
  e.kind = ExprKind::TimeVar;
  return node(std::move(e));
}

ExprPtr make_state(int index) {
  Expr e;
  e.kind = ExprKind::StateVar;
  e.index = index;
  return node(std::move(e));
}

ExprPtr make_velocity(int index) {
  Expr e;
  e.kind = ExprKind::VelVar;
  e.index = index;
  return node(std::move(e));
}

ExprPtr make_neg(ExprPtr a) {
  if (is_const(a)) return make_constant(-a->constant);
  if (a->kind == ExprKind::Negate) return a->a;
  Expr e;
  e.kind = ExprKind::Negate;
  e.a = std::move(a);
  return node(std::move(e));
}

ExprPtr make_add(ExprPtr a, ExprPtr b) {
  if (is_const(a) && is_const(b)) return make_constant(a->constant + b->constant);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  Expr e;
  e.kind = ExprKind::Add;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  if (is_const(a) && is_const(b)) return make_constant(a->constant - b->constant);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  Expr e;
  e.kind = ExprKind::Subtract;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  if (is_const(a) && is_const(b)) return make_constant(a->constant * b->constant);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return make_neg(std::move(b));
  if (is_const(b, -1.0)) return make_neg(std::move(a));
  Expr e;
  e.kind = ExprKind::Multiply;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
  if (is_const(a) && is_const(b) && b->constant != 0.0)
    return make_constant(a->constant / b->constant);
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(b, 1.0)) return a;
  Expr e;
  e.kind = ExprKind::Divide;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_pow(ExprPtr base, int exponent) {
  if (exponent == 0) return make_constant(1.0);
  if (exponent == 1) return base;
  if (is_const(base)) return make_constant(pow_int(base->constant, exponent));
  Expr e;
  e.kind = ExprKind::Power;
  e.exponent = exponent;
  e.a = std::move(base);
  return node(std::move(e));
}

ExprPtr make_fun(FunKind fun, ExprPtr arg) {
  if (is_const(arg)) {
    double x = arg->constant;
    switch (fun) {
      case FunKind::Sin: return make_constant(std::sin(x));
      case FunKind::Cos: return make_constant(std::cos(x));
      case FunKind::Exp: return make_constant(std::exp(x));
      case FunKind::Abs: return make_constant(std::fabs(x));
      case FunKind::Log:
        if (x > 0.0) return make_constant(std::log(x));
        break;  // keep the node; evaluation reports the domain error
      case FunKind::Sqrt:
        if (x >= 0.0) return make_constant(std::sqrt(x));
        break;
      case FunKind::Sign:
        break;  // never folded: the kink check belongs to evaluation
    }
  }
  Expr e;
  e.kind = ExprKind::Fun;
  e.fun = fun;
  e.a = std::move(arg);
  return node(std::move(e));
}

// ---------------------------------------------------------------------------
// printing

namespace {

const char* fun_name(FunKind f) {
  switch (f) {
    case FunKind::Sin: return "sin";
    case FunKind::Cos: return "cos";
    case FunKind::Exp: return "exp";
    case FunKind::Log: return "log";
    case FunKind::Sqrt: return "sqrt";
    case FunKind::Abs: return "abs";
    case FunKind::Sign: return "sign";
  }
  return "?";
}

// precedence: add/sub 1, mul/div 2, unary-neg 3, pow 4, atom 5
int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Add:
    case ExprKind::Subtract: return 1;
    case ExprKind::Multiply:
    case ExprKind::Divide: return 2;
    case ExprKind::Negate: return 3;
    case ExprKind::Power: return 4;
    default: return 5;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void print(const ExprPtr& e, std::string& out, int parent_prec, bool right_operand) {
  int prec = precedence(*e);
  bool parens = prec < parent_prec ||
                (prec == parent_prec && right_operand && prec != 5);
  if (parens) out += '(';
  switch (e->kind) {
    case ExprKind::Constant:
      if (e->constant < 0.0 && !parens && parent_prec > 1) {
        out += '(';
        out += format_double(e->constant);
        out += ')';
      } else {
        out += format_double(e->constant);
      }
      break;
    case ExprKind::TimeVar: out += 't'; break;
    case ExprKind::StateVar: out += 'x'; out += std::to_string(e->index); break;
    case ExprKind::VelVar: out += 'v'; out += std::to_string(e->index); break;
    case ExprKind::Negate:
      out += '-';
      print(e->a, out, 3, true);
      break;
    case ExprKind::Add:
      print(e->a, out, 1, false);
      out += " + ";
      print(e->b, out, 1, true);
      break;
    case ExprKind::Subtract:
      print(e->a, out, 1, false);
      out += " - ";
      print(e->b, out, 1, true);
      break;
    case ExprKind::Multiply:
      print(e->a, out, 2, false);
      out += '*';
      print(e->b, out, 2, true);
      break;
    case ExprKind::Divide:
      print(e->a, out, 2, false);
      out += '/';
      print(e->b, out, 2, true);
      break;
    case ExprKind::Power:
      print(e->a, out, 5, false);
      out += '^';
      if (e->exponent < 0) {
        out += '(';
        out += std::to_string(e->exponent);
        out += ')';
      } else {
        out += std::to_string(e->exponent);
      }
      break;
    case ExprKind::Fun:
      out += fun_name(e->fun);
      out += '(';
      print(e->a, out, 0, false);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::string out;
  print(e, out, 0, false);
  return out;
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

[[noreturn]] void eval_fail(const ExprPtr& e, const std::string& reason) {
  throw EvalError("cannot evaluate '" + to_string(e) + "': " + reason);
}

double eval_rec(const ExprPtr& e, const EvalPoint& p) {
  switch (e->kind) {
    case ExprKind::Constant: return e->constant;
    case ExprKind::TimeVar: return p.t;
    case ExprKind::StateVar:
      if (e->index < 1 || static_cast<std::size_t>(e->index) > p.x.size())
        eval_fail(e, "state index out of range for the supplied point");
      return p.x[e->index - 1];
    case ExprKind::VelVar:
      if (e->index < 1 || static_cast<std::size_t>(e->index) > p.v.size())
        eval_fail(e, "velocity index out of range for the supplied point");
      return p.v[e->index - 1];
    case ExprKind::Negate: return -eval_rec(e->a, p);
    case ExprKind::Add: return eval_rec(e->a, p) + eval_rec(e->b, p);
    case ExprKind::Subtract: return eval_rec(e->a, p) - eval_rec(e->b, p);
    case ExprKind::Multiply: return eval_rec(e->a, p) * eval_rec(e->b, p);
    case ExprKind::Divide: {
      double num = eval_rec(e->a, p);
      double den = eval_rec(e->b, p);
      if (den == 0.0) eval_fail(e, "division by zero (numerator " + format_double(num) + ")");
      return num / den;
    }
    case ExprKind::Power: {
      double base = eval_rec(e->a, p);
      if (base == 0.0 && e->exponent < 0)
        eval_fail(e, "zero raised to a negative power");
      return pow_int(base, e->exponent);
    }
    case ExprKind::Fun: {
      double x = eval_rec(e->a, p);
      switch (e->fun) {
        case FunKind::Sin: return std::sin(x);
        case FunKind::Cos: return std::cos(x);
        case FunKind::Exp: return std::exp(x);
        case FunKind::Abs: return std::fabs(x);
        case FunKind::Log:
          if (x <= 0.0) eval_fail(e, "log of non-positive input " + format_double(x));
          return std::log(x);
        case FunKind::Sqrt:
          if (x < 0.0) eval_fail(e, "sqrt of negative input " + format_double(x));
          return std::sqrt(x);
        case FunKind::Sign:
          if (std::fabs(x) <= kSignKinkTol)
            eval_fail(e, "abs-derivative evaluated at its kink (input " +
                             format_double(x) + ")");
          return x > 0.0 ? 1.0 : -1.0;
      }
      eval_fail(e, "unknown function");
    }
  }
  eval_fail(e, "unknown node kind");
}

}  // namespace

double evaluate(const ExprPtr& e, const EvalPoint& p) {
  double v = eval_rec(e, p);
  if (!std::isfinite(v)) eval_fail(e, "non-finite result " + format_double(v));
  return v;
}

// ---------------------------------------------------------------------------
// differentiation

ExprPtr differentiate(const ExprPtr& e, VarId var) {
  switch (e->kind) {
    case ExprKind::Constant: return make_constant(0.0);
    case ExprKind::TimeVar:
      return make_constant(var.kind == ExprKind::TimeVar ? 1.0 : 0.0);
    case ExprKind::StateVar:
      return make_constant(
          var.kind == ExprKind::StateVar && var.index == e->index ? 1.0 : 0.0);
    case ExprKind::VelVar:
      return make_constant(
          var.kind == ExprKind::VelVar && var.index == e->index ? 1.0 : 0.0);
    case ExprKind::Negate: return make_neg(differentiate(e->a, var));
    case ExprKind::Add:
      return make_add(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Subtract:
      return make_sub(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Multiply:
      return make_add(make_mul(differentiate(e->a, var), e->b),
                      make_mul(e->a, differentiate(e->b, var)));
    case ExprKind::Divide:
      // (u/w)' = u'/w - u w'/w^2
      return make_sub(make_div(differentiate(e->a, var), e->b),
                      make_div(make_mul(e->a, differentiate(e->b, var)),
                               make_pow(e->b, 2)));
    case ExprKind::Power:
      // (u^k)' = k u^(k-1) u'
      return make_mul(make_constant(static_cast<double>(e->exponent)),
                      make_mul(make_pow(e->a, e->exponent - 1),
                               differentiate(e->a, var)));
    case ExprKind::Fun: {
      ExprPtr da = differentiate(e->a, var);
      switch (e->fun) {
        case FunKind::Sin: return make_mul(make_fun(FunKind::Cos, e->a), da);
        case FunKind::Cos:
          return make_neg(make_mul(make_fun(FunKind::Sin, e->a), da));
        case FunKind::Exp: return make_mul(make_fun(FunKind::Exp, e->a), da);
        case FunKind::Log: return make_div(da, e->a);
        case FunKind::Sqrt:
          return make_div(da, make_mul(make_constant(2.0),
                                       make_fun(FunKind::Sqrt, e->a)));
        case FunKind::Abs:
          return make_mul(make_fun(FunKind::Sign, e->a), da);
        case FunKind::Sign:
          // zero away from the kink; the kink itself errors at evaluation
          return make_constant(0.0);
      }
      break;
    }
  }
  throw std::logic_error("differentiate: unknown node kind");
}

// ---------------------------------------------------------------------------
// structural equality and variable usage

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Constant:
      return a->constant == b->constant ||
             (std::isnan(a->constant) && std::isnan(b->constant));
    case ExprKind::TimeVar: return true;
    case ExprKind::StateVar:
    case ExprKind::VelVar: return a->index == b->index;
    case ExprKind::Negate: return structurally_equal(a->a, b->a);
    case ExprKind::Power:
      return a->exponent == b->exponent && structurally_equal(a->a, b->a);
    case ExprKind::Fun:
      return a->fun == b->fun && structurally_equal(a->a, b->a);
    default:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
  }
}

bool depends_only_on_time(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::StateVar:
    case ExprKind::VelVar: return false;
    case ExprKind::Constant:
    case ExprKind::TimeVar: return true;
    default:
      if (e->a && !depends_only_on_time(e->a)) return false;
      if (e->b && !depends_only_on_time(e->b)) return false;
      return true;
  }
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Token {
  enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Kind kind;
  double number = 0.0;
  std::string ident;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= text_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    char c = text_[i_];
    switch (c) {
      case '+': tok_.kind = Token::Kind::Plus; ++i_; return;
      case '-': tok_.kind = Token::Kind::Minus; ++i_; return;
      case '*': tok_.kind = Token::Kind::Star; ++i_; return;
      case '/': tok_.kind = Token::Kind::Slash; ++i_; return;
      case '^': tok_.kind = Token::Kind::Caret; ++i_; return;
      case '(': tok_.kind = Token::Kind::LParen; ++i_; return;
      case ')': tok_.kind = Token::Kind::RParen; ++i_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + i_;
      const char* end = text_.data() + text_.size();
      double value = 0.0;
      auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc{})
        throw ParseError("malformed number", i_);
      tok_.kind = Token::Kind::Number;
      tok_.number = value;
      i_ += static_cast<std::size_t>(res.ptr - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
        ++j;
      tok_.kind = Token::Kind::Ident;
      tok_.ident = std::string(text_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

  std::string_view text_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view text, int dimension) : lex_(text), n_(dimension) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::End)
      throw ParseError("expected operator or end of input", t.pos);
    return e;
  }

 private:
  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::Plus) {
        lex_.take();
        e = make_add(std::move(e), parse_term());
      } else if (t.kind == Token::Kind::Minus) {
        lex_.take();
        e = make_sub(std::move(e), parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::Star) {
        lex_.take();
        e = make_mul(std::move(e), parse_unary());
      } else if (t.kind == Token::Kind::Slash) {
        lex_.take();
        e = make_div(std::move(e), parse_unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Minus) {
      lex_.take();
      return make_neg(parse_unary());
    }
    if (t.kind == Token::Kind::Plus) {
      lex_.take();
      return parse_unary();
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (lex_.peek().kind != Token::Kind::Caret) return base;
    Token caret = lex_.take();
    // right associative; exponent binds unary minus: x^-2 and x^(-2) agree
    ExprPtr exponent = parse_unary();
    if (exponent->kind == ExprKind::Constant) {
      double k = exponent->constant;
      double ri = std::nearbyint(k);
      if (k == ri && std::fabs(k) <= kMaxExponent)
        return make_pow(std::move(base), static_cast<int>(ri));
    }
    // fractional or symbolic exponent: b^e = exp(e*log(b))
    return make_fun(FunKind::Exp,
                    make_mul(std::move(exponent),
                             make_fun(FunKind::Log, std::move(base))));
  }

  ExprPtr parse_atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::Number: return make_constant(t.number);
      case Token::Kind::LParen: {
        ExprPtr e = parse_sum();
        Token close = lex_.take();
        if (close.kind != Token::Kind::RParen)
          throw ParseError("expected ')'", close.pos);
        return e;
      }
      case Token::Kind::Ident: return resolve_ident(t);
      default:
        throw ParseError("expected a number, variable, function or '('", t.pos);
    }
  }

  ExprPtr resolve_ident(const Token& t) {
    static const std::pair<const char*, FunKind> kFuns[] = {
        {"sin", FunKind::Sin}, {"cos", FunKind::Cos},   {"exp", FunKind::Exp},
        {"log", FunKind::Log}, {"sqrt", FunKind::Sqrt}, {"abs", FunKind::Abs},
    };
    for (const auto& [name, fun] : kFuns) {
      if (t.ident == name) {
        Token open = lex_.take();
        if (open.kind != Token::Kind::LParen)
          throw ParseError("function '" + t.ident + "' requires '('", open.pos);
        ExprPtr arg = parse_sum();
        Token close = lex_.take();
        if (close.kind != Token::Kind::RParen)
          throw ParseError("expected ')' after function argument", close.pos);
        return make_fun(fun, std::move(arg));
      }
    }
    if (t.ident == "t") return make_time();
    if ((t.ident[0] == 'x' || t.ident[0] == 'v') && t.ident.size() > 1) {
      for (std::size_t i = 1; i < t.ident.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t.ident[i])))
          throw ParseError("unknown variable '" + t.ident + "'", t.pos);
      int index = std::atoi(t.ident.c_str() + 1);
      if (index < 1 || index > n_)
        throw ParseError("variable '" + t.ident + "' out of range for dimension " +
                             std::to_string(n_),
                         t.pos);
      return t.ident[0] == 'x' ? make_state(index) : make_velocity(index);
    }
    throw ParseError("unknown variable or function '" + t.ident + "'", t.pos);
  }

  Lexer lex_;
  int n_;
};

}  // namespace

ExprPtr parse_expression(std::string_view text, int dimension) {
  if (dimension < 1)
    throw ParseError("dimension must be at least 1", 0);
  Parser p(text, dimension);
  return p.parse();
}

}  // namespace varicheck
