#include "gscope/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace gscope::expr {

namespace {

bool finite(std::complex<double> v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

std::complex<double> int_pow(std::complex<double> base, long long k) {
  // Binary exponentiation; negative exponents via reciprocal at the end.
  const bool neg = k < 0;
  unsigned long long n = neg ? static_cast<unsigned long long>(-(k + 1)) + 1
                             : static_cast<unsigned long long>(k);
  std::complex<double> acc{1.0, 0.0};
  std::complex<double> b = base;
  while (n > 0) {
    if (n & 1ULL) acc *= b;
    b *= b;
    n >>= 1ULL;
  }
  return neg ? 1.0 / acc : acc;
}

}  // namespace

std::complex<double> Expr::constant_value() const {
  if (kind() != ExprKind::Constant)
    throw std::logic_error("constant_value on non-constant node");
  return node_->value;
}

long long Expr::exponent() const {
  if (kind() != ExprKind::PowInt)
    throw std::logic_error("exponent on non-power node");
  return node_->exponent;
}

bool Expr::is_constant(std::complex<double> v) const {
  return is_constant() && node_->value == v;
}

bool Expr::equals(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case ExprKind::Constant:
      return node_->value == other.node_->value;
    case ExprKind::Variable:
      return true;
    case ExprKind::PowInt:
      if (node_->exponent != other.node_->exponent) return false;
      break;
    default:
      break;
  }
  if (child_count() != other.child_count()) return false;
  for (std::size_t i = 0; i < child_count(); ++i)
    if (!child(i).equals(other.child(i))) return false;
  return true;
}

Expr Expr::constant(std::complex<double> value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable() {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Variable;
  return Expr(std::move(n));
}

Expr Expr::add(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    auto v = a.constant_value() + b.constant_value();
    if (finite(v)) return constant(v);
  }
  if (a.is_constant({0.0, 0.0})) return b;
  if (b.is_constant({0.0, 0.0})) return a;
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Add;
  n->children = {a, b};
  return Expr(std::move(n));
}

Expr Expr::sub(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    auto v = a.constant_value() - b.constant_value();
    if (finite(v)) return constant(v);
  }
  if (b.is_constant({0.0, 0.0})) return a;
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Sub;
  n->children = {a, b};
  return Expr(std::move(n));
}

Expr Expr::mul(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    auto v = a.constant_value() * b.constant_value();
    if (finite(v)) return constant(v);
  }
  if (a.is_constant({0.0, 0.0}) || b.is_constant({0.0, 0.0}))
    return constant({0.0, 0.0});
  if (a.is_constant({1.0, 0.0})) return b;
  if (b.is_constant({1.0, 0.0})) return a;
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Mul;
  n->children = {a, b};
  return Expr(std::move(n));
}

Expr Expr::div(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() &&
      std::abs(b.constant_value()) > 1e-12) {
    auto v = a.constant_value() / b.constant_value();
    if (finite(v)) return constant(v);
  }
  if (b.is_constant({1.0, 0.0})) return a;
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Div;
  n->children = {a, b};
  return Expr(std::move(n));
}

Expr Expr::exp_of(const Expr& a) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Exp;
  n->children = {a};
  return Expr(std::move(n));
}

Expr Expr::log_of(const Expr& a) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Log;
  n->children = {a};
  return Expr(std::move(n));
}

Expr Expr::pow_int(const Expr& base, long long exponent) {
  if (exponent == 0) return constant({1.0, 0.0});
  if (exponent == 1) return base;
  if (base.is_constant()) {
    auto v = int_pow(base.constant_value(), exponent);
    if (finite(v) && (exponent > 0 || std::abs(base.constant_value()) > 1e-12))
      return constant(v);
  }
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::PowInt;
  n->exponent = exponent;
  n->children = {base};
  return Expr(std::move(n));
}

Expr Expr::negate(const Expr& a) {
  if (a.is_constant()) return constant(-a.constant_value());
  return sub(constant({0.0, 0.0}), a);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw SyntaxError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c))
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+'))
        e = Expr::add(e, parse_term());
      else if (consume('-'))
        e = Expr::sub(e, parse_term());
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (consume('*'))
        e = Expr::mul(e, parse_factor());
      else if (consume('/'))
        e = Expr::div(e, parse_factor());
      else
        return e;
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (consume('^')) return Expr::pow_int(base, parse_integer());
    return base;
  }

  long long parse_integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
      ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == digits) throw SyntaxError("expected integer exponent", start);
    long long value = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_,
                               value);
    if (res.ec != std::errc{})
      throw SyntaxError("integer exponent out of range", start);
    return value;
  }

  Expr parse_base() {
    if (eof()) throw SyntaxError("unexpected end of input", pos_);
    char c = peek();
    if (c == '-') {
      ++pos_;
      return Expr::negate(parse_base());
    }
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
    throw SyntaxError("unexpected character", pos_);
  }

  Expr parse_number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      std::size_t dot = pos_++;
      if (pos_ >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw SyntaxError("expected digits after decimal point", dot);
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    // Exponent part only when 'e'/'E' is followed by an (optionally signed)
    // digit, so "2*e" still parses as two times Euler's constant.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_ + 1;
      if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-'))
        ++mark;
      if (mark < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[mark]))) {
        pos_ = mark;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      }
    }
    double value = 0.0;
    std::string lexeme(text_.substr(start, pos_ - start));
    char* end = nullptr;
    value = std::strtod(lexeme.c_str(), &end);
    if (end != lexeme.c_str() + lexeme.size())
      throw SyntaxError("malformed number", start);
    return Expr::constant({value, 0.0});
  }

  Expr parse_name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "x") return Expr::variable();
    if (name == "i") return Expr::constant({0.0, 1.0});
    if (name == "pi") return Expr::constant({std::numbers::pi, 0.0});
    if (name == "e") return Expr::constant({std::numbers::e, 0.0});
    if (name == "exp" || name == "log" || name == "ln") {
      expect('(');
      Expr arg = parse_expr();
      expect(')');
      return name == "exp" ? Expr::exp_of(arg) : Expr::log_of(arg);
    }
    throw UnknownIdentifier(name, start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

std::string real_to_string(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string const_to_string(std::complex<double> v) {
  const double re = v.real();
  const double im = v.imag();
  if (im == 0.0) {
    std::string s = real_to_string(re);
    return re < 0.0 ? "(" + s + ")" : s;
  }
  if (re == 0.0) return "(" + real_to_string(im) + "*i)";
  std::string s = "(" + real_to_string(re);
  if (im >= 0.0)
    s += "+" + real_to_string(im) + "*i)";
  else
    s += "-" + real_to_string(-im) + "*i)";
  return s;
}

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::PowInt:
      return 3;
    default:
      return 4;
  }
}

void print(const Expr& e, int parent_prec, bool right_side, std::string& out) {
  const int prec = precedence(e.kind());
  const bool parens =
      prec < parent_prec || (prec == parent_prec && right_side && prec <= 2);
  if (parens) out += '(';
  switch (e.kind()) {
    case ExprKind::Constant:
      out += const_to_string(e.constant_value());
      break;
    case ExprKind::Variable:
      out += 'x';
      break;
    case ExprKind::Add:
      print(e.child(0), 1, false, out);
      out += '+';
      print(e.child(1), 1, true, out);
      break;
    case ExprKind::Sub:
      print(e.child(0), 1, false, out);
      out += '-';
      print(e.child(1), 1, true, out);
      break;
    case ExprKind::Mul:
      print(e.child(0), 2, false, out);
      out += '*';
      print(e.child(1), 2, true, out);
      break;
    case ExprKind::Div:
      print(e.child(0), 2, false, out);
      out += '/';
      print(e.child(1), 2, true, out);
      break;
    case ExprKind::Exp:
      out += "exp(";
      print(e.child(0), 0, false, out);
      out += ')';
      break;
    case ExprKind::Log:
      out += "log(";
      print(e.child(0), 0, false, out);
      out += ')';
      break;
    case ExprKind::PowInt: {
      print(e.child(0), 4, false, out);
      out += '^';
      long long k = e.exponent();
      out += std::to_string(k);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, false, out);
  return out;
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

Expr differentiate(const Expr& f) {
  switch (f.kind()) {
    case ExprKind::Constant:
      return Expr::constant({0.0, 0.0});
    case ExprKind::Variable:
      return Expr::constant({1.0, 0.0});
    case ExprKind::Add:
      return Expr::add(differentiate(f.child(0)), differentiate(f.child(1)));
    case ExprKind::Sub:
      return Expr::sub(differentiate(f.child(0)), differentiate(f.child(1)));
    case ExprKind::Mul: {
      // D(uv) = u D(v) + v D(u)
      const Expr& u = f.child(0);
      const Expr& v = f.child(1);
      return Expr::add(Expr::mul(u, differentiate(v)),
                       Expr::mul(v, differentiate(u)));
    }
    case ExprKind::Div: {
      const Expr& u = f.child(0);
      const Expr& v = f.child(1);
      Expr num = Expr::sub(Expr::mul(differentiate(u), v),
                           Expr::mul(u, differentiate(v)));
      return Expr::div(num, Expr::pow_int(v, 2));
    }
    case ExprKind::Exp:
      return Expr::mul(Expr::exp_of(f.child(0)), differentiate(f.child(0)));
    case ExprKind::Log:
      return Expr::div(differentiate(f.child(0)), f.child(0));
    case ExprKind::PowInt: {
      const Expr& u = f.child(0);
      const long long k = f.exponent();
      Expr coeff = Expr::mul(Expr::constant({static_cast<double>(k), 0.0}),
                             Expr::pow_int(u, k - 1));
      return Expr::mul(coeff, differentiate(u));
    }
  }
  throw std::logic_error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

std::complex<double> eval_node(const Expr& e, std::complex<double> x,
                               double pole_tol, bool& pole) {
  switch (e.kind()) {
    case ExprKind::Constant:
      return e.constant_value();
    case ExprKind::Variable:
      return x;
    case ExprKind::Add:
      return eval_node(e.child(0), x, pole_tol, pole) +
             eval_node(e.child(1), x, pole_tol, pole);
    case ExprKind::Sub:
      return eval_node(e.child(0), x, pole_tol, pole) -
             eval_node(e.child(1), x, pole_tol, pole);
    case ExprKind::Mul:
      return eval_node(e.child(0), x, pole_tol, pole) *
             eval_node(e.child(1), x, pole_tol, pole);
    case ExprKind::Div: {
      auto num = eval_node(e.child(0), x, pole_tol, pole);
      auto den = eval_node(e.child(1), x, pole_tol, pole);
      if (std::abs(den) < pole_tol) {
        pole = true;
        return {};
      }
      return num / den;
    }
    case ExprKind::Exp:
      return std::exp(eval_node(e.child(0), x, pole_tol, pole));
    case ExprKind::Log: {
      auto arg = eval_node(e.child(0), x, pole_tol, pole);
      if (std::abs(arg) < pole_tol) {
        pole = true;
        return {};
      }
      return std::log(arg);  // principal branch
    }
    case ExprKind::PowInt: {
      auto base = eval_node(e.child(0), x, pole_tol, pole);
      if (e.exponent() >= 0) return int_pow(base, e.exponent());
      // x^-k is sugar for 1/x^k, so the pole test applies to the
      // expanded denominator.
      auto den = int_pow(base, -e.exponent());
      if (std::abs(den) < pole_tol) {
        pole = true;
        return {};
      }
      return 1.0 / den;
    }
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace

EvalResult evaluate(const Expr& f, std::complex<double> x, double pole_tol) {
  EvalResult r;
  r.value = eval_node(f, x, pole_tol, r.pole);
  return r;
}

int tower_depth(const Expr& f) {
  int best = 0;
  for (std::size_t i = 0; i < f.child_count(); ++i)
    best = std::max(best, tower_depth(f.child(i)));
  if (f.kind() == ExprKind::Exp || f.kind() == ExprKind::Log) ++best;
  return best;
}

}  // namespace gscope::expr
