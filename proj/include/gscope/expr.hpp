#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gscope::expr {

/// Node kinds of an elementary-function expression tree over C.
/// The function vocabulary is arithmetic plus exp and log; PowInt is
/// lossless sugar for repeated multiplication / reciprocals.
enum class ExprKind {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Exp,
  Log,
  PowInt,
};

/// Parse failure. `offset` is the byte position in the input text.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string message, std::size_t offset)
      : std::runtime_error(std::move(message)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A name that is not in {x, exp, log, ln, i, pi, e}.
class UnknownIdentifier : public SyntaxError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : SyntaxError("unknown identifier '" + name + "'", offset),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Immutable expression tree with value semantics. Nodes are shared and
/// never mutated after construction, so Expr values may be evaluated and
/// differentiated concurrently.
///
/// Builders fold exact literal arithmetic (Const op Const) and elide
/// additive/multiplicative identities; nothing beyond that.
class Expr {
 public:
  static Expr constant(std::complex<double> value);
  static Expr variable();
  static Expr add(const Expr& a, const Expr& b);
  static Expr sub(const Expr& a, const Expr& b);
  static Expr mul(const Expr& a, const Expr& b);
  static Expr div(const Expr& a, const Expr& b);
  static Expr exp_of(const Expr& a);
  static Expr log_of(const Expr& a);
  static Expr pow_int(const Expr& base, long long exponent);
  static Expr negate(const Expr& a);

  ExprKind kind() const { return node_->kind; }
  std::complex<double> constant_value() const;
  long long exponent() const;
  std::size_t child_count() const { return node_->children.size(); }
  const Expr& child(std::size_t i) const { return node_->children[i]; }

  bool is_constant() const { return kind() == ExprKind::Constant; }
  /// True iff this is exactly the literal `v`.
  bool is_constant(std::complex<double> v) const;

  /// Deep structural equality (exact constant comparison, no tolerance).
  bool equals(const Expr& other) const;

 private:
  struct Node {
    ExprKind kind;
    std::complex<double> value{};  // Constant
    long long exponent = 0;        // PowInt
    std::vector<Expr> children;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Result of a pointwise evaluation. `pole` is set iff some sub-evaluation
/// divided by, or took log of, a value with modulus below the pole
/// tolerance. Overflow to non-finite values is *not* a pole; callers doing
/// numerics should check both `pole` and std::isfinite.
struct EvalResult {
  std::complex<double> value{};
  bool pole = false;
};

/// Parse the expression grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := number | 'x' | 'i' | 'pi' | 'e'
///           | ('exp'|'log'|'ln') '(' expr ')' | '(' expr ')' | '-' base
/// Throws SyntaxError / UnknownIdentifier with a byte offset.
Expr parse_expression(std::string_view text);

/// Minimal-parenthesis rendering; parse_expression(to_string(e)) is
/// structurally equal to e.
std::string to_string(const Expr& e);

/// Symbolic derivative. Total on valid expressions; applies the sum,
/// product, quotient, chain, exp and log rules with only literal constant
/// folding on the results.
Expr differentiate(const Expr& f);

/// Evaluate at a point using the principal branch for Log.
EvalResult evaluate(const Expr& f, std::complex<double> x,
                    double pole_tol = 1e-12);

/// Maximal number of nested Exp/Log nodes along any root-to-leaf path.
int tower_depth(const Expr& f);

}  // namespace gscope::expr
