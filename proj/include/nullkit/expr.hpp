#pragma once

// Small arithmetic expression language used for warping functions, static
// profiles, graph functions and metric components.
//
// Grammar (precedence high to low):  ^ (right-assoc) > unary - > * / > + -
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | constant | identifier | call | '(' expr ')'
//
// Functions: sin cos tan sinh cosh tanh asin acos atan asinh acosh atanh exp
// ln sqrt abs (one argument), min max (two arguments). Constants: pi, e.

#include "nullkit/core.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nullkit::expr {

enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Fn {
  Sin, Cos, Tan, Sinh, Cosh, Tanh, Asin, Acos, Atan, Asinh, Acosh, Atanh,
  Exp, Ln, Sqrt, Abs, Min, Max
};

std::string_view fn_name(Fn fn);
std::optional<Fn> fn_from_name(std::string_view name);
int fn_arity(Fn fn);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Num;
  double value = 0.0;       // Num
  std::string name;         // Var, or named constant (pi, e) for Num
  Fn fn = Fn::Sin;          // Call
  std::vector<NodePtr> args;
  std::size_t pos = 0;      // byte offset in the source, not part of equality
};

/// Syntax error, unknown identifier or arity mismatch.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset, std::set<std::string> expected = {});
  std::size_t offset() const { return offset_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::set<std::string> expected_;
};

/// Evaluation left the function's domain (ln of a non-positive number, ...).
class EvalError : public Error {
 public:
  EvalError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class Compiled;

class Expression {
 public:
  Expression();
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static Expression parse(std::string_view text);
  static Expression number(double v);
  static Expression variable(std::string name);

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }

  /// Canonical text; parse(str()) reproduces the same tree.
  std::string str() const;

  /// Structural equality (source offsets ignored).
  bool operator==(const Expression& other) const;

  /// Free variable names (named constants excluded).
  std::set<std::string> variables() const;

  /// Throws ParseError at the first identifier not in `allowed`.
  void check_identifiers(const std::set<std::string>& allowed) const;

  /// Partial derivative, lightly simplified.
  Expression derivative(const std::string& var) const;

  /// Replace variables by numeric values.
  Expression bind(const std::map<std::string, double>& values) const;

  /// Interpreted evaluation; every free variable must be bound.
  double eval(const std::map<std::string, double>& values) const;

  /// Resolve `vars` to argument slots and everything in `params` to constants.
  Compiled compile(const std::vector<std::string>& vars,
                   const std::map<std::string, double>& params = {}) const;

 private:
  NodePtr root_;
};

/// Flat stack program; cheap to evaluate many times.
class Compiled {
 public:
  double operator()(std::span<const double> args) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }
  int arity() const { return arity_; }

  struct Instr {
    enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double value = 0.0;
    int slot = 0;
    Fn fn = Fn::Sin;
    std::size_t pos = 0;
  };

 private:
  friend class Expression;
  std::vector<Instr> code_;
  int arity_ = 0;
  int max_stack_ = 0;
};

bool structurally_equal(const Node& a, const Node& b);

}  // namespace nullkit::expr
