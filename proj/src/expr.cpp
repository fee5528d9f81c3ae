#include "nullkit/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace nullkit::expr {

namespace {

constexpr std::array<std::string_view, 18> kFnNames = {
    "sin", "cos", "tan", "sinh", "cosh", "tanh", "asin", "acos", "atan",
    "asinh", "acosh", "atanh", "exp", "ln", "sqrt", "abs", "min", "max"};

NodePtr make_num(double v, std::size_t pos = 0) {
  auto n = std::make_shared<Node>();
  n->op = Op::Num;
  n->value = v;
  n->pos = pos;
  return n;
}

NodePtr make_const(std::string name, double v, std::size_t pos) {
  auto n = std::make_shared<Node>();
  n->op = Op::Num;
  n->value = v;
  n->name = std::move(name);
  n->pos = pos;
  return n;
}

NodePtr make_var(std::string name, std::size_t pos = 0) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->name = std::move(name);
  n->pos = pos;
  return n;
}

NodePtr make_node(Op op, std::vector<NodePtr> args, std::size_t pos = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->pos = pos;
  return n;
}

NodePtr make_call(Fn fn, std::vector<NodePtr> args, std::size_t pos = 0) {
  auto n = std::make_shared<Node>();
  n->op = Op::Call;
  n->fn = fn;
  n->args = std::move(args);
  n->pos = pos;
  return n;
}

// ----------------------------------------------------------------------------
// Lexer / parser
// ----------------------------------------------------------------------------

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;
  double value = 0.0;
  std::string text;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    if (tok_.kind != Tok::End) fail("unexpected token", {"operator", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::set<std::string> expected) const {
    throw ParseError(msg, tok_.pos, std::move(expected));
  }

  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    const char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i_;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      if (j < src_.size() && src_[j] == '.') {
        ++j;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      }
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
          while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
          j = k;
        }
      }
      const std::string text(src_.substr(i_, j - i_));
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (text == "." || end != text.c_str() + text.size()) {
        throw ParseError("malformed number", i_, {"number"});
      }
      tok_.kind = Tok::Num;
      tok_.value = v;
      tok_.text = text;
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_.kind = Tok::Ident;
      tok_.text = std::string(src_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    switch (c) {
      case '+': tok_.kind = Tok::Plus; break;
      case '-': tok_.kind = Tok::Minus; break;
      case '*': tok_.kind = Tok::Star; break;
      case '/': tok_.kind = Tok::Slash; break;
      case '^': tok_.kind = Tok::Caret; break;
      case '(': tok_.kind = Tok::LParen; break;
      case ')': tok_.kind = Tok::RParen; break;
      case ',': tok_.kind = Tok::Comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i_,
                         {"number", "identifier", "'('", "'-'"});
    }
    ++i_;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const Op op = tok_.kind == Tok::Plus ? Op::Add : Op::Sub;
      const std::size_t pos = tok_.pos;
      advance();
      NodePtr rhs = parse_term();
      lhs = make_node(op, {lhs, rhs}, pos);
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const Op op = tok_.kind == Tok::Star ? Op::Mul : Op::Div;
      const std::size_t pos = tok_.pos;
      advance();
      NodePtr rhs = parse_unary();
      lhs = make_node(op, {lhs, rhs}, pos);
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (tok_.kind == Tok::Minus) {
      const std::size_t pos = tok_.pos;
      advance();
      return make_node(Op::Neg, {parse_unary()}, pos);
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (tok_.kind == Tok::Caret) {
      const std::size_t pos = tok_.pos;
      advance();
      NodePtr exponent = parse_unary();
      return make_node(Op::Pow, {base, exponent}, pos);
    }
    return base;
  }

  NodePtr parse_primary() {
    const std::size_t pos = tok_.pos;
    switch (tok_.kind) {
      case Tok::Num: {
        const double v = tok_.value;
        advance();
        return make_num(v, pos);
      }
      case Tok::LParen: {
        advance();
        NodePtr e = parse_expr();
        if (tok_.kind != Tok::RParen) fail("expected ')'", {"')'", "operator"});
        advance();
        return e;
      }
      case Tok::Ident: {
        const std::string name = tok_.text;
        advance();
        if (tok_.kind == Tok::LParen) {
          const auto fn = fn_from_name(name);
          if (!fn) throw ParseError("unknown function '" + name + "'", pos, {"function name"});
          advance();
          std::vector<NodePtr> args;
          args.push_back(parse_expr());
          while (tok_.kind == Tok::Comma) {
            advance();
            args.push_back(parse_expr());
          }
          if (tok_.kind != Tok::RParen) fail("expected ')' or ','", {"')'", "','"});
          advance();
          if (static_cast<int>(args.size()) != fn_arity(*fn)) {
            throw ParseError("function '" + name + "' takes " + std::to_string(fn_arity(*fn)) +
                                 " argument(s), got " + std::to_string(args.size()),
                             pos);
          }
          return make_call(*fn, std::move(args), pos);
        }
        if (name == "pi") return make_const("pi", std::numbers::pi, pos);
        if (name == "e") return make_const("e", std::numbers::e, pos);
        if (fn_from_name(name)) throw ParseError("function '" + name + "' needs arguments", pos, {"'('"});
        return make_var(name, pos);
      }
      default:
        fail(tok_.kind == Tok::End ? "unexpected end of input" : "unexpected token",
             {"number", "identifier", "'('", "'-'"});
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token tok_;
};

// ----------------------------------------------------------------------------
// Printing
// ----------------------------------------------------------------------------

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void print(const Node& n, std::ostringstream& out);

void print_wrapped(const Node& n, int min_prec, std::ostringstream& out) {
  if (precedence(n) < min_prec) {
    out << '(';
    print(n, out);
    out << ')';
  } else {
    print(n, out);
  }
}

void print(const Node& n, std::ostringstream& out) {
  switch (n.op) {
    case Op::Num:
      if (!n.name.empty()) out << n.name;
      else out << format_number(n.value);
      return;
    case Op::Var: out << n.name; return;
    case Op::Neg:
      out << '-';
      print_wrapped(*n.args[0], 3, out);
      return;
    case Op::Add:
    case Op::Sub:
      print_wrapped(*n.args[0], 1, out);
      out << (n.op == Op::Add ? " + " : " - ");
      print_wrapped(*n.args[1], 2, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_wrapped(*n.args[0], 2, out);
      out << (n.op == Op::Mul ? "*" : "/");
      print_wrapped(*n.args[1], 3, out);
      return;
    case Op::Pow:
      print_wrapped(*n.args[0], 5, out);
      out << '^';
      print_wrapped(*n.args[1], 3, out);
      return;
    case Op::Call:
      out << fn_name(n.fn) << '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out << ", ";
        print(*n.args[i], out);
      }
      out << ')';
      return;
  }
}

// ----------------------------------------------------------------------------
// Simplifying builders (used by derivative / bind)
// ----------------------------------------------------------------------------

bool as_number(const NodePtr& n, double& v) {
  if (n->op == Op::Num) {
    v = n->value;
    return true;
  }
  if (n->op == Op::Neg && n->args[0]->op == Op::Num) {
    v = -n->args[0]->value;
    return true;
  }
  return false;
}

// Num nodes never carry negative values so that printing stays re-parseable.
NodePtr number(double v) {
  if (std::signbit(v) && v != 0.0) return make_node(Op::Neg, {make_num(-v)});
  return make_num(v == 0.0 ? 0.0 : v);
}

NodePtr neg(const NodePtr& a) {
  double v = 0.0;
  if (as_number(a, v)) return number(-v);
  if (a->op == Op::Neg) return a->args[0];
  return make_node(Op::Neg, {a});
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
  double x = 0.0, y = 0.0;
  const bool na = as_number(a, x), nb = as_number(b, y);
  if (na && nb) return number(x + y);
  if (na && x == 0.0) return b;
  if (nb && y == 0.0) return a;
  if (b->op == Op::Neg) return make_node(Op::Sub, {a, b->args[0]});
  return make_node(Op::Add, {a, b});
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
  double x = 0.0, y = 0.0;
  const bool na = as_number(a, x), nb = as_number(b, y);
  if (na && nb) return number(x - y);
  if (nb && y == 0.0) return a;
  if (na && x == 0.0) return neg(b);
  if (b->op == Op::Neg) return make_node(Op::Add, {a, b->args[0]});
  return make_node(Op::Sub, {a, b});
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
  double x = 0.0, y = 0.0;
  const bool na = as_number(a, x), nb = as_number(b, y);
  if (na && nb) return number(x * y);
  if ((na && x == 0.0) || (nb && y == 0.0)) return make_num(0.0);
  if (na && x == 1.0) return b;
  if (nb && y == 1.0) return a;
  if (na && x == -1.0) return neg(b);
  if (nb && y == -1.0) return neg(a);
  return make_node(Op::Mul, {a, b});
}

NodePtr div(const NodePtr& a, const NodePtr& b) {
  double x = 0.0, y = 0.0;
  const bool na = as_number(a, x), nb = as_number(b, y);
  if (na && x == 0.0) return make_num(0.0);
  if (nb && y == 1.0) return a;
  if (na && nb && y != 0.0) return number(x / y);
  return make_node(Op::Div, {a, b});
}

NodePtr pow(const NodePtr& a, const NodePtr& b) {
  double x = 0.0, y = 0.0;
  const bool na = as_number(a, x), nb = as_number(b, y);
  if (nb && y == 0.0) return make_num(1.0);
  if (nb && y == 1.0) return a;
  if (na && nb) {
    const double r = std::pow(x, y);
    if (std::isfinite(r)) return number(r);
  }
  return make_node(Op::Pow, {a, b});
}

NodePtr call(Fn fn, const NodePtr& a) { return make_call(fn, {a}); }

bool depends_on(const Node& n, const std::string& var) {
  if (n.op == Op::Var) return n.name == var;
  for (const auto& c : n.args)
    if (depends_on(*c, var)) return true;
  return false;
}

NodePtr differentiate(const NodePtr& n, const std::string& var) {
  if (!depends_on(*n, var)) return make_num(0.0);
  const auto& a = n->args;
  switch (n->op) {
    case Op::Num: return make_num(0.0);
    case Op::Var: return make_num(1.0);
    case Op::Neg: return neg(differentiate(a[0], var));
    case Op::Add: return add(differentiate(a[0], var), differentiate(a[1], var));
    case Op::Sub: return sub(differentiate(a[0], var), differentiate(a[1], var));
    case Op::Mul:
      return add(mul(differentiate(a[0], var), a[1]), mul(a[0], differentiate(a[1], var)));
    case Op::Div: {
      const NodePtr da = differentiate(a[0], var);
      if (!depends_on(*a[1], var)) return div(da, a[1]);
      const NodePtr db = differentiate(a[1], var);
      return div(sub(mul(da, a[1]), mul(a[0], db)), pow(a[1], make_num(2.0)));
    }
    case Op::Pow: {
      const NodePtr& base = a[0];
      const NodePtr& ex = a[1];
      if (!depends_on(*ex, var)) {
        return mul(mul(ex, pow(base, sub(ex, make_num(1.0)))), differentiate(base, var));
      }
      if (!depends_on(*base, var)) {
        return mul(mul(n, call(Fn::Ln, base)), differentiate(ex, var));
      }
      const NodePtr term = add(mul(differentiate(ex, var), call(Fn::Ln, base)),
                               div(mul(ex, differentiate(base, var)), base));
      return mul(n, term);
    }
    case Op::Call: {
      if (n->fn == Fn::Min || n->fn == Fn::Max) {
        const NodePtr dl = differentiate(a[0], var);
        const NodePtr dr = differentiate(a[1], var);
        const NodePtr diff = sub(a[0], a[1]);
        const NodePtr sign = div(diff, call(Fn::Abs, diff));
        const NodePtr s = n->fn == Fn::Min ? neg(sign) : sign;
        return div(add(add(dl, dr), mul(s, sub(dl, dr))), make_num(2.0));
      }
      const NodePtr& u = a[0];
      const NodePtr du = differentiate(u, var);
      NodePtr outer;
      const NodePtr one = make_num(1.0);
      const NodePtr two = make_num(2.0);
      switch (n->fn) {
        case Fn::Sin: outer = call(Fn::Cos, u); break;
        case Fn::Cos: outer = neg(call(Fn::Sin, u)); break;
        case Fn::Tan: outer = add(one, pow(call(Fn::Tan, u), two)); break;
        case Fn::Sinh: outer = call(Fn::Cosh, u); break;
        case Fn::Cosh: outer = call(Fn::Sinh, u); break;
        case Fn::Tanh: outer = sub(one, pow(call(Fn::Tanh, u), two)); break;
        case Fn::Asin: outer = div(one, call(Fn::Sqrt, sub(one, pow(u, two)))); break;
        case Fn::Acos: outer = neg(div(one, call(Fn::Sqrt, sub(one, pow(u, two))))); break;
        case Fn::Atan: outer = div(one, add(one, pow(u, two))); break;
        case Fn::Asinh: outer = div(one, call(Fn::Sqrt, add(pow(u, two), one))); break;
        case Fn::Acosh: outer = div(one, call(Fn::Sqrt, sub(pow(u, two), one))); break;
        case Fn::Atanh: outer = div(one, sub(one, pow(u, two))); break;
        case Fn::Exp: outer = n; break;
        case Fn::Ln: return div(du, u);
        case Fn::Sqrt: return div(du, mul(two, n));
        case Fn::Abs: outer = div(u, n); break;
        default: break;
      }
      return mul(outer, du);
    }
  }
  return make_num(0.0);
}

NodePtr bind_node(const NodePtr& n, const std::map<std::string, double>& values) {
  if (n->op == Op::Var) {
    auto it = values.find(n->name);
    return it == values.end() ? n : number(it->second);
  }
  if (n->args.empty()) return n;
  bool changed = false;
  std::vector<NodePtr> args;
  args.reserve(n->args.size());
  for (const auto& c : n->args) {
    args.push_back(bind_node(c, values));
    changed = changed || args.back() != c;
  }
  if (!changed) return n;
  auto copy = std::make_shared<Node>(*n);
  copy->args = std::move(args);
  return copy;
}

void collect_vars(const Node& n, std::set<std::string>& out) {
  if (n.op == Op::Var) out.insert(n.name);
  for (const auto& c : n.args) collect_vars(*c, out);
}

void check_ids(const Node& n, const std::set<std::string>& allowed) {
  if (n.op == Op::Var && !allowed.count(n.name))
    throw ParseError("unknown identifier '" + n.name + "'", n.pos);
  for (const auto& c : n.args) check_ids(*c, allowed);
}

double apply_fn(Fn fn, double x, double y, std::size_t pos) {
  auto domain = [&](const char* what) { throw EvalError(std::string(what), pos); };
  switch (fn) {
    case Fn::Sin: return std::sin(x);
    case Fn::Cos: return std::cos(x);
    case Fn::Tan: return std::tan(x);
    case Fn::Sinh: return std::sinh(x);
    case Fn::Cosh: return std::cosh(x);
    case Fn::Tanh: return std::tanh(x);
    case Fn::Asin:
      if (x < -1.0 || x > 1.0) domain("asin argument outside [-1, 1]");
      return std::asin(x);
    case Fn::Acos:
      if (x < -1.0 || x > 1.0) domain("acos argument outside [-1, 1]");
      return std::acos(x);
    case Fn::Atan: return std::atan(x);
    case Fn::Asinh: return std::asinh(x);
    case Fn::Acosh:
      if (x < 1.0) domain("acosh argument below 1");
      return std::acosh(x);
    case Fn::Atanh:
      if (x <= -1.0 || x >= 1.0) domain("atanh argument outside (-1, 1)");
      return std::atanh(x);
    case Fn::Exp: return std::exp(x);
    case Fn::Ln:
      if (x <= 0.0) domain("ln of a non-positive number");
      return std::log(x);
    case Fn::Sqrt:
      if (x < 0.0) domain("sqrt of a negative number");
      return std::sqrt(x);
    case Fn::Abs: return std::abs(x);
    case Fn::Min: return std::min(x, y);
    case Fn::Max: return std::max(x, y);
  }
  return 0.0;
}

double checked_pow(double a, double b, std::size_t pos) {
  if (a < 0.0 && b != std::floor(b)) throw EvalError("negative base with non-integer exponent", pos);
  if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power", pos);
  return std::pow(a, b);
}

double checked_div(double a, double b, std::size_t pos) {
  if (b == 0.0) throw EvalError("division by zero", pos);
  return a / b;
}

void emit(const Node& n, const std::map<std::string, int>& slots,
          const std::map<std::string, double>& params, std::vector<Compiled::Instr>& code,
          int depth, int& max_depth);

}  // namespace

// ----------------------------------------------------------------------------

std::string_view fn_name(Fn fn) { return kFnNames[static_cast<std::size_t>(fn)]; }

std::optional<Fn> fn_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFnNames.size(); ++i)
    if (kFnNames[i] == name) return static_cast<Fn>(i);
  return std::nullopt;
}

int fn_arity(Fn fn) { return (fn == Fn::Min || fn == Fn::Max) ? 2 : 1; }

ParseError::ParseError(const std::string& message, std::size_t offset, std::set<std::string> expected)
    : Error([&] {
        std::string m = message + " at offset " + std::to_string(offset);
        if (!expected.empty()) {
          m += " (expected one of:";
          for (const auto& e : expected) m += " " + e;
          m += ")";
        }
        return m;
      }()),
      offset_(offset),
      expected_(std::move(expected)) {}

EvalError::EvalError(const std::string& message, std::size_t offset)
    : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Num:
      if (a.name != b.name) return false;
      return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
    case Op::Var: return a.name == b.name;
    case Op::Call:
      if (a.fn != b.fn) return false;
      break;
    default: break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

Expression::Expression() : root_(make_num(0.0)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse_all()); }

Expression Expression::number(double v) { return Expression(::nullkit::expr::number(v)); }

Expression Expression::variable(std::string name) { return Expression(make_var(std::move(name))); }

std::string Expression::str() const {
  std::ostringstream out;
  print(*root_, out);
  return out.str();
}

bool Expression::operator==(const Expression& other) const {
  return structurally_equal(*root_, *other.root_);
}

std::set<std::string> Expression::variables() const {
  std::set<std::string> out;
  collect_vars(*root_, out);
  return out;
}

void Expression::check_identifiers(const std::set<std::string>& allowed) const {
  check_ids(*root_, allowed);
}

Expression Expression::derivative(const std::string& var) const {
  return Expression(differentiate(root_, var));
}

Expression Expression::bind(const std::map<std::string, double>& values) const {
  return Expression(bind_node(root_, values));
}

double Expression::eval(const std::map<std::string, double>& values) const {
  std::vector<std::string> names;
  std::vector<double> args;
  for (const auto& [k, v] : values) {
    names.push_back(k);
    args.push_back(v);
  }
  return compile(names)(args);
}

namespace {

void emit(const Node& n, const std::map<std::string, int>& slots,
          const std::map<std::string, double>& params, std::vector<Compiled::Instr>& code,
          int depth, int& max_depth) {
  using K = Compiled::Instr::Kind;
  max_depth = std::max(max_depth, depth + 1);
  Compiled::Instr ins{K::Const};
  ins.pos = n.pos;
  switch (n.op) {
    case Op::Num:
      ins.kind = K::Const;
      ins.value = n.value;
      code.push_back(ins);
      return;
    case Op::Var: {
      auto it = slots.find(n.name);
      if (it != slots.end()) {
        ins.kind = K::Var;
        ins.slot = it->second;
      } else {
        auto p = params.find(n.name);
        if (p == params.end()) throw ParseError("unknown identifier '" + n.name + "'", n.pos);
        ins.kind = K::Const;
        ins.value = p->second;
      }
      code.push_back(ins);
      return;
    }
    default: break;
  }
  for (std::size_t i = 0; i < n.args.size(); ++i)
    emit(*n.args[i], slots, params, code, depth + static_cast<int>(i), max_depth);
  switch (n.op) {
    case Op::Neg: ins.kind = K::Neg; break;
    case Op::Add: ins.kind = K::Add; break;
    case Op::Sub: ins.kind = K::Sub; break;
    case Op::Mul: ins.kind = K::Mul; break;
    case Op::Div: ins.kind = K::Div; break;
    case Op::Pow: ins.kind = K::Pow; break;
    case Op::Call:
      ins.kind = K::Call;
      ins.fn = n.fn;
      break;
    default: break;
  }
  code.push_back(ins);
}

}  // namespace

Compiled Expression::compile(const std::vector<std::string>& vars,
                             const std::map<std::string, double>& params) const {
  std::map<std::string, int> slots;
  for (std::size_t i = 0; i < vars.size(); ++i) slots[vars[i]] = static_cast<int>(i);
  Compiled c;
  c.arity_ = static_cast<int>(vars.size());
  emit(*root_, slots, params, c.code_, 0, c.max_stack_);
  return c;
}

double Compiled::operator()(std::span<const double> args) const {
  using K = Instr::Kind;
  std::array<double, 64> small{};
  std::vector<double> big;
  double* st = small.data();
  if (max_stack_ > static_cast<int>(small.size())) {
    big.resize(static_cast<std::size_t>(max_stack_));
    st = big.data();
  }
  int sp = 0;
  for (const Instr& in : code_) {
    switch (in.kind) {
      case K::Const: st[sp++] = in.value; break;
      case K::Var: st[sp++] = args[static_cast<std::size_t>(in.slot)]; break;
      case K::Neg: st[sp - 1] = -st[sp - 1]; break;
      case K::Add: st[sp - 2] += st[sp - 1]; --sp; break;
      case K::Sub: st[sp - 2] -= st[sp - 1]; --sp; break;
      case K::Mul: st[sp - 2] *= st[sp - 1]; --sp; break;
      case K::Div: st[sp - 2] = checked_div(st[sp - 2], st[sp - 1], in.pos); --sp; break;
      case K::Pow: st[sp - 2] = checked_pow(st[sp - 2], st[sp - 1], in.pos); --sp; break;
      case K::Call:
        if (fn_arity(in.fn) == 2) {
          st[sp - 2] = apply_fn(in.fn, st[sp - 2], st[sp - 1], in.pos);
          --sp;
        } else {
          st[sp - 1] = apply_fn(in.fn, st[sp - 1], 0.0, in.pos);
        }
        break;
    }
  }
  const double r = st[0];
  if (!std::isfinite(r)) throw EvalError("non-finite result", code_.empty() ? 0 : code_.back().pos);
  return r;
}

}  // namespace nullkit::expr
