#pragma once

#include "nullkit/core.hpp"
#include "nullkit/expr.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace nullkit {

/// Central finite-difference steps, relative to max(1, |x|).
struct FdOptions {
  double first = 1e-5;
  double second = 1e-4;
};

/// Real function of one variable with derivatives through third order.
class Function1D {
 public:
  using Fn = std::function<double(double)>;

  Function1D();
  /// Derivatives by symbolic differentiation; `params` are substituted first.
  static Function1D from_expression(const expr::Expression& e, const std::string& var,
                                    const std::map<std::string, double>& params = {});
  static Function1D parse(const std::string& text, const std::string& var,
                          const std::map<std::string, double>& params = {});
  /// Derivatives by central differences.
  static Function1D from_callable(Fn f);
  /// Caller-supplied derivatives; missing ones fall back to differences of the last given.
  static Function1D from_derivatives(Fn f, Fn d1, Fn d2 = {}, Fn d3 = {});
  static Function1D constant(double c);

  double operator()(double t) const { return d_[0](t); }
  double d1(double t) const { return d_[1](t); }
  double d2(double t) const { return d_[2](t); }
  double d3(double t) const { return d_[3](t); }
  double derivative(int order, double t) const;

  /// Bound expression (parameters substituted) when built from one.
  const std::optional<expr::Expression>& expression() const { return expr_; }
  const std::string& variable() const { return var_; }

 private:
  std::array<Fn, 4> d_;
  std::optional<expr::Expression> expr_;
  std::string var_;
};

/// Scalar function on a chart with coordinate partials.
class ScalarField {
 public:
  using Fn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;
  /// value, first and second derivative of an outer function at u.
  using Outer = std::function<std::array<double, 3>(double u)>;

  ScalarField() = default;
  static ScalarField from_expression(const expr::Expression& e, const std::vector<std::string>& vars,
                                     const std::map<std::string, double>& params = {});
  static ScalarField parse(const std::string& text, const std::vector<std::string>& vars,
                           const std::map<std::string, double>& params = {});
  static ScalarField from_callable(int dim, Fn f, FdOptions fd = {});
  static ScalarField from_parts(int dim, Fn f, GradFn grad, HessFn hess);
  static ScalarField constant(int dim, double c);
  static ScalarField coordinate(int dim, int index);
  /// outer(inner(x)) by the chain rule.
  static ScalarField compose(Outer outer, const ScalarField& inner);

  int dim() const { return dim_; }
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  double operator()(const Vec& x) const { return value(x); }
  bool analytic() const { return analytic_; }

 private:
  int dim_ = 0;
  bool analytic_ = false;
  Fn f_;
  GradFn grad_;
  HessFn hess_;
};

/// Central-difference helpers shared by the kernels.
Vec fd_gradient(const ScalarField::Fn& f, const Vec& x, double rel);
Mat fd_hessian(const ScalarField::Fn& f, const Vec& x, double rel);

/// Fourth-order central difference of a vector-valued map along coordinate k.
template <class F>
auto fd5(const F& fn, const Vec& x, int k, double rel = 1e-3) {
  const double h = fd_step(x[k], rel);
  Vec xp2 = x, xp1 = x, xm1 = x, xm2 = x;
  xp2[k] += 2 * h;
  xp1[k] += h;
  xm1[k] -= h;
  xm2[k] -= 2 * h;
  using R = std::decay_t<decltype(fn(x))>;
  R out = ((fn(xm2) - fn(xp2)) + 8.0 * (fn(xp1) - fn(xm1))) / (12.0 * h);
  return out;
}

/// Fourth-order central difference of a map along a parameter.
template <class F>
auto fd5_scalar(const F& fn, double s, double h) {
  using R = std::decay_t<decltype(fn(s))>;
  R out = ((fn(s - 2 * h) - fn(s + 2 * h)) + 8.0 * (fn(s + h) - fn(s - h))) / (12.0 * h);
  return out;
}

}  // namespace nullkit
