#include "nullkit/scalar.hpp"

#include <cmath>
#include <memory>

namespace nullkit {

namespace {

double check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " is not finite on the stencil");
  return v;
}

Function1D::Fn fd_derivative(Function1D::Fn f, double rel) {
  return [f = std::move(f), rel](double t) {
    const double h = fd_step(t, rel);
    return check_finite((f(t + h) - f(t - h)) / (2 * h), "derivative");
  };
}

}  // namespace

Function1D::Function1D() {
  for (auto& d : d_) d = [](double) { return 0.0; };
  var_ = "t";
}

Function1D Function1D::from_expression(const expr::Expression& e, const std::string& var,
                                       const std::map<std::string, double>& params) {
  Function1D out;
  expr::Expression cur = e.bind(params);
  out.expr_ = cur;
  out.var_ = var;
  for (int k = 0; k < 4; ++k) {
    auto code = std::make_shared<expr::Compiled>(cur.compile({var}));
    out.d_[static_cast<std::size_t>(k)] = [code](double t) { return (*code)(t); };
    if (k < 3) cur = cur.derivative(var);
  }
  return out;
}

Function1D Function1D::parse(const std::string& text, const std::string& var,
                             const std::map<std::string, double>& params) {
  auto e = expr::Expression::parse(text);
  std::set<std::string> allowed{var};
  for (const auto& [k, v] : params) allowed.insert(k);
  e.check_identifiers(allowed);
  return from_expression(e, var, params);
}

Function1D Function1D::from_callable(Fn f) {
  Function1D out;
  out.expr_.reset();
  out.var_ = "t";
  out.d_[0] = f;
  out.d_[1] = fd_derivative(f, 1e-5);
  out.d_[2] = [f](double t) {
    const double h = fd_step(t, 1e-4);
    return check_finite((f(t + h) - 2 * f(t) + f(t - h)) / (h * h), "second derivative");
  };
  out.d_[3] = [f](double t) {
    const double h = fd_step(t, 1e-3);
    return check_finite((f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) / (2 * h * h * h),
                        "third derivative");
  };
  return out;
}

Function1D Function1D::from_derivatives(Fn f, Fn d1, Fn d2, Fn d3) {
  Function1D out;
  out.expr_.reset();
  out.var_ = "t";
  out.d_[0] = std::move(f);
  out.d_[1] = std::move(d1);
  out.d_[2] = d2 ? std::move(d2) : fd_derivative(out.d_[1], 1e-5);
  out.d_[3] = d3 ? std::move(d3) : fd_derivative(out.d_[2], 1e-4);
  return out;
}

Function1D Function1D::constant(double c) {
  Function1D out;
  out.expr_ = expr::Expression::number(c);
  out.var_ = "t";
  out.d_[0] = [c](double) { return c; };
  for (int k = 1; k < 4; ++k) out.d_[static_cast<std::size_t>(k)] = [](double) { return 0.0; };
  return out;
}

double Function1D::derivative(int order, double t) const {
  if (order < 0 || order > 3) throw Error("derivative order must be 0..3");
  return d_[static_cast<std::size_t>(order)](t);
}

// ---------------------------------------------------------------------------

Vec fd_gradient(const ScalarField::Fn& f, const Vec& x, double rel) {
  const int n = static_cast<int>(x.size());
  Vec g(n);
  Vec y = x;
  for (int i = 0; i < n; ++i) {
    const double h = fd_step(x[i], rel);
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = check_finite((fp - fm) / (2 * h), "gradient");
  }
  return g;
}

Mat fd_hessian(const ScalarField::Fn& f, const Vec& x, double rel) {
  const int n = static_cast<int>(x.size());
  Mat H(n, n);
  const double f0 = f(x);
  Vec y = x;
  for (int i = 0; i < n; ++i) {
    const double hi = fd_step(x[i], rel);
    y[i] = x[i] + hi;
    const double fp = f(y);
    y[i] = x[i] - hi;
    const double fm = f(y);
    y[i] = x[i];
    H(i, i) = check_finite((fp - 2 * f0 + fm) / (hi * hi), "hessian");
    for (int j = 0; j < i; ++j) {
      const double hj = fd_step(x[j], rel);
      double acc = 0.0;
      for (int si = -1; si <= 1; si += 2)
        for (int sj = -1; sj <= 1; sj += 2) {
          y[i] = x[i] + si * hi;
          y[j] = x[j] + sj * hj;
          acc += si * sj * f(y);
        }
      y[i] = x[i];
      y[j] = x[j];
      H(i, j) = H(j, i) = check_finite(acc / (4 * hi * hj), "hessian");
    }
  }
  return H;
}

ScalarField ScalarField::from_expression(const expr::Expression& e, const std::vector<std::string>& vars,
                                         const std::map<std::string, double>& params) {
  const int n = static_cast<int>(vars.size());
  expr::Expression bound = e.bind(params);
  auto value = std::make_shared<expr::Compiled>(bound.compile(vars));
  auto grad = std::make_shared<std::vector<expr::Compiled>>();
  auto hess = std::make_shared<std::vector<expr::Compiled>>();
  for (int i = 0; i < n; ++i) {
    expr::Expression di = bound.derivative(vars[static_cast<std::size_t>(i)]);
    grad->push_back(di.compile(vars));
    for (int j = 0; j <= i; ++j) hess->push_back(di.derivative(vars[static_cast<std::size_t>(j)]).compile(vars));
  }
  ScalarField out;
  out.dim_ = n;
  out.analytic_ = true;
  out.f_ = [value](const Vec& x) { return (*value)(std::span<const double>(x.data(), x.size())); };
  out.grad_ = [grad, n](const Vec& x) {
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = (*grad)[static_cast<std::size_t>(i)](std::span<const double>(x.data(), x.size()));
    return g;
  };
  out.hess_ = [hess, n](const Vec& x) {
    Mat H(n, n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) H(i, j) = H(j, i) = (*hess)[k++](std::span<const double>(x.data(), x.size()));
    return H;
  };
  return out;
}

ScalarField ScalarField::parse(const std::string& text, const std::vector<std::string>& vars,
                               const std::map<std::string, double>& params) {
  auto e = expr::Expression::parse(text);
  std::set<std::string> allowed(vars.begin(), vars.end());
  for (const auto& [k, v] : params) allowed.insert(k);
  e.check_identifiers(allowed);
  return from_expression(e, vars, params);
}

ScalarField ScalarField::from_callable(int dim, Fn f, FdOptions fd) {
  ScalarField out;
  out.dim_ = dim;
  out.analytic_ = false;
  out.f_ = f;
  out.grad_ = [f, fd](const Vec& x) { return fd_gradient(f, x, fd.first); };
  out.hess_ = [f, fd](const Vec& x) { return fd_hessian(f, x, fd.second); };
  return out;
}

ScalarField ScalarField::from_parts(int dim, Fn f, GradFn grad, HessFn hess) {
  ScalarField out;
  out.dim_ = dim;
  out.analytic_ = true;
  out.f_ = std::move(f);
  out.grad_ = std::move(grad);
  out.hess_ = std::move(hess);
  return out;
}

ScalarField ScalarField::constant(int dim, double c) {
  return from_parts(
      dim, [c](const Vec&) { return c; }, [dim](const Vec&) { return Vec(Vec::Zero(dim)); },
      [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); });
}

ScalarField ScalarField::coordinate(int dim, int index) {
  return from_parts(
      dim, [index](const Vec& x) { return x[index]; },
      [dim, index](const Vec&) {
        Vec g = Vec::Zero(dim);
        g[index] = 1.0;
        return g;
      },
      [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); });
}

ScalarField ScalarField::compose(Outer outer, const ScalarField& inner) {
  ScalarField out;
  out.dim_ = inner.dim_;
  out.analytic_ = inner.analytic_;
  out.f_ = [outer, inner](const Vec& x) { return outer(inner.value(x))[0]; };
  out.grad_ = [outer, inner](const Vec& x) {
    const auto o = outer(inner.value(x));
    return Vec(o[1] * inner.gradient(x));
  };
  out.hess_ = [outer, inner](const Vec& x) {
    const auto o = outer(inner.value(x));
    const Vec g = inner.gradient(x);
    return Mat(o[1] * inner.hessian(x) + o[2] * g * g.transpose());
  };
  return out;
}

double ScalarField::value(const Vec& x) const {
  if (!f_) throw Error("empty scalar field");
  return check_finite(f_(x), "scalar field");
}

Vec ScalarField::gradient(const Vec& x) const { return grad_(x); }

Mat ScalarField::hessian(const Vec& x) const { return hess_(x); }

}  // namespace nullkit
