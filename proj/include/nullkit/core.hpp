#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors. Everything the kernel refuses to do is reported by throwing one of
// these; the CLI maps them onto exit code 1 (usage/config) or 2 (assertion).
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point (or stencil) left the declared chart domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve (shooting, root bracket, Newton) did not converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A curve or quadrature inversion left its admissible range. The parameter
/// at which that happened is carried along.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double exit_parameter)
      : Error(what), exit_parameter_(exit_parameter) {}
  double exit_parameter() const { return exit_parameter_; }

 private:
  double exit_parameter_;
};

/// Degenerate geometric input: vanishing gradient, dependent plane vectors,
/// singular metric.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Connection and curvature storage, indexed in chart coordinates.
// ---------------------------------------------------------------------------

/// Gamma^k_{ij}; symmetric in (i, j).
class Christoffel {
 public:
  Christoffel() = default;
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int dim() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[idx(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[idx(k, i, j)]; }

  /// Gamma(u, v)^k = Gamma^k_{ij} u^i v^j.
  Vec contract(const Vec& u, const Vec& v) const;

  Christoffel& operator+=(const Christoffel& o);
  Christoffel& operator*=(double a);

 private:
  std::size_t idx(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n_ + i) * n_ + j);
  }
  int n_ = 0;
  std::vector<double> data_;
};

/// R^a_{bcd} with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
/// R(d_c, d_d) d_b = R^a_{bcd} d_a.
class Riemann {
 public:
  Riemann() = default;
  explicit Riemann(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {}

  int dim() const { return n_; }
  double& operator()(int a, int b, int c, int d) { return data_[idx(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return data_[idx(a, b, c, d)]; }

  /// R(X, Y) Z.
  Vec apply(const Vec& x, const Vec& y, const Vec& z) const;
  /// Ric_{bd} = R^a_{bad}.
  Mat ricci() const;

 private:
  std::size_t idx(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + d);
  }
  int n_ = 0;
  std::vector<double> data_;
};

/// Metric value and its first coordinate derivatives: deriv[k] = d_k g.
struct MetricJet {
  Mat g;
  std::vector<Mat> deriv;
};

/// Levi-Civita symbols from a metric jet.
Christoffel christoffel_from_jet(const MetricJet& jet);

/// R^a_{bcd} = k (delta^a_c g_bd - delta^a_d g_bc).
Riemann constant_curvature_riemann(double k, const Mat& g);

/// Curvature from a Christoffel callable; derivatives by 5-point central
/// differences with relative step 1e-3.
Riemann riemann_from_christoffel(const std::function<Christoffel(const Vec&)>& gamma, const Vec& x);

/// Central finite-difference step for a coordinate value (relative step with
/// an absolute floor of `rel`).
inline double fd_step(double x, double rel) { return rel * std::max(1.0, std::abs(x)); }

/// Axis-aligned coordinate box of a chart.
struct ChartBox {
  Vec lo;
  Vec hi;

  bool contains(const Vec& x) const;
  int dim() const { return static_cast<int>(lo.size()); }
};

}  // namespace nullkit
