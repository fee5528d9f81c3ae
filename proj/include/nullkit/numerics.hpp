#pragma once

#include "nullkit/core.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace nullkit::num {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  int evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15). Either bound may be infinite.
QuadResult integrate(const std::function<double(double)>& fn, double a, double b,
                     const QuadOptions& opts = {});

// ---------------------------------------------------------------------------
// Scalar roots
// ---------------------------------------------------------------------------

struct RootOptions {
  double x_tol = 1e-15;
  int max_iter = 200;
};

/// Brent's method on a sign-changing bracket [a, b].
double brent(const std::function<double(double)>& fn, double a, double b,
             const RootOptions& opts = {});

/// Plain bisection to an absolute parameter tolerance.
double bisect(const std::function<double(double)>& fn, double a, double b, double x_tol,
              int max_iter = 400);

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with continuous extension
// ---------------------------------------------------------------------------

using OdeRhs = std::function<void(double s, const Vec& y, Vec& dy)>;
/// Returns false when the state has left the admissible domain.
using OdeGuard = std::function<bool(double s, const Vec& y)>;

struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0: automatic
  double max_step = std::numeric_limits<double>::infinity();
  int max_steps = 500000;
};

class DenseSolution {
 public:
  struct Step {
    double s0, h;
    Vec r1, r2, r3, r4, r5;
  };

  double begin() const { return begin_; }
  double end() const { return end_; }
  bool stopped() const { return stopped_; }
  /// Parameter at which the guard first failed (valid when stopped()).
  double stop_parameter() const { return stop_param_; }

  Vec operator()(double s) const;
  const std::vector<Step>& steps() const { return steps_; }

 private:
  friend DenseSolution integrate_ode(const OdeRhs&, double, const Vec&, double, const OdeOptions&,
                                     const OdeGuard&, std::span<const double>);
  std::vector<Step> steps_;
  double begin_ = 0.0;
  double end_ = 0.0;
  bool stopped_ = false;
  double stop_param_ = 0.0;
};

/// Integrates from s0 to s1 (either direction). Steps land exactly on every
/// entry of `breakpoints` that lies inside the span. If `guard` fails, the
/// solution stops at the last admissible point and records the exit parameter.
DenseSolution integrate_ode(const OdeRhs& rhs, double s0, const Vec& y0, double s1,
                            const OdeOptions& opts = {}, const OdeGuard& guard = {},
                            std::span<const double> breakpoints = {});

/// Parameters where g(s, y(s)) changes sign, refined by bisection on the
/// dense output to `s_tol`.
std::vector<double> sign_changes(const DenseSolution& sol,
                                 const std::function<double(double, const Vec&)>& g,
                                 int probes_per_step = 4, double s_tol = 1e-10);

// ---------------------------------------------------------------------------
// Extrapolation
// ---------------------------------------------------------------------------

/// Richardson table over samples at spacings h0, h0*ratio, h0*ratio^2, ...
/// assuming an error expansion in integer powers of h starting at `order`.
/// Returns the most refined diagonal entry.
double richardson(std::span<const double> values, double ratio, int order = 1);

// ---------------------------------------------------------------------------
// Monotone cubic Hermite on a strictly increasing grid
// ---------------------------------------------------------------------------

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x);
double hermite_derivative(double x0, double x1, double y0, double y1, double d0, double d1,
                          double x);

}  // namespace nullkit::num
