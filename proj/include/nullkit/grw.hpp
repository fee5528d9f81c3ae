#pragma once

// Generalized Robertson-Walker spaces I x_f F with g = -dt^2 + f(t)^2 g_F.
// Spacetime chart coordinates are (t, x^1, ..., x^m).

#include "nullkit/fibre.hpp"
#include "nullkit/numerics.hpp"
#include "nullkit/scalar.hpp"

#include <memory>
#include <string>
#include <vector>

namespace nullkit {

/// A(t; t_ref) = int_{t_ref}^t f,   C(t; t_ref) = int_{t_ref}^t 1/f.
enum class Quadrature { A, C };

enum class Orientation { Future, Past };

inline double orientation_sign(Orientation o) { return o == Orientation::Future ? 1.0 : -1.0; }

class WarpingProfile {
 public:
  WarpingProfile(Function1D f, double t_min, double t_max);

  /// Parses an expression in `t`. Exact antiderivatives are used when the
  /// expression is a constant, cosh(t), cos(t), exp(t) or t^p.
  static WarpingProfile parse(const std::string& text, double t_min, double t_max,
                              const std::map<std::string, double>& params = {});
  static WarpingProfile constant(double c, double t_min, double t_max);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool contains(double t) const { return t > lo_ && t < hi_; }
  void require(double t) const;

  double f(double t) const;
  double d1(double t) const { return f_.d1(t); }
  double d2(double t) const { return f_.d2(t); }
  double d3(double t) const { return f_.d3(t); }
  const Function1D& function() const { return f_; }
  /// Catalog entry used for exact antiderivatives, empty if generic.
  const std::string& catalog() const { return catalog_; }

  /// A or C from t_ref to t. Either argument may be an endpoint of I, in
  /// which case the (possibly infinite) limit is returned.
  double quad(Quadrature which, double t, double t_ref) const;
  /// Solves quad(which, t, t_ref) = value for t. Throws RangeError carrying
  /// the supremum (or infimum) of the reachable values if out of range.
  double quad_invert(Quadrature which, double t_ref, double value) const;
  /// int_I 1/f (may be infinite).
  double total_inverse() const { return quad(Quadrature::C, hi_, lo_); }

 private:
  double integrand(Quadrature which, double t) const;
  double primitive(Quadrature which, double t) const;  // from origin_
  double primitive_generic(Quadrature which, double t) const;
  void build_cache();

  Function1D f_;
  double lo_, hi_;
  std::string catalog_;
  double param_ = 0.0;  // constant value or exponent for catalog entries
  double origin_ = 0.0;
  double spacing_ = 0.125;
  std::vector<double> nodes_;
  std::vector<double> cum_A_, cum_C_;
};

/// Lorentzian metric on a coordinate chart. Connection and curvature default
/// to finite differences of the metric.
class LorentzChart {
 public:
  virtual ~LorentzChart() = default;
  virtual int dim() const = 0;
  virtual bool contains(const Vec& p) const = 0;
  void require(const Vec& p) const;
  virtual Mat metric(const Vec& p) const = 0;
  virtual Christoffel christoffel(const Vec& p) const;
  virtual Riemann riemann(const Vec& p) const;
  Mat ricci(const Vec& p) const { return riemann(p).ricci(); }
};

class GrwSpace : public LorentzChart {
 public:
  GrwSpace(WarpingProfile warping, FibrePtr fibre);

  int dim() const override { return 1 + F_->dim(); }
  bool contains(const Vec& p) const override;
  Mat metric(const Vec& p) const override;
  Christoffel christoffel(const Vec& p) const override;

  const WarpingProfile& warping() const { return w_; }
  const FibreModel& fibre() const { return *F_; }
  const FibrePtr& fibre_ptr() const { return F_; }

  static Vec point(double t, const Vec& x);
  /// zeta = f d_t.
  Vec zeta(const Vec& p) const;

 private:
  WarpingProfile w_;
  FibrePtr F_;
};

/// -U_t V_t + f(t)^2 g_F(U_x, V_x).
double metric_eval(const GrwSpace& M, const Vec& p, const Vec& U, const Vec& V);

/// Null geodesic from (t_*, x_*) with initial fibre direction u (|u|_F = 1),
/// affinely parametrized so that g(gamma', zeta) = -1 (future) or +1 (past).
class NullGeodesic {
 public:
  NullGeodesic(const GrwSpace& M, double t_star, Vec x_star, Vec u, Orientation o);

  double alpha(double s) const;
  /// Fibre arclength b(s) = |C(alpha(s); t_*)|.
  double fibre_parameter(double s) const;
  Vec point(double s) const;
  Vec velocity(double s) const;
  /// Largest affine parameter reachable inside I (may be infinite).
  double affine_limit() const;

  const Vec& x_star() const { return x_star_; }
  const Vec& direction() const { return u_; }
  double t_star() const { return t_star_; }
  Orientation orientation() const { return o_; }

 private:
  const GrwSpace* M_;
  double t_star_;
  Vec x_star_, u_;
  Orientation o_;
};

NullGeodesic null_geodesic_quadrature(const GrwSpace& M, double t_star, const Vec& x_star, const Vec& u,
                                      Orientation o);

/// Geodesic equation integrated in the chart; guard is chart membership.
GeodesicRecord chart_geodesic(const LorentzChart& M, const Vec& p, const Vec& V,
                              const std::vector<double>& params, const num::OdeOptions& opts = {});

/// Null geodesic by direct integration; V must be null within 1e-10 (relative).
GeodesicRecord null_geodesic_numeric(const GrwSpace& M, const Vec& p, const Vec& V,
                                     const std::vector<double>& params, const num::OdeOptions& opts = {});

/// Null sectional curvature of span(v/f, -d_t + w/f) at p = (t, x); v, w
/// g_F-orthonormal. Formula (K^F(v,w) + f'^2 - f f'') / f^2.
double null_sectional_curvature(const GrwSpace& M, const Vec& p, const Vec& v, const Vec& w);
/// Same quantity from the spacetime curvature tensor, g(R(V,U)U,V)/g(V,V).
double null_sectional_curvature_tensor(const GrwSpace& M, const Vec& p, const Vec& v, const Vec& w);

/// Max over the grid of |(L_zeta g - 2 f' g)_{ab}| by central differences.
double conformal_check(const GrwSpace& M, const std::vector<Vec>& grid);

}  // namespace nullkit
