#pragma once

// Riemannian fibres exposed through a single chart each. Points are
// coordinate vectors; tangent vectors are component vectors in the chart
// basis at the point they are attached to.

#include "nullkit/core.hpp"
#include "nullkit/numerics.hpp"
#include "nullkit/scalar.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nullkit {

class FibreModel;
using FibrePtr = std::shared_ptr<const FibreModel>;

struct GeodesicState {
  Vec x;
  Vec v;
};

class FibreModel {
 public:
  virtual ~FibreModel() = default;

  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  /// Default coordinate names for expressions over this chart.
  virtual std::vector<std::string> coordinate_names() const;
  const ChartBox& box() const { return box_; }
  virtual bool contains(const Vec& x) const { return box_.contains(x); }
  /// Throws DomainError when x is outside the chart box.
  void require(const Vec& x) const;

  virtual Mat metric(const Vec& x) const = 0;
  /// Metric and first partials. Default: central differences of metric().
  virtual MetricJet jet(const Vec& x) const;
  virtual Christoffel christoffel(const Vec& x) const;
  /// Default: fourth-order differences of christoffel().
  virtual Riemann riemann(const Vec& x) const;

  /// Sectional curvature when it is the same for every plane and point.
  virtual std::optional<double> constant_curvature() const { return std::nullopt; }

  /// Closed-form geodesics, exponential and logarithm maps.
  virtual bool closed_form() const { return false; }
  virtual GeodesicState geodesic_closed(const Vec& x, const Vec& v, double s) const;
  virtual Vec log_closed(const Vec& x, const Vec& y) const;
  virtual double distance_closed(const Vec& x, const Vec& y) const;

  /// Conservative radius below which exp_x is a diffeomorphism onto its image.
  virtual double injectivity_bound(const Vec& x) const;

 protected:
  ChartBox box_;
};

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------

class EuclideanFibre : public FibreModel {
 public:
  explicit EuclideanFibre(int dim, double half_width = 1e6);
  int dim() const override { return n_; }
  std::string kind() const override { return "euclidean"; }
  Mat metric(const Vec& x) const override;
  MetricJet jet(const Vec& x) const override;
  Riemann riemann(const Vec& x) const override;
  std::optional<double> constant_curvature() const override { return 0.0; }
  bool closed_form() const override { return true; }
  GeodesicState geodesic_closed(const Vec& x, const Vec& v, double s) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  double injectivity_bound(const Vec&) const override;

 private:
  int n_;
};

/// Round sphere S^m of radius R in nested polar angles (a_1, ..., a_m) about a
/// pole. Ambient point X = R Q (cos a_1, sin a_1 cos a_2, ..., P sin a_m) with
/// Q a rotation taking e_0 to the pole. a_1..a_{m-1} in (0, pi), a_m in (-pi, pi).
class SphereFibre : public FibreModel {
 public:
  SphereFibre(int dim, double radius = 1.0, double cut_collar = 1e-3,
              const Mat& rotation = Mat());
  int dim() const override { return m_; }
  std::string kind() const override { return "sphere"; }
  std::vector<std::string> coordinate_names() const override;
  double radius() const { return R_; }
  Mat metric(const Vec& x) const override;
  MetricJet jet(const Vec& x) const override;
  Riemann riemann(const Vec& x) const override;
  std::optional<double> constant_curvature() const override { return 1.0 / (R_ * R_); }
  bool closed_form() const override { return true; }
  GeodesicState geodesic_closed(const Vec& x, const Vec& v, double s) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  double injectivity_bound(const Vec& x) const override;

  Vec embed(const Vec& a) const;
  Mat embed_jacobian(const Vec& a) const;
  /// Chart coordinates of an ambient point (must lie on the sphere).
  Vec chart(const Vec& X) const;
  /// Chart components of an ambient vector tangent at embed(a).
  Vec chart_vector(const Vec& a, const Vec& V) const;

 private:
  int m_;
  double R_;
  Mat Q_;
};

/// Hyperbolic space of curvature k < 0 in the Poincare ball of unit coordinate
/// radius; metric 4 l^2 / (1 - |x|^2)^2 with l = 1/sqrt(-k).
class HyperbolicFibre : public FibreModel {
 public:
  HyperbolicFibre(int dim, double curvature = -1.0, double ball_margin = 1e-3);
  int dim() const override { return m_; }
  std::string kind() const override { return "hyperbolic"; }
  bool contains(const Vec& x) const override;
  Mat metric(const Vec& x) const override;
  MetricJet jet(const Vec& x) const override;
  Riemann riemann(const Vec& x) const override;
  std::optional<double> constant_curvature() const override { return k_; }
  bool closed_form() const override { return true; }
  GeodesicState geodesic_closed(const Vec& x, const Vec& v, double s) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  double injectivity_bound(const Vec& x) const override;

  Vec embed(const Vec& x) const;  // hyperboloid, <X,X> = -l^2
  Mat embed_jacobian(const Vec& x) const;
  Vec chart(const Vec& X) const;
  Vec chart_vector(const Vec& x, const Vec& V) const;

 private:
  int m_;
  double k_;
  double l_;
  double margin_;
};

/// Riemannian product; coordinates are the concatenation of the factors'.
class ProductFibre : public FibreModel {
 public:
  explicit ProductFibre(std::vector<FibrePtr> factors);
  int dim() const override { return n_; }
  std::string kind() const override { return "product"; }
  bool contains(const Vec& x) const override;
  Mat metric(const Vec& x) const override;
  MetricJet jet(const Vec& x) const override;
  Christoffel christoffel(const Vec& x) const override;
  Riemann riemann(const Vec& x) const override;
  bool closed_form() const override;
  GeodesicState geodesic_closed(const Vec& x, const Vec& v, double s) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  double injectivity_bound(const Vec& x) const override;
  const std::vector<FibrePtr>& factors() const { return factors_; }

 private:
  std::vector<FibrePtr> factors_;
  std::vector<int> offsets_;
  int n_ = 0;
};

/// Twisted product (a, b) x S with metric ds^2 + mu(s, z)^2 g_S. Coordinates
/// (s, z_1, ..., z_k); mu is a scalar field over all of them.
class TwistedFibre : public FibreModel {
 public:
  TwistedFibre(double a, double b, FibrePtr leaf, ScalarField mu, double margin = 1e-9);
  int dim() const override { return 1 + leaf_->dim(); }
  std::string kind() const override { return "twisted"; }
  bool contains(const Vec& x) const override;
  std::vector<std::string> coordinate_names() const override;
  Mat metric(const Vec& x) const override;
  MetricJet jet(const Vec& x) const override;
  double injectivity_bound(const Vec& x) const override;
  const FibrePtr& leaf() const { return leaf_; }
  const ScalarField& mu() const { return mu_; }
  double base_lo() const { return a_; }
  double base_hi() const { return b_; }

 private:
  double a_, b_;
  FibrePtr leaf_;
  ScalarField mu_;
};

/// Metric given by component expressions over named coordinates.
class ExpressionMetricFibre : public FibreModel {
 public:
  ExpressionMetricFibre(std::vector<std::string> coords, std::vector<std::vector<std::string>> components,
                        const ChartBox& box, const std::map<std::string, double>& params = {},
                        double injectivity = 0.5);
  int dim() const override { return static_cast<int>(coords_.size()); }
  std::string kind() const override { return "expression-metric"; }
  std::vector<std::string> coordinate_names() const override { return coords_; }
  Mat metric(const Vec& x) const override;
  double injectivity_bound(const Vec&) const override { return inj_; }

 private:
  std::vector<std::string> coords_;
  std::vector<ScalarField> g_;
  double inj_;
};

/// c(x) g_base for a positive scalar c.
class ConformalFibre : public FibreModel {
 public:
  ConformalFibre(FibrePtr base, ScalarField factor, double injectivity = 0.5);
  int dim() const override { return base_->dim(); }
  std::string kind() const override { return "conformal"; }
  bool contains(const Vec& x) const override { return base_->contains(x); }
  std::vector<std::string> coordinate_names() const override { return base_->coordinate_names(); }
  Mat metric(const Vec& x) const override;
  MetricJet jet(const Vec& x) const override;
  double injectivity_bound(const Vec&) const override { return inj_; }

 private:
  FibrePtr base_;
  ScalarField c_;
  double inj_;
};

/// Metric supplied by a callable; used for induced leaf metrics.
class CallableMetricFibre : public FibreModel {
 public:
  CallableMetricFibre(int dim, std::function<Mat(const Vec&)> metric, const ChartBox& box,
                      double injectivity = 0.1);
  int dim() const override { return n_; }
  std::string kind() const override { return "callable-metric"; }
  Mat metric(const Vec& x) const override { return g_(x); }
  double injectivity_bound(const Vec&) const override { return inj_; }

 private:
  int n_;
  std::function<Mat(const Vec&)> g_;
  double inj_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

double metric(const FibreModel& F, const Vec& x, const Vec& u, const Vec& v);
double norm(const FibreModel& F, const Vec& x, const Vec& u);

struct GeodesicOptions {
  num::OdeOptions ode;
};

/// Geodesic sampled at the requested parameters (closed form when available).
struct GeodesicRecord {
  std::vector<double> s;
  std::vector<Vec> x;
  std::vector<Vec> v;
};

GeodesicRecord geodesic(const FibreModel& F, const Vec& x, const Vec& v, const std::vector<double>& params,
                        const GeodesicOptions& opts = {});
/// State at a single parameter.
GeodesicState geodesic_at(const FibreModel& F, const Vec& x, const Vec& v, double s,
                          const GeodesicOptions& opts = {});
/// Dense numerical geodesic over [0, s_max]; stops at the chart boundary.
num::DenseSolution geodesic_dense(const FibreModel& F, const Vec& x, const Vec& v, double s_max,
                                  const GeodesicOptions& opts = {});

Vec exp_map(const FibreModel& F, const Vec& x, const Vec& v);

struct ShootingOptions {
  int max_iter = 50;
  double residual = 1e-9;
};
/// Initial velocity of the geodesic from x reaching y at parameter 1.
Vec log_map(const FibreModel& F, const Vec& x, const Vec& y, const ShootingOptions& opts = {});
double distance(const FibreModel& F, const Vec& x, const Vec& y);

/// d_F(x_*, x) times the outward unit radial velocity at x.
Vec position_field(const FibreModel& F, const Vec& x_star, const Vec& x);

/// d_F(x_star, .) as a scalar field. The differential comes from the log map
/// (exact for closed-form fibres); second partials by 5-point differences of it.
ScalarField distance_field(FibrePtr F, const Vec& x_star);

Vec gradient(const FibreModel& F, const ScalarField& h, const Vec& x);
/// Hess(X, Y) = X(Y h) - (nabla_X Y) h, as a coordinate matrix.
Mat hessian(const FibreModel& F, const ScalarField& h, const Vec& x);

double sectional_curvature(const FibreModel& F, const Vec& x, const Vec& u, const Vec& v);

struct JacobiRecord {
  std::vector<double> s;
  std::vector<Vec> x;
  std::vector<Vec> v;
  std::vector<Vec> J;
  std::vector<Vec> dJ;  // covariant derivative
};

/// Solves J'' + R(J, g')g' = 0 along the geodesic from (x, v), covariant form.
JacobiRecord jacobi_transport(const FibreModel& F, const Vec& x, const Vec& v, const Vec& J0,
                              const Vec& dJ0, const std::vector<double>& params,
                              const num::OdeOptions& opts = {});

struct LemmaCheck {
  double lhs;
  double rhs;
};
/// g(nabla_w P, w) against (1/2) d/ds |J|^2 at s = 1 for the Jacobi field
/// with J(0) = 0, J(1) = w along the geodesic from x_* to x.
LemmaCheck check_lemma_position_jacobi(const FibreModel& F, const Vec& x_star, const Vec& x, const Vec& w);

/// Orthonormal basis (columns) of the g-orthogonal complement of `span`.
Mat orthonormal_complement(const Mat& g, const Mat& span);

}  // namespace nullkit
