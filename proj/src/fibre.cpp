#include "nullkit/fibre.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nullkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec box_lo(int n, double v) { return Vec::Constant(n, v); }

}  // namespace

// ---------------------------------------------------------------------------
// FibreModel defaults
// ---------------------------------------------------------------------------

std::vector<std::string> FibreModel::coordinate_names() const {
  std::vector<std::string> out;
  for (int i = 0; i < dim(); ++i) out.push_back("x" + std::to_string(i + 1));
  return out;
}

void FibreModel::require(const Vec& x) const {
  if (x.size() != dim()) throw DomainError("point has wrong dimension for this fibre");
  if (!contains(x)) throw DomainError(kind() + " fibre: point outside the chart domain");
}

MetricJet FibreModel::jet(const Vec& x) const {
  MetricJet j;
  j.g = metric(x);
  const int n = dim();
  Vec y = x;
  for (int k = 0; k < n; ++k) {
    const double h = fd_step(x[k], 1e-5);
    y[k] = x[k] + h;
    const Mat gp = metric(y);
    y[k] = x[k] - h;
    const Mat gm = metric(y);
    y[k] = x[k];
    j.deriv.push_back((gp - gm) / (2 * h));
  }
  return j;
}

Christoffel FibreModel::christoffel(const Vec& x) const { return christoffel_from_jet(jet(x)); }

Riemann FibreModel::riemann(const Vec& x) const {
  return riemann_from_christoffel([this](const Vec& y) { return christoffel(y); }, x);
}

GeodesicState FibreModel::geodesic_closed(const Vec&, const Vec&, double) const {
  throw Error(kind() + " fibre has no closed-form geodesics");
}

Vec FibreModel::log_closed(const Vec&, const Vec&) const {
  throw Error(kind() + " fibre has no closed-form logarithm");
}

double FibreModel::distance_closed(const Vec&, const Vec&) const {
  throw Error(kind() + " fibre has no closed-form distance");
}

double FibreModel::injectivity_bound(const Vec&) const { return 0.5; }

// ---------------------------------------------------------------------------
// Euclidean
// ---------------------------------------------------------------------------

EuclideanFibre::EuclideanFibre(int dim, double half_width) : n_(dim) {
  if (dim < 1) throw Error("fibre dimension must be positive");
  box_ = {box_lo(dim, -half_width), box_lo(dim, half_width)};
}

Mat EuclideanFibre::metric(const Vec&) const { return Mat::Identity(n_, n_); }

MetricJet EuclideanFibre::jet(const Vec&) const {
  return {Mat::Identity(n_, n_), std::vector<Mat>(static_cast<std::size_t>(n_), Mat::Zero(n_, n_))};
}

Riemann EuclideanFibre::riemann(const Vec&) const { return Riemann(n_); }

GeodesicState EuclideanFibre::geodesic_closed(const Vec& x, const Vec& v, double s) const {
  return {x + s * v, v};
}

Vec EuclideanFibre::log_closed(const Vec& x, const Vec& y) const { return y - x; }

double EuclideanFibre::distance_closed(const Vec& x, const Vec& y) const { return (y - x).norm(); }

double EuclideanFibre::injectivity_bound(const Vec&) const { return kInf; }

// ---------------------------------------------------------------------------
// Sphere
// ---------------------------------------------------------------------------

SphereFibre::SphereFibre(int dim, double radius, double cut_collar, const Mat& rotation)
    : m_(dim), R_(radius) {
  if (dim < 1) throw Error("fibre dimension must be positive");
  if (!(radius > 0)) throw Error("sphere radius must be positive");
  if (rotation.size() == 0) {
    Q_ = Mat::Identity(dim + 1, dim + 1);
  } else {
    if (rotation.rows() != dim + 1 || rotation.cols() != dim + 1)
      throw Error("sphere pole rotation has the wrong size");
    if ((rotation.transpose() * rotation - Mat::Identity(dim + 1, dim + 1)).norm() > 1e-10)
      throw Error("sphere pole rotation is not orthogonal");
    Q_ = rotation;
  }
  const double pi = std::numbers::pi;
  box_.lo = Vec::Constant(dim, cut_collar);
  box_.hi = Vec::Constant(dim, pi - cut_collar);
  box_.lo[dim - 1] = -pi + cut_collar;
}

std::vector<std::string> SphereFibre::coordinate_names() const {
  std::vector<std::string> out;
  for (int i = 0; i < m_; ++i) out.push_back("a" + std::to_string(i + 1));
  return out;
}

Vec SphereFibre::embed(const Vec& a) const {
  Vec L(m_ + 1);
  double P = 1.0;
  for (int j = 0; j < m_; ++j) {
    L[j] = P * std::cos(a[j]);
    P *= std::sin(a[j]);
  }
  L[m_] = P;
  // the last angle runs over a full circle: its sine closes the chain
  return R_ * (Q_ * L);
}

Mat SphereFibre::embed_jacobian(const Vec& a) const {
  Mat J = Mat::Zero(m_ + 1, m_);
  // component j (0..m) is prod_{i<j} sin a_i * (j < m ? cos a_j : 1)
  for (int k = 0; k < m_; ++k) {
    for (int j = k; j <= m_; ++j) {
      double v = 1.0;
      for (int i = 0; i < j && i < m_; ++i) v *= (i == k) ? std::cos(a[i]) : std::sin(a[i]);
      if (j < m_) v *= (j == k) ? -std::sin(a[j]) : std::cos(a[j]);
      J(j, k) = v;
    }
  }
  return R_ * (Q_ * J);
}

Vec SphereFibre::chart(const Vec& X) const {
  const Vec L = Q_.transpose() * X / R_;
  Vec a(m_);
  for (int i = 0; i < m_ - 1; ++i) a[i] = std::atan2(L.tail(m_ - i).norm(), L[i]);
  a[m_ - 1] = std::atan2(L[m_], L[m_ - 1]);
  return a;
}

Vec SphereFibre::chart_vector(const Vec& a, const Vec& V) const {
  const Mat J = embed_jacobian(a);
  const Mat g = J.transpose() * J;
  return g.ldlt().solve(J.transpose() * V);
}

Mat SphereFibre::metric(const Vec& a) const {
  Mat g = Mat::Zero(m_, m_);
  double P = R_ * R_;
  for (int i = 0; i < m_; ++i) {
    g(i, i) = P;
    P *= std::sin(a[i]) * std::sin(a[i]);
  }
  return g;
}

MetricJet SphereFibre::jet(const Vec& a) const {
  MetricJet j;
  j.g = metric(a);
  for (int k = 0; k < m_; ++k) {
    Mat d = Mat::Zero(m_, m_);
    for (int i = k + 1; i < m_; ++i) {
      double v = R_ * R_;
      for (int q = 0; q < i; ++q) {
        const double s = std::sin(a[q]);
        v *= (q == k) ? 2.0 * s * std::cos(a[q]) : s * s;
      }
      d(i, i) = v;
    }
    j.deriv.push_back(d);
  }
  return j;
}

Riemann SphereFibre::riemann(const Vec& a) const {
  return constant_curvature_riemann(1.0 / (R_ * R_), metric(a));
}

GeodesicState SphereFibre::geodesic_closed(const Vec& x, const Vec& v, double s) const {
  const Vec X = embed(x);
  const Vec V = embed_jacobian(x) * v;
  const double rho = V.norm();
  if (rho == 0.0) return {x, v};
  const double th = s * rho / R_;
  const Vec U = V / rho;
  const Vec Y = std::cos(th) * X + R_ * std::sin(th) * U;
  const Vec W = rho * (-std::sin(th) * X / R_ + std::cos(th) * U);
  const Vec y = chart(Y);
  return {y, chart_vector(y, W)};
}

Vec SphereFibre::log_closed(const Vec& x, const Vec& y) const {
  const Vec X = embed(x);
  const Vec Y = embed(y);
  const double c = X.dot(Y) / (R_ * R_);
  const Vec Yp = Y - c * X;
  const double sn = Yp.norm() / R_;
  if (sn == 0.0) {
    if (c > 0) return Vec::Zero(m_);
    throw DomainError("sphere logarithm undefined at the antipode");
  }
  const double ang = std::atan2(sn, c);
  return chart_vector(x, R_ * ang * Yp / Yp.norm());
}

double SphereFibre::distance_closed(const Vec& x, const Vec& y) const {
  const Vec X = embed(x);
  const Vec Y = embed(y);
  const double c = X.dot(Y) / (R_ * R_);
  const double sn = (Y - c * X).norm() / R_;
  return R_ * std::atan2(sn, c);
}

double SphereFibre::injectivity_bound(const Vec&) const { return std::numbers::pi * R_ * (1.0 - 1e-6); }

// ---------------------------------------------------------------------------
// Hyperbolic (Poincare ball)
// ---------------------------------------------------------------------------

HyperbolicFibre::HyperbolicFibre(int dim, double curvature, double ball_margin)
    : m_(dim), k_(curvature), l_(1.0 / std::sqrt(-curvature)), margin_(ball_margin) {
  if (dim < 1) throw Error("fibre dimension must be positive");
  if (!(curvature < 0)) throw Error("hyperbolic curvature must be negative");
  box_ = {box_lo(dim, -1.0 + ball_margin), box_lo(dim, 1.0 - ball_margin)};
}

bool HyperbolicFibre::contains(const Vec& x) const {
  return x.size() == m_ && x.norm() <= 1.0 - margin_;
}

Vec HyperbolicFibre::embed(const Vec& x) const {
  const double r2 = x.squaredNorm();
  Vec X(m_ + 1);
  X[0] = l_ * (1 + r2) / (1 - r2);
  X.tail(m_) = 2 * l_ * x / (1 - r2);
  return X;
}

Mat HyperbolicFibre::embed_jacobian(const Vec& x) const {
  const double r2 = x.squaredNorm();
  const double q = 1 - r2;
  Mat J(m_ + 1, m_);
  J.row(0) = (4 * l_ / (q * q)) * x.transpose();
  J.bottomRows(m_) = (2 * l_ / q) * Mat::Identity(m_, m_) + (4 * l_ / (q * q)) * x * x.transpose();
  return J;
}

Vec HyperbolicFibre::chart(const Vec& X) const { return X.tail(m_) / (l_ + X[0]); }

Vec HyperbolicFibre::chart_vector(const Vec& x, const Vec& V) const {
  const Mat J = embed_jacobian(x);
  Vec etaV = V;
  etaV[0] = -etaV[0];
  return metric(x).ldlt().solve(J.transpose() * etaV);
}

Mat HyperbolicFibre::metric(const Vec& x) const {
  const double q = 1 - x.squaredNorm();
  return (4 * l_ * l_ / (q * q)) * Mat::Identity(m_, m_);
}

MetricJet HyperbolicFibre::jet(const Vec& x) const {
  MetricJet j;
  j.g = metric(x);
  const double q = 1 - x.squaredNorm();
  for (int k = 0; k < m_; ++k) j.deriv.push_back((16 * l_ * l_ * x[k] / (q * q * q)) * Mat::Identity(m_, m_));
  return j;
}

Riemann HyperbolicFibre::riemann(const Vec& x) const { return constant_curvature_riemann(k_, metric(x)); }

namespace {
double lorentz_dot(const Vec& a, const Vec& b) { return -a[0] * b[0] + a.tail(a.size() - 1).dot(b.tail(b.size() - 1)); }
}  // namespace

GeodesicState HyperbolicFibre::geodesic_closed(const Vec& x, const Vec& v, double s) const {
  const Vec X = embed(x);
  const Vec V = embed_jacobian(x) * v;
  const double rho = std::sqrt(std::max(0.0, lorentz_dot(V, V)));
  if (rho == 0.0) return {x, v};
  const double th = s * rho / l_;
  const Vec Y = std::cosh(th) * X + l_ * std::sinh(th) * V / rho;
  const Vec W = (rho / l_) * std::sinh(th) * X + std::cosh(th) * V;
  const Vec y = chart(Y);
  return {y, chart_vector(y, W)};
}

Vec HyperbolicFibre::log_closed(const Vec& x, const Vec& y) const {
  const Vec X = embed(x);
  const Vec Y = embed(y);
  const double c = -lorentz_dot(X, Y) / (l_ * l_);
  const Vec Yt = Y - c * X;
  const double nt = std::sqrt(std::max(0.0, lorentz_dot(Yt, Yt)));
  if (nt == 0.0) return Vec::Zero(m_);
  return chart_vector(x, distance_closed(x, y) * Yt / nt);
}

double HyperbolicFibre::distance_closed(const Vec& x, const Vec& y) const {
  const Vec D = embed(x) - embed(y);
  const double q = std::max(0.0, lorentz_dot(D, D));
  return 2 * l_ * std::asinh(std::sqrt(q) / (2 * l_));
}

double HyperbolicFibre::injectivity_bound(const Vec&) const { return kInf; }

// ---------------------------------------------------------------------------
// Product
// ---------------------------------------------------------------------------

ProductFibre::ProductFibre(std::vector<FibrePtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error("product fibre needs at least one factor");
  for (const auto& f : factors_) {
    offsets_.push_back(n_);
    n_ += f->dim();
  }
  box_.lo.resize(n_);
  box_.hi.resize(n_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    box_.lo.segment(offsets_[i], factors_[i]->dim()) = factors_[i]->box().lo;
    box_.hi.segment(offsets_[i], factors_[i]->dim()) = factors_[i]->box().hi;
  }
}

bool ProductFibre::contains(const Vec& x) const {
  if (x.size() != n_) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (!factors_[i]->contains(x.segment(offsets_[i], factors_[i]->dim()))) return false;
  return true;
}

Mat ProductFibre::metric(const Vec& x) const {
  Mat g = Mat::Zero(n_, n_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int o = offsets_[i], d = factors_[i]->dim();
    g.block(o, o, d, d) = factors_[i]->metric(x.segment(o, d));
  }
  return g;
}

MetricJet ProductFibre::jet(const Vec& x) const {
  MetricJet j;
  j.g = Mat::Zero(n_, n_);
  j.deriv.assign(static_cast<std::size_t>(n_), Mat::Zero(n_, n_));
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int o = offsets_[i], d = factors_[i]->dim();
    const MetricJet f = factors_[i]->jet(x.segment(o, d));
    j.g.block(o, o, d, d) = f.g;
    for (int k = 0; k < d; ++k) j.deriv[static_cast<std::size_t>(o + k)].block(o, o, d, d) = f.deriv[static_cast<std::size_t>(k)];
  }
  return j;
}

Christoffel ProductFibre::christoffel(const Vec& x) const {
  Christoffel G(n_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int o = offsets_[i], d = factors_[i]->dim();
    const Christoffel f = factors_[i]->christoffel(x.segment(o, d));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) G(o + a, o + b, o + c) = f(a, b, c);
  }
  return G;
}

Riemann ProductFibre::riemann(const Vec& x) const {
  Riemann R(n_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int o = offsets_[i], d = factors_[i]->dim();
    const Riemann f = factors_[i]->riemann(x.segment(o, d));
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) R(o + a, o + b, o + c, o + e) = f(a, b, c, e);
  }
  return R;
}

bool ProductFibre::closed_form() const {
  for (const auto& f : factors_)
    if (!f->closed_form()) return false;
  return true;
}

GeodesicState ProductFibre::geodesic_closed(const Vec& x, const Vec& v, double s) const {
  GeodesicState out{Vec(n_), Vec(n_)};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int o = offsets_[i], d = factors_[i]->dim();
    const auto st = factors_[i]->geodesic_closed(x.segment(o, d), v.segment(o, d), s);
    out.x.segment(o, d) = st.x;
    out.v.segment(o, d) = st.v;
  }
  return out;
}

Vec ProductFibre::log_closed(const Vec& x, const Vec& y) const {
  Vec out(n_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int o = offsets_[i], d = factors_[i]->dim();
    out.segment(o, d) = factors_[i]->log_closed(x.segment(o, d), y.segment(o, d));
  }
  return out;
}

double ProductFibre::distance_closed(const Vec& x, const Vec& y) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int o = offsets_[i], d = factors_[i]->dim();
    const double di = factors_[i]->distance_closed(x.segment(o, d), y.segment(o, d));
    acc += di * di;
  }
  return std::sqrt(acc);
}

double ProductFibre::injectivity_bound(const Vec& x) const {
  double b = kInf;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    b = std::min(b, factors_[i]->injectivity_bound(x.segment(offsets_[i], factors_[i]->dim())));
  return b;
}

// ---------------------------------------------------------------------------
// Twisted
// ---------------------------------------------------------------------------

TwistedFibre::TwistedFibre(double a, double b, FibrePtr leaf, ScalarField mu, double margin)
    : a_(a), b_(b), leaf_(std::move(leaf)), mu_(std::move(mu)) {
  if (!(a < b)) throw Error("twisted fibre needs a < b");
  if (mu_.dim() != 1 + leaf_->dim()) throw Error("twisted warping has the wrong number of variables");
  const int n = 1 + leaf_->dim();
  box_.lo.resize(n);
  box_.hi.resize(n);
  box_.lo[0] = std::isfinite(a) ? a + margin : -1e6;
  box_.hi[0] = std::isfinite(b) ? b - margin : 1e6;
  box_.lo.tail(n - 1) = leaf_->box().lo;
  box_.hi.tail(n - 1) = leaf_->box().hi;
}

bool TwistedFibre::contains(const Vec& x) const {
  if (x.size() != dim()) return false;
  if (!(x[0] >= box_.lo[0] && x[0] <= box_.hi[0])) return false;
  if (!leaf_->contains(x.tail(dim() - 1))) return false;
  const double m = mu_.value(x);
  return m > 0;
}

std::vector<std::string> TwistedFibre::coordinate_names() const {
  std::vector<std::string> out{"s"};
  for (const auto& n : leaf_->coordinate_names()) out.push_back(n == "s" ? "s_leaf" : n);
  return out;
}

Mat TwistedFibre::metric(const Vec& x) const {
  const int n = dim();
  Mat g = Mat::Zero(n, n);
  g(0, 0) = 1.0;
  const double m = mu_.value(x);
  g.bottomRightCorner(n - 1, n - 1) = m * m * leaf_->metric(x.tail(n - 1));
  return g;
}

MetricJet TwistedFibre::jet(const Vec& x) const {
  const int n = dim();
  const double m = mu_.value(x);
  const Vec dm = mu_.gradient(x);
  const MetricJet leaf = leaf_->jet(x.tail(n - 1));
  MetricJet j;
  j.g = Mat::Zero(n, n);
  j.g(0, 0) = 1.0;
  j.g.bottomRightCorner(n - 1, n - 1) = m * m * leaf.g;
  for (int k = 0; k < n; ++k) {
    Mat d = Mat::Zero(n, n);
    Mat blk = 2 * m * dm[k] * leaf.g;
    if (k > 0) blk += m * m * leaf.deriv[static_cast<std::size_t>(k - 1)];
    d.bottomRightCorner(n - 1, n - 1) = blk;
    j.deriv.push_back(d);
  }
  return j;
}

double TwistedFibre::injectivity_bound(const Vec& x) const {
  const double room = std::min(x[0] - a_, b_ - x[0]);
  const double leaf = leaf_->injectivity_bound(x.tail(dim() - 1)) * mu_.value(x);
  return std::min({room, leaf, 1e6});
}

// ---------------------------------------------------------------------------
// Expression metric, conformal, callable
// ---------------------------------------------------------------------------

ExpressionMetricFibre::ExpressionMetricFibre(std::vector<std::string> coords,
                                             std::vector<std::vector<std::string>> components,
                                             const ChartBox& box, const std::map<std::string, double>& params,
                                             double injectivity)
    : coords_(std::move(coords)), inj_(injectivity) {
  const std::size_t n = coords_.size();
  if (n == 0) throw Error("expression metric needs coordinates");
  if (components.size() != n) throw Error("expression metric: component matrix has the wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    if (components[i].size() != n) throw Error("expression metric: component matrix has the wrong size");
    for (std::size_t j = 0; j < n; ++j) g_.push_back(ScalarField::parse(components[i][j], coords_, params));
  }
  if (box.lo.size() != static_cast<Eigen::Index>(n)) throw Error("expression metric: box has the wrong size");
  box_ = box;
}

Mat ExpressionMetricFibre::metric(const Vec& x) const {
  const int n = dim();
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = g_[static_cast<std::size_t>(i * n + j)].value(x);
  return 0.5 * (g + g.transpose());
}

ConformalFibre::ConformalFibre(FibrePtr base, ScalarField factor, double injectivity)
    : base_(std::move(base)), c_(std::move(factor)), inj_(injectivity) {
  box_ = base_->box();
}

Mat ConformalFibre::metric(const Vec& x) const { return c_.value(x) * base_->metric(x); }

MetricJet ConformalFibre::jet(const Vec& x) const {
  const MetricJet b = base_->jet(x);
  const double c = c_.value(x);
  const Vec dc = c_.gradient(x);
  MetricJet j;
  j.g = c * b.g;
  for (int k = 0; k < dim(); ++k) j.deriv.push_back(dc[k] * b.g + c * b.deriv[static_cast<std::size_t>(k)]);
  return j;
}

CallableMetricFibre::CallableMetricFibre(int dim, std::function<Mat(const Vec&)> metric, const ChartBox& box,
                                         double injectivity)
    : n_(dim), g_(std::move(metric)), inj_(injectivity) {
  box_ = box;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

double metric(const FibreModel& F, const Vec& x, const Vec& u, const Vec& v) {
  F.require(x);
  return u.dot(F.metric(x) * v);
}

double norm(const FibreModel& F, const Vec& x, const Vec& u) { return std::sqrt(metric(F, x, u, u)); }

num::DenseSolution geodesic_dense(const FibreModel& F, const Vec& x, const Vec& v, double s_max,
                                  const GeodesicOptions& opts) {
  const int n = F.dim();
  Vec y0(2 * n);
  y0 << x, v;
  auto rhs = [&F, n](double, const Vec& y, Vec& dy) {
    const Vec p = y.head(n), q = y.tail(n);
    dy.resize(2 * n);
    dy.head(n) = q;
    dy.tail(n) = -F.christoffel(p).contract(q, q);
  };
  auto guard = [&F, n](double, const Vec& y) { return F.contains(y.head(n)); };
  return num::integrate_ode(rhs, 0.0, y0, s_max, opts.ode, guard);
}

GeodesicRecord geodesic(const FibreModel& F, const Vec& x, const Vec& v, const std::vector<double>& params,
                        const GeodesicOptions& opts) {
  F.require(x);
  if (v.norm() == 0.0) throw DegenerateError("geodesic needs a nonzero initial velocity");
  GeodesicRecord rec;
  const int n = F.dim();
  if (F.closed_form()) {
    for (double s : params) {
      const auto st = F.geodesic_closed(x, v, s);
      rec.s.push_back(s);
      rec.x.push_back(st.x);
      rec.v.push_back(st.v);
    }
    return rec;
  }
  double lo = 0.0, hi = 0.0;
  for (double s : params) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  std::optional<num::DenseSolution> fwd, bwd;
  if (hi > 0) {
    fwd = geodesic_dense(F, x, v, hi, opts);
    if (fwd->stopped()) throw RangeError("geodesic left the chart domain", fwd->stop_parameter());
  }
  if (lo < 0) {
    bwd = geodesic_dense(F, x, v, lo, opts);
    if (bwd->stopped()) throw RangeError("geodesic left the chart domain", bwd->stop_parameter());
  }
  for (double s : params) {
    Vec y;
    if (s > 0) y = (*fwd)(s);
    else if (s < 0) y = (*bwd)(s);
    else {
      y.resize(2 * n);
      y << x, v;
    }
    rec.s.push_back(s);
    rec.x.push_back(y.head(n));
    rec.v.push_back(y.tail(n));
  }
  return rec;
}

GeodesicState geodesic_at(const FibreModel& F, const Vec& x, const Vec& v, double s, const GeodesicOptions& opts) {
  if (v.norm() == 0.0 || s == 0.0) return {x, v};
  const auto rec = geodesic(F, x, v, {s}, opts);
  return {rec.x[0], rec.v[0]};
}

Vec exp_map(const FibreModel& F, const Vec& x, const Vec& v) {
  F.require(x);
  if (v.norm() == 0.0) return x;
  return geodesic_at(F, x, v, 1.0).x;
}

Vec log_map(const FibreModel& F, const Vec& x, const Vec& y, const ShootingOptions& opts) {
  F.require(x);
  F.require(y);
  if (F.closed_form()) return F.log_closed(x, y);
  const int n = F.dim();
  Vec v = y - x;
  auto shoot = [&](const Vec& w) -> Vec {
    if (w.norm() == 0.0) return x - y;
    return geodesic_at(F, x, w, 1.0).x - y;
  };
  Vec r = shoot(v);
  double rn = r.norm();
  for (int it = 0; it < opts.max_iter && rn > opts.residual; ++it) {
    Mat Jm(n, n);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-6 * std::max(1.0, v.norm());
      Vec vp = v, vm = v;
      vp[k] += h;
      vm[k] -= h;
      Jm.col(k) = (shoot(vp) - shoot(vm)) / (2 * h);
    }
    const Vec step = Jm.fullPivLu().solve(-r);
    double lambda = 1.0;
    bool improved = false;
    for (int back = 0; back < 20; ++back) {
      const Vec cand = v + lambda * step;
      Vec rc;
      try {
        rc = shoot(cand);
      } catch (const RangeError&) {
        lambda *= 0.5;
        continue;
      }
      if (rc.norm() < rn) {
        v = cand;
        r = rc;
        rn = rc.norm();
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (!(rn <= opts.residual)) throw ConvergenceError("geodesic shooting did not converge", rn);
  if (norm(F, x, v) > F.injectivity_bound(x))
    throw DomainError("points are not in a common normal neighbourhood");
  return v;
}

double distance(const FibreModel& F, const Vec& x, const Vec& y) {
  F.require(x);
  F.require(y);
  if (F.closed_form()) return F.distance_closed(x, y);
  return norm(F, x, log_map(F, x, y));
}

Vec position_field(const FibreModel& F, const Vec& x_star, const Vec& x) {
  const Vec back = log_map(F, x, x_star);
  if (norm(F, x, back) > F.injectivity_bound(x))
    throw DomainError("point is outside the normal neighbourhood of the centre");
  return -back;
}

ScalarField distance_field(FibrePtr F, const Vec& x_star) {
  const int n = F->dim();
  auto grad = [F, x_star](const Vec& x) {
    const Vec P = position_field(*F, x_star, x);
    const double d = norm(*F, x, P);
    if (d == 0.0) throw DegenerateError("distance is not differentiable at the centre");
    return Vec(F->metric(x) * P / d);
  };
  return ScalarField::from_parts(
      n, [F, x_star](const Vec& x) { return distance(*F, x_star, x); }, grad,
      [F, x_star, grad, n](const Vec& x) {
        // the Hessian scales like 1/d, so the step must shrink with d
        const double rel = std::min(1e-3, 1e-2 * distance(*F, x_star, x));
        Mat H(n, n);
        for (int k = 0; k < n; ++k) H.col(k) = fd5(grad, x, k, rel);
        return Mat(0.5 * (H + H.transpose()));
      });
}

Vec gradient(const FibreModel& F, const ScalarField& h, const Vec& x) {
  F.require(x);
  return F.metric(x).ldlt().solve(h.gradient(x));
}

Mat hessian(const FibreModel& F, const ScalarField& h, const Vec& x) {
  F.require(x);
  const Vec dh = h.gradient(x);
  Mat H = h.hessian(x);
  const Christoffel G = F.christoffel(x);
  const int n = F.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += G(k, i, j) * dh[k];
      H(i, j) -= acc;
    }
  return 0.5 * (H + H.transpose());
}

double sectional_curvature(const FibreModel& F, const Vec& x, const Vec& u, const Vec& v) {
  F.require(x);
  const Mat g = F.metric(x);
  const double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
  const double den = uu * vv - uv * uv;
  if (!(den > 1e-12 * uu * vv) || uu == 0.0 || vv == 0.0) throw DegenerateError("plane vectors are dependent");
  const Vec r = F.riemann(x).apply(u, v, v);
  return r.dot(g * u) / den;
}

JacobiRecord jacobi_transport(const FibreModel& F, const Vec& x, const Vec& v, const Vec& J0, const Vec& dJ0,
                              const std::vector<double>& params, const num::OdeOptions& opts) {
  F.require(x);
  const int n = F.dim();
  Vec y0(4 * n);
  y0 << x, v, J0, dJ0;
  auto rhs = [&F, n](double, const Vec& y, Vec& dy) {
    const Vec p = y.segment(0, n), q = y.segment(n, n), J = y.segment(2 * n, n), W = y.segment(3 * n, n);
    const Christoffel G = F.christoffel(p);
    dy.resize(4 * n);
    dy.segment(0, n) = q;
    dy.segment(n, n) = -G.contract(q, q);
    dy.segment(2 * n, n) = W - G.contract(q, J);
    dy.segment(3 * n, n) = -F.riemann(p).apply(J, q, q) - G.contract(q, W);
  };
  auto guard = [&F, n](double, const Vec& y) { return F.contains(y.head(n)); };
  double hi = 0.0;
  for (double s : params) {
    if (s < 0) throw Error("Jacobi transport parameters must be non-negative");
    hi = std::max(hi, s);
  }
  JacobiRecord rec;
  std::optional<num::DenseSolution> sol;
  if (hi > 0) {
    sol = num::integrate_ode(rhs, 0.0, y0, hi, opts, guard);
    if (sol->stopped()) throw RangeError("Jacobi transport left the chart domain", sol->stop_parameter());
  }
  for (double s : params) {
    const Vec y = s > 0 ? (*sol)(s) : y0;
    rec.s.push_back(s);
    rec.x.push_back(y.segment(0, n));
    rec.v.push_back(y.segment(n, n));
    rec.J.push_back(y.segment(2 * n, n));
    rec.dJ.push_back(y.segment(3 * n, n));
  }
  return rec;
}

LemmaCheck check_lemma_position_jacobi(const FibreModel& F, const Vec& x_star, const Vec& x, const Vec& w) {
  F.require(x);
  const int n = F.dim();
  // lhs: covariant derivative of the position field along w
  const Vec P = position_field(F, x_star, x);
  Mat dP(n, n);
  for (int k = 0; k < n; ++k)
    dP.col(k) = fd5([&](const Vec& y) { return position_field(F, x_star, y); }, x, k);
  const Vec nablaP = dP * w + F.christoffel(x).contract(w, P);
  const double lhs = w.dot(F.metric(x) * nablaP);

  // rhs: boundary Jacobi field J(0) = 0, J(1) = w
  const Vec v0 = log_map(F, x_star, x);
  const double d = 1e-3;
  const std::vector<double> params{1.0 - 2 * d, 1.0 - d, 1.0, 1.0 + d, 1.0 + 2 * d};
  std::vector<JacobiRecord> basis;
  Mat M(n, n);
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = 1.0;
    basis.push_back(jacobi_transport(F, x_star, v0, Vec::Zero(n), e, params));
    M.col(k) = basis.back().J[2];
  }
  const Vec c = M.fullPivLu().solve(w);
  auto sq = [&](std::size_t i) {
    Vec J = Vec::Zero(n);
    for (int k = 0; k < n; ++k) J += c[k] * basis[static_cast<std::size_t>(k)].J[i];
    return J.dot(F.metric(basis[0].x[i]) * J);
  };
  const double deriv = ((sq(0) - sq(4)) + 8.0 * (sq(3) - sq(1))) / (12.0 * d);
  return {lhs, 0.5 * deriv};
}

Mat orthonormal_complement(const Mat& g, const Mat& span) {
  const int n = static_cast<int>(g.rows());
  std::vector<Vec> basis;
  auto ip = [&g](const Vec& a, const Vec& b) { return a.dot(g * b); };
  auto orth = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= ip(b, v) * b;
    return v;
  };
  for (int c = 0; c < span.cols(); ++c) {
    Vec v = orth(span.col(c));
    const double nv = std::sqrt(std::max(0.0, ip(v, v)));
    if (nv > 1e-12) basis.push_back(v / nv);
  }
  const std::size_t fixed = basis.size();
  for (int k = 0; k < n && static_cast<int>(basis.size()) < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = 1.0;
    Vec v = orth(e);
    const double nv = std::sqrt(std::max(0.0, ip(v, v)));
    const double ne = std::sqrt(ip(e, e));
    if (nv > 1e-6 * ne) basis.push_back(v / nv);
  }
  Mat out(n, static_cast<int>(basis.size() - fixed));
  for (std::size_t i = fixed; i < basis.size(); ++i) out.col(static_cast<int>(i - fixed)) = basis[i];
  return out;
}

}  // namespace nullkit
