#include "nullkit/grw.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nullkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double pi = std::numbers::pi;

num::QuadOptions tight() {
  num::QuadOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// WarpingProfile
// ---------------------------------------------------------------------------

WarpingProfile::WarpingProfile(Function1D f, double t_min, double t_max)
    : f_(std::move(f)), lo_(t_min), hi_(t_max) {
  if (!(t_min < t_max)) throw Error("warping interval must satisfy t_min < t_max");
  if (f_.expression()) {
    const expr::Node& r = f_.expression()->root();
    const auto is_var = [&](const expr::NodePtr& n) { return n->op == expr::Op::Var && n->name == f_.variable(); };
    if (r.op == expr::Op::Num) {
      catalog_ = "const";
      param_ = r.value;
    } else if (r.op == expr::Op::Call && r.args.size() == 1 && is_var(r.args[0])) {
      if (r.fn == expr::Fn::Cosh) catalog_ = "cosh";
      if (r.fn == expr::Fn::Cos) catalog_ = "cos";
      if (r.fn == expr::Fn::Exp) catalog_ = "exp";
    } else if (r.op == expr::Op::Pow && is_var(r.args[0]) && r.args[1]->op == expr::Op::Num) {
      catalog_ = "power";
      param_ = r.args[1]->value;
    }
  }
  // catalog entries are only exact on their natural domains
  if (catalog_ == "const" && !(param_ > 0)) throw DomainError("warping function must be positive");
  if (catalog_ == "cos" && (lo_ < -pi / 2 || hi_ > pi / 2)) catalog_.clear();
  if (catalog_ == "power" && lo_ < 0) catalog_.clear();
  origin_ = std::isfinite(lo_) && std::isfinite(hi_) ? 0.5 * (lo_ + hi_) : std::clamp(0.0, lo_, hi_);
  if (!contains(origin_)) origin_ = std::isfinite(lo_) ? lo_ + 1.0 : hi_ - 1.0;
  if (catalog_.empty()) build_cache();
}

WarpingProfile WarpingProfile::parse(const std::string& text, double t_min, double t_max,
                                     const std::map<std::string, double>& params) {
  return WarpingProfile(Function1D::parse(text, "t", params), t_min, t_max);
}

WarpingProfile WarpingProfile::constant(double c, double t_min, double t_max) {
  return WarpingProfile(Function1D::constant(c), t_min, t_max);
}

void WarpingProfile::require(double t) const {
  if (!contains(t)) throw DomainError("time " + std::to_string(t) + " outside the warping interval");
}

double WarpingProfile::f(double t) const {
  const double v = f_(t);
  if (!(v > 0)) throw DomainError("warping function not positive at t = " + std::to_string(t));
  return v;
}

double WarpingProfile::integrand(Quadrature which, double t) const {
  const double v = f_(t);
  return which == Quadrature::A ? v : 1.0 / v;
}

void WarpingProfile::build_cache() {
  // nodes origin + k*spacing strictly inside I, |k*spacing| <= 64
  const int kmax = static_cast<int>(64.0 / spacing_);
  int k_lo = 0, k_hi = 0;
  while (k_lo > -kmax && origin_ + (k_lo - 1) * spacing_ > lo_ + 0.5 * spacing_) --k_lo;
  while (k_hi < kmax && origin_ + (k_hi + 1) * spacing_ < hi_ - 0.5 * spacing_) ++k_hi;
  for (int k = k_lo; k <= k_hi; ++k) nodes_.push_back(origin_ + k * spacing_);
  for (double t : nodes_)
    if (!(f_(t) > 0)) throw DomainError("warping function not positive at t = " + std::to_string(t));
  const std::size_t zero = static_cast<std::size_t>(-k_lo);
  cum_A_.assign(nodes_.size(), 0.0);
  cum_C_.assign(nodes_.size(), 0.0);
  for (auto which : {Quadrature::A, Quadrature::C}) {
    auto& cum = which == Quadrature::A ? cum_A_ : cum_C_;
    auto fn = [this, which](double t) { return integrand(which, t); };
    for (std::size_t i = zero + 1; i < nodes_.size(); ++i)
      cum[i] = cum[i - 1] + num::integrate(fn, nodes_[i - 1], nodes_[i], tight()).value;
    for (std::size_t i = zero; i-- > 0;) cum[i] = cum[i + 1] - num::integrate(fn, nodes_[i], nodes_[i + 1], tight()).value;
  }
}

double WarpingProfile::primitive_generic(Quadrature which, double t) const {
  const auto& cum = which == Quadrature::A ? cum_A_ : cum_C_;
  const double pos = std::round((t - nodes_.front()) / spacing_);
  const std::size_t i = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(nodes_.size() - 1)));
  if (t == nodes_[i]) return cum[i];
  auto fn = [this, which](double r) { return integrand(which, r); };
  const bool endpoint = t == lo_ || t == hi_;
  num::QuadResult r;
  try {
    r = num::integrate(fn, nodes_[i], t, tight());
  } catch (const Error&) {
    // the integrand blew up on the way to an endpoint: treat as divergent
    if (!endpoint) throw;
    r.converged = false;
  }
  if (!r.converged || !std::isfinite(r.value)) {
    if (endpoint) return t == hi_ ? kInf : -kInf;
    throw ConvergenceError("warping quadrature did not converge", r.error);
  }
  return cum[i] + r.value;
}

double WarpingProfile::primitive(Quadrature which, double t) const {
  const bool A = which == Quadrature::A;
  if (catalog_.empty()) return primitive_generic(which, t);
  auto P = [&](double x) -> double {
    if (catalog_ == "const") return A ? param_ * x : x / param_;
    if (catalog_ == "cosh") {
      if (A) return std::sinh(x);
      return std::isinf(x) ? std::copysign(pi / 2, x) : 2.0 * std::atan(std::tanh(x / 2.0));
    }
    if (catalog_ == "cos") {
      if (A) return std::sin(x);
      if (std::abs(x) >= pi / 2) return std::copysign(kInf, x);
      return 2.0 * std::atanh(std::tan(x / 2.0));
    }
    if (catalog_ == "exp") return A ? std::exp(x) : -std::exp(-x);
    // power t^p on t >= 0
    const double e = A ? param_ + 1.0 : 1.0 - param_;
    if (x == 0.0) return e > 0 ? 0.0 : -kInf;
    if (e == 0.0) return std::log(x);
    return std::pow(x, e) / e;
  };
  return P(t) - P(origin_);
}

double WarpingProfile::quad(Quadrature which, double t, double t_ref) const {
  for (double s : {t, t_ref})
    if (s < lo_ || s > hi_ || std::isnan(s)) throw DomainError("quadrature bound outside the warping interval");
  if (t == t_ref) return 0.0;
  if (catalog_.empty() && std::isfinite(t) && std::isfinite(t_ref) && std::abs(t - t_ref) < spacing_ &&
      contains(t) && contains(t_ref)) {
    auto fn = [this, which](double r) { return integrand(which, r); };
    return num::integrate(fn, t_ref, t, tight()).value;
  }
  const double a = primitive(which, t), b = primitive(which, t_ref);
  if (std::isinf(a) && std::isinf(b) && a == b) return 0.0;
  return a - b;
}

double WarpingProfile::quad_invert(Quadrature which, double t_ref, double value) const {
  require(t_ref);
  if (value == 0.0) return t_ref;
  const bool up = value > 0;
  const double limit = quad(which, up ? hi_ : lo_, t_ref);
  if (up ? value >= limit : value <= limit)
    throw RangeError("quadrature value " + std::to_string(value) + " outside the reachable range (limit " +
                         std::to_string(limit) + ")",
                     limit);
  auto g = [&](double t) { return quad(which, t, t_ref) - value; };
  // expand a bracket towards the endpoint
  const double end = up ? hi_ : lo_;
  double a = t_ref, b = t_ref;
  double step = 0.25 * std::min(1.0, std::isfinite(end) ? std::abs(end - t_ref) : 1.0);
  for (int it = 0;; ++it) {
    double next = b + (up ? step : -step);
    if (std::isfinite(end) && (up ? next >= end : next <= end)) next = 0.5 * (b + end);
    if (next == b || it > 4000) throw ConvergenceError("quadrature inversion bracket failed", std::abs(g(b)));
    if ((g(next) > 0) == up) {
      a = b;
      b = next;
      break;
    }
    b = next;
    step *= 2.0;
  }
  if (!up) std::swap(a, b);
  double t = num::brent(g, a, b);
  // Newton polish on the exact derivative of the quadrature
  for (int it = 0; it < 3; ++it) {
    const double r = g(t);
    if (std::abs(r) <= 1e-15 * (1.0 + std::abs(value))) break;
    const double tn = t - r / integrand(which, t);
    if (tn <= std::min(a, b) || tn >= std::max(a, b)) break;
    t = tn;
  }
  const double res = std::abs(g(t));
  if (res > 1e-10 * (1.0 + std::abs(value))) throw ConvergenceError("quadrature inversion inaccurate", res);
  return t;
}

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

void LorentzChart::require(const Vec& p) const {
  if (!contains(p)) throw DomainError("spacetime point outside the chart");
}

Christoffel LorentzChart::christoffel(const Vec& p) const {
  const int n = dim();
  MetricJet jet;
  jet.g = metric(p);
  for (int k = 0; k < n; ++k) jet.deriv.push_back(fd5([this](const Vec& y) { return metric(y); }, p, k, 1e-4));
  return christoffel_from_jet(jet);
}

Riemann LorentzChart::riemann(const Vec& p) const {
  return riemann_from_christoffel([this](const Vec& y) { return christoffel(y); }, p);
}

GrwSpace::GrwSpace(WarpingProfile warping, FibrePtr fibre) : w_(std::move(warping)), F_(std::move(fibre)) {
  if (!F_) throw Error("GRW space needs a fibre");
}

bool GrwSpace::contains(const Vec& p) const {
  return p.size() == dim() && w_.contains(p[0]) && F_->contains(p.tail(F_->dim()));
}

Vec GrwSpace::point(double t, const Vec& x) {
  Vec p(x.size() + 1);
  p[0] = t;
  p.tail(x.size()) = x;
  return p;
}

Vec GrwSpace::zeta(const Vec& p) const {
  Vec z = Vec::Zero(dim());
  z[0] = w_.f(p[0]);
  return z;
}

Mat GrwSpace::metric(const Vec& p) const {
  require(p);
  const int m = F_->dim();
  Mat g = Mat::Zero(m + 1, m + 1);
  const double f = w_.f(p[0]);
  g(0, 0) = -1.0;
  g.bottomRightCorner(m, m) = f * f * F_->metric(p.tail(m));
  return g;
}

Christoffel GrwSpace::christoffel(const Vec& p) const {
  require(p);
  const int m = F_->dim();
  const Vec x = p.tail(m);
  const double f = w_.f(p[0]), fp = w_.d1(p[0]);
  const Mat gF = F_->metric(x);
  const Christoffel GF = F_->christoffel(x);
  Christoffel G(m + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      G(0, 1 + i, 1 + j) = f * fp * gF(i, j);
      for (int k = 0; k < m; ++k) G(1 + k, 1 + i, 1 + j) = GF(k, i, j);
    }
    G(1 + i, 0, 1 + i) = G(1 + i, 1 + i, 0) = fp / f;
  }
  return G;
}

double metric_eval(const GrwSpace& M, const Vec& p, const Vec& U, const Vec& V) {
  M.require(p);
  const int m = M.fibre().dim();
  const double f = M.warping().f(p[0]);
  return -U[0] * V[0] + f * f * metric(M.fibre(), p.tail(m), U.tail(m), V.tail(m));
}

// ---------------------------------------------------------------------------
// Null geodesics
// ---------------------------------------------------------------------------

NullGeodesic::NullGeodesic(const GrwSpace& M, double t_star, Vec x_star, Vec u, Orientation o)
    : M_(&M), t_star_(t_star), x_star_(std::move(x_star)), u_(std::move(u)), o_(o) {
  M.warping().require(t_star_);
  M.fibre().require(x_star_);
  const double len = norm(M.fibre(), x_star_, u_);
  if (std::abs(len - 1.0) > 1e-8) throw DomainError("null geodesic direction must be g_F-unit");
}

double NullGeodesic::alpha(double s) const {
  if (s < 0) throw DomainError("affine parameter must be non-negative");
  return M_->warping().quad_invert(Quadrature::A, t_star_, orientation_sign(o_) * s);
}

double NullGeodesic::fibre_parameter(double s) const {
  return std::abs(M_->warping().quad(Quadrature::C, alpha(s), t_star_));
}

double NullGeodesic::affine_limit() const {
  const auto& w = M_->warping();
  return std::abs(w.quad(Quadrature::A, o_ == Orientation::Future ? w.hi() : w.lo(), t_star_));
}

Vec NullGeodesic::point(double s) const {
  const double t = alpha(s);
  const double b = std::abs(M_->warping().quad(Quadrature::C, t, t_star_));
  if (b > M_->fibre().injectivity_bound(x_star_))
    throw RangeError("null geodesic leaves the fibre normal neighbourhood", s);
  const Vec x = b == 0.0 ? x_star_ : geodesic_at(M_->fibre(), x_star_, u_, b).x;
  return GrwSpace::point(t, x);
}

Vec NullGeodesic::velocity(double s) const {
  const double t = alpha(s);
  const double f = M_->warping().f(t);
  const double b = std::abs(M_->warping().quad(Quadrature::C, t, t_star_));
  if (b > M_->fibre().injectivity_bound(x_star_))
    throw RangeError("null geodesic leaves the fibre normal neighbourhood", s);
  const Vec v = b == 0.0 ? u_ : geodesic_at(M_->fibre(), x_star_, u_, b).v;
  Vec out(v.size() + 1);
  out[0] = orientation_sign(o_) / f;
  out.tail(v.size()) = v / (f * f);
  return out;
}

NullGeodesic null_geodesic_quadrature(const GrwSpace& M, double t_star, const Vec& x_star, const Vec& u,
                                      Orientation o) {
  return NullGeodesic(M, t_star, x_star, u, o);
}

GeodesicRecord chart_geodesic(const LorentzChart& M, const Vec& p, const Vec& V,
                              const std::vector<double>& params, const num::OdeOptions& opts) {
  M.require(p);
  const int n = M.dim();
  GeodesicRecord out;
  if (params.empty()) return out;
  double s_max = 0.0;
  for (double s : params) {
    if (s < 0) throw DomainError("geodesic parameters must be non-negative");
    s_max = std::max(s_max, s);
  }
  Vec y0(2 * n);
  y0 << p, V;
  num::OdeRhs rhs = [&](double, const Vec& y, Vec& dy) {
    dy.resize(2 * n);
    const Vec v = y.tail(n);
    dy.head(n) = v;
    dy.tail(n) = -M.christoffel(y.head(n)).contract(v, v);
  };
  num::OdeGuard guard = [&](double, const Vec& y) { return M.contains(y.head(n)); };
  const auto sol = num::integrate_ode(rhs, 0.0, y0, s_max, opts, guard, params);
  for (double s : params) {
    if (sol.stopped() && s > sol.end()) throw RangeError("geodesic leaves the chart", sol.stop_parameter());
    const Vec y = sol(s);
    out.s.push_back(s);
    out.x.push_back(y.head(n));
    out.v.push_back(y.tail(n));
  }
  return out;
}

GeodesicRecord null_geodesic_numeric(const GrwSpace& M, const Vec& p, const Vec& V,
                                     const std::vector<double>& params, const num::OdeOptions& opts) {
  const double gvv = metric_eval(M, p, V, V);
  if (std::abs(gvv) > 1e-10 * std::max(1.0, V.squaredNorm())) throw DomainError("initial vector is not null");
  return chart_geodesic(M, p, V, params, opts);
}

namespace {

void require_orthonormal(const GrwSpace& M, const Vec& x, const Vec& v, const Vec& w) {
  const auto& F = M.fibre();
  if (std::abs(metric(F, x, v, v) - 1.0) > 1e-8 || std::abs(metric(F, x, w, w) - 1.0) > 1e-8 ||
      std::abs(metric(F, x, v, w)) > 1e-8)
    throw DegenerateError("null plane vectors must be g_F-orthonormal");
}

}  // namespace

double null_sectional_curvature(const GrwSpace& M, const Vec& p, const Vec& v, const Vec& w) {
  M.require(p);
  const Vec x = p.tail(M.fibre().dim());
  require_orthonormal(M, x, v, w);
  const auto& W = M.warping();
  const double t = p[0], f = W.f(t), fp = W.d1(t), fpp = W.d2(t);
  const double KF = sectional_curvature(M.fibre(), x, v, w);
  return (KF + fp * fp - f * fpp) / (f * f);
}

double null_sectional_curvature_tensor(const GrwSpace& M, const Vec& p, const Vec& v, const Vec& w) {
  M.require(p);
  const int m = M.fibre().dim();
  require_orthonormal(M, p.tail(m), v, w);
  const double f = M.warping().f(p[0]);
  Vec V = Vec::Zero(m + 1), U = Vec::Zero(m + 1);
  V.tail(m) = v / f;
  U[0] = -1.0;
  U.tail(m) = w / f;
  const Riemann R = M.riemann(p);
  const Mat g = M.metric(p);
  return V.dot(g * R.apply(V, U, U)) / V.dot(g * V);
}

double conformal_check(const GrwSpace& M, const std::vector<Vec>& grid) {
  double worst = 0.0;
  const int n = M.dim();
  for (const Vec& p : grid) {
    const Mat g = M.metric(p);
    const Vec z = M.zeta(p);
    // (L_zeta g)_ab = zeta^c d_c g_ab + g_cb d_a zeta^c + g_ac d_b zeta^c
    Mat L = Mat::Zero(n, n);
    std::vector<Vec> dz;
    for (int c = 0; c < n; ++c) {
      const double h = fd_step(p[c], 1e-5);
      Vec pp = p, pm = p;
      pp[c] += h;
      pm[c] -= h;
      L += z[c] * (M.metric(pp) - M.metric(pm)) / (2 * h);
      dz.push_back((M.zeta(pp) - M.zeta(pm)) / (2 * h));
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          L(a, b) += g(c, b) * dz[static_cast<std::size_t>(a)][c] + g(a, c) * dz[static_cast<std::size_t>(b)][c];
    const double fp = M.warping().d1(p[0]);
    worst = std::max(worst, (L - 2.0 * fp * g).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace nullkit
