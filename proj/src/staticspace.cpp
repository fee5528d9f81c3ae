#include "nullkit/staticspace.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nullkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// phi^p with chain-rule derivatives.
ScalarField power_of(const ScalarField& phi, double p) {
  return ScalarField::from_parts(
      phi.dim(), [phi, p](const Vec& x) { return std::pow(phi.value(x), p); },
      [phi, p](const Vec& x) { return Vec(p * std::pow(phi.value(x), p - 1) * phi.gradient(x)); },
      [phi, p](const Vec& x) {
        const double v = phi.value(x);
        const Vec g = phi.gradient(x);
        return Mat(p * (p - 1) * std::pow(v, p - 2) * g * g.transpose() + p * std::pow(v, p - 1) * phi.hessian(x));
      });
}

ScalarField affine_in_s(int dim, double slope, double offset) {
  return ScalarField::from_parts(
      dim, [slope, offset](const Vec& x) { return slope * x[0] + offset; },
      [dim, slope](const Vec&) {
        Vec g = Vec::Zero(dim);
        g[0] = slope;
        return g;
      },
      [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); });
}

/// Function of s lifted to (s, z).
ScalarField lift(int dim, std::function<double(double, int)> f) {
  return ScalarField::from_parts(
      dim, [f](const Vec& x) { return f(x[0], 0); },
      [dim, f](const Vec& x) {
        Vec g = Vec::Zero(dim);
        g[0] = f(x[0], 1);
        return g;
      },
      [dim, f](const Vec& x) {
        Mat H = Mat::Zero(dim, dim);
        H(0, 0) = f(x[0], 2);
        return H;
      });
}

}  // namespace

// ---------------------------------------------------------------------------
// Chart
// ---------------------------------------------------------------------------

StaticChart::StaticChart(FibrePtr fibre, ScalarField phi) : F_(std::move(fibre)), phi_(std::move(phi)) {
  if (!F_) throw Error("static chart needs a fibre");
  if (phi_.dim() != F_->dim()) throw Error("static potential has the wrong number of variables");
}

bool StaticChart::contains(const Vec& p) const {
  if (p.size() != dim()) return false;
  const Vec x = p.tail(F_->dim());
  return F_->contains(x) && phi_.value(x) > 0;
}

Mat StaticChart::metric(const Vec& p) const {
  const int m = F_->dim();
  const Vec x = p.tail(m);
  const double ph = phi_.value(x);
  if (!(ph > 0)) throw DomainError("static potential must be positive");
  Mat g = Mat::Zero(m + 1, m + 1);
  g(0, 0) = -ph * ph;
  g.bottomRightCorner(m, m) = F_->metric(x);
  return g;
}

Christoffel StaticChart::christoffel(const Vec& p) const {
  const int m = F_->dim(), n = m + 1;
  const Vec x = p.tail(m);
  const double ph = phi_.value(x);
  const Vec dph = phi_.gradient(x);
  const Christoffel GF = F_->christoffel(x);
  const Mat ginv = F_->metric(x).inverse();
  const Vec up = ginv * dph;
  Christoffel G(n);
  for (int i = 0; i < m; ++i) {
    G(0, 0, i + 1) = G(0, i + 1, 0) = dph[i] / ph;
    G(i + 1, 0, 0) = ph * up[i];
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) G(i + 1, j + 1, k + 1) = GF(i, j, k);
  }
  return G;
}

std::shared_ptr<const StaticChart> StaticModel::chart() const { return std::make_shared<StaticChart>(fibre, phi); }

FibrePtr StaticModel::conformal_fibre() const { return std::make_shared<ConformalFibre>(fibre, power_of(phi, -2.0)); }

std::shared_ptr<const GrwSpace> StaticModel::conformal_space() const {
  return std::make_shared<GrwSpace>(WarpingProfile::constant(1.0, -kInf, kInf), conformal_fibre());
}

GraphHypersurface conformal_graph(const StaticModel& S, const ScalarField& h) {
  return GraphHypersurface(S.conformal_space(), h);
}

// ---------------------------------------------------------------------------
// Second fundamental forms
// ---------------------------------------------------------------------------

Vec static_xi(const StaticModel& S, const ScalarField& h, const Vec& x) {
  const double ph = S.phi.value(x);
  const Vec grad = ph * ph * S.fibre->metric(x).ldlt().solve(h.gradient(x));
  Vec xi(x.size() + 1);
  xi[0] = -1.0;
  xi.tail(x.size()) = -grad;
  return xi;
}

Mat static_screen(const StaticModel& S, const ScalarField& h, const Vec& x) {
  const Mat gF = S.fibre->metric(x);
  const Vec grad = gF.ldlt().solve(h.gradient(x));
  const Mat e = orthonormal_complement(gF, grad);
  Mat out = Mat::Zero(x.size() + 1, e.cols());
  out.bottomRows(x.size()) = e;
  return out;
}

Mat static_b_star(const StaticModel& S, const ScalarField& h, const Vec& x, const Mat& frame) {
  const int m = static_cast<int>(x.size());
  const auto chart = S.chart();
  const Vec p = GrwSpace::point(h.value(x), x);
  chart->require(p);
  const Mat g = chart->metric(p);
  const Christoffel G = chart->christoffel(p);
  const Vec xi = static_xi(S, h, x);
  const int k = static_cast<int>(frame.cols());
  Mat B(k, k);
  for (int a = 0; a < k; ++a) {
    const Vec X = frame.col(a);
    const Vec XF = X.tail(m);
    const double step = 1e-3 / XF.cwiseAbs().maxCoeff();
    const Vec D = fd5_scalar([&](double e) { return static_xi(S, h, Vec(x + e * XF)); }, 0.0, step);
    const Vec cov = D + G.contract(X, xi);
    for (int b = 0; b < k; ++b) B(a, b) = -frame.col(b).dot(g * cov);
  }
  return 0.5 * (B + B.transpose());
}

double static_mean_curvature(const StaticModel& S, const ScalarField& h, const Vec& x) {
  return static_b_star(S, h, x, static_screen(S, h, x)).trace();
}

Mat conformal_B_transform(const Mat& b_star, double xi_ln_phi, double phi, const Mat& gram_star) {
  if (!(phi > 0)) throw DomainError("static potential must be positive");
  return (b_star + xi_ln_phi * gram_star) / (phi * phi);
}

double conformal_H_transform(double h_star, double xi_ln_phi, int n) { return h_star + (n - 2) * xi_ln_phi; }

double static_xi_ln_phi(const StaticModel& S, const ScalarField& h, const Vec& x) {
  const Vec xi = static_xi(S, h, x);
  return xi.tail(x.size()).dot(S.phi.gradient(x)) / S.phi.value(x);
}

// ---------------------------------------------------------------------------
// Construction and duals
// ---------------------------------------------------------------------------

double StaticConstruction::mean_curvature_formula(const Vec& x) const {
  const int n = model.fibre->dim() + 1;
  const Vec z = x.tail(x.size() - 1);
  const double rate = decomposition.mu_s(x[0], z) / decomposition.mu_at(x[0], z) +
                      potential.gradient(x)[0] / potential.value(x);
  return (dual ? -1.0 : 1.0) * (n - 2) * rate;
}

StaticConstruction static_umbilic_construct(const TwistedDecomposition& D, const ScalarField& phi, double t0,
                                            bool dual) {
  StaticConstruction out;
  out.decomposition = D;
  out.potential = phi;
  out.t0 = t0;
  out.dual = dual;
  out.model.fibre = std::make_shared<ConformalFibre>(D.fibre(), power_of(phi, 2.0));
  out.model.phi = phi;
  out.h = affine_in_s(phi.dim(), dual ? -1.0 : 1.0, t0);
  return out;
}

StaticConstruction static_dual(const StaticConstruction& L) {
  return static_umbilic_construct(L.decomposition, L.potential, L.t0, !L.dual);
}

ScalarField static_dual_graph(const ScalarField& h, const Vec& x0) {
  const double t0 = h.value(x0);
  return ScalarField::from_parts(
      h.dim(), [h, t0](const Vec& x) { return 2 * t0 - h.value(x); },
      [h](const Vec& x) { return Vec(-h.gradient(x)); }, [h](const Vec& x) { return Mat(-h.hessian(x)); });
}

// ---------------------------------------------------------------------------
// Radial family
// ---------------------------------------------------------------------------

RadialStaticFamily RadialStaticFamily::parse(const std::string& text, double r_lo, double r_hi,
                                             const std::map<std::string, double>& params) {
  if (!(r_lo < r_hi)) throw Error("radial interval must be non-empty");
  return {Function1D::parse(text, "r", params), r_lo, r_hi};
}

RadialProfile::RadialProfile(RadialStaticFamily fam, double r0, double s_lo, double s_hi, double horizon)
    : fam_(std::move(fam)), r0_(r0), lo_(s_lo), hi_(s_hi) {
  if (!(r0 > fam_.r_lo && r0 < fam_.r_hi)) throw DomainError("r0 must lie inside the radial interval");
  if (!(fam_.h(r0) > horizon)) throw DomainError("h(r0) must be positive");
  if (!(s_lo <= 0 && s_hi >= 0)) throw Error("profile interval must contain 0");
  auto rhs = [this](double, const Vec& y, Vec& dy) {
    dy.resize(1);
    dy[0] = fam_.h(y[0]);
  };
  auto guard = [this, horizon](double, const Vec& y) {
    return y[0] > fam_.r_lo && y[0] < fam_.r_hi && fam_.h(y[0]) > horizon;
  };
  const Vec y0 = Vec::Constant(1, r0);
  std::ostringstream rep;
  fwd_ = num::integrate_ode(rhs, 0.0, y0, s_hi, {}, guard);
  back_ = num::integrate_ode(rhs, 0.0, y0, s_lo, {}, guard);
  if (fwd_.stopped()) {
    truncated_ = true;
    hi_ = fwd_.end();
    rep << "forward integration stopped at s = " << fwd_.stop_parameter() << " (r = " << fwd_(hi_)[0]
        << "): horizon or end of the radial interval, exterior only; ";
  }
  if (back_.stopped()) {
    truncated_ = true;
    lo_ = back_.end();
    rep << "backward integration stopped at s = " << back_.stop_parameter() << " (r = " << back_(lo_)[0]
        << "): horizon or end of the radial interval, exterior only; ";
  }
  report_ = rep.str();
}

double RadialProfile::r(double s) const {
  if (s < lo_ || s > hi_) throw DomainError("s outside the integrated profile");
  return s >= 0 ? fwd_(s)[0] : back_(s)[0];
}

double RadialProfile::r_derivative(int order, double s) const {
  const double p = r(s);
  const auto& h = fam_.h;
  switch (order) {
    case 0: return p;
    case 1: return h(p);
    case 2: return h.d1(p) * h(p);
    case 3: return h.d2(p) * h(p) * h(p) + h.d1(p) * h.d1(p) * h(p);
    default: throw Error("profile derivatives are available through third order");
  }
}

double RadialProfile::mu(double s, int order) const {
  const double p = r(s);
  const auto& H = fam_.h;
  const double h = H(p), h1 = H.d1(p), h2 = H.d2(p), h3 = H.d3(p);
  // u = h^{-1/2}, m(r) = r u(r), mu(s) = m(phi(s))
  const double u = 1 / std::sqrt(h);
  const double u1 = -0.5 * u * u * u * h1;
  const double u2 = 0.75 * std::pow(h, -2.5) * h1 * h1 - 0.5 * std::pow(h, -1.5) * h2;
  const double u3 = -15.0 / 8.0 * std::pow(h, -3.5) * h1 * h1 * h1 + 9.0 / 4.0 * std::pow(h, -2.5) * h1 * h2 -
                    0.5 * std::pow(h, -1.5) * h3;
  const double m0 = p * u, m1 = u + p * u1, m2 = 2 * u1 + p * u2, m3 = 3 * u2 + p * u3;
  switch (order) {
    case 0: return m0;
    case 1: return m1 * h;
    case 2: return (m2 * h + m1 * h1) * h;
    case 3: return h * (m3 * h * h + 3 * m2 * h * h1 + m1 * (h * h2 + h1 * h1));
    default: throw Error("mu derivatives are available through third order");
  }
}

double RadialProfile::potential(double s) const { return std::sqrt(fam_.h(r(s))); }

Function1D RadialProfile::mu_function() const {
  auto self = std::make_shared<RadialProfile>(*this);
  return Function1D::from_derivatives([self](double s) { return self->mu(s, 0); },
                                      [self](double s) { return self->mu(s, 1); },
                                      [self](double s) { return self->mu(s, 2); },
                                      [self](double s) { return self->mu(s, 3); });
}

double RadialProfile::pullback_residual(const std::vector<double>& s_values) const {
  double worst = 0.0;
  for (double s : s_values) {
    const double p = r(s), h = fam_.h(p);
    const double step = 1e-3 * std::min(1.0, 0.25 * std::min(s - lo_, hi_ - s));
    const double dp = fd5_scalar([this](double q) { return r(q); }, s, step);
    const double mu_v = mu(s);
    worst = std::max({worst, std::abs(dp * dp / (h * h) - 1.0), std::abs(p * p / h - mu_v * mu_v) / (mu_v * mu_v)});
  }
  return worst;
}

RadialStaticData radial_static_data(const RadialProfile& P) {
  auto prof = std::make_shared<RadialProfile>(P);
  const double R = P.leaf_radius();
  RadialStaticData out;
  auto& D = out.decomposition;
  D.a = P.s_lo();
  D.b = P.s_hi();
  D.leaf = std::make_shared<SphereFibre>(2, R);
  D.mu = lift(3, [prof, R](double s, int k) { return prof->mu(s, k) / R; });
  Vec z0(2);
  z0 << 1.2, 0.3;
  D.z0 = z0;
  D.leaf_samples = {z0};
  out.potential = lift(3, [prof](double s, int k) {
    const double p = prof->r(s);
    const auto& H = prof->family().h;
    const double h = H(p), h1 = H.d1(p), h2 = H.d2(p);
    switch (k) {
      case 0: return std::sqrt(h);
      case 1: return 0.5 * std::sqrt(h) * h1;
      default: return 0.5 * (0.5 * h1 * h1 / std::sqrt(h) + std::sqrt(h) * h2) * h;
    }
  });
  return out;
}

UniquenessCertificate uniqueness_certificate(const RadialStaticFamily& fam, double r_a, double r_b,
                                             const CertificateOptions& opts) {
  if (!(r_a < r_b)) throw Error("certificate range must be non-empty");
  if (!(opts.eps_int > 0) || !(opts.h3_tol > 0)) throw Error("certificate tolerances must be positive");
  UniquenessCertificate out;
  const double step = opts.eps_int / 8;
  const int count = static_cast<int>(std::ceil((r_b - r_a) / step));
  double run_start = kInf;
  bool positive = true;
  for (int i = 0; i <= count; ++i) {
    const double r = std::min(r_a + i * step, r_b);
    const double h3 = fam.h.d3(r);
    out.samples.push_back({r, h3});
    if (!(fam.h(r) > 0)) positive = false;
    if (std::abs(h3) < opts.h3_tol) {
      if (!std::isfinite(run_start)) run_start = r;
      out.longest_flat = std::max(out.longest_flat, r - run_start);
    } else {
      run_start = kInf;
    }
  }

  // identity (mu''/mu)' = -h^2 h'''/2 along a profile through the middle of the range
  const double r0 = 0.5 * (r_a + r_b);
  if (positive) {
    const RadialProfile P(fam, r0, -opts.identity_half_width, opts.identity_half_width);
    for (int i = 0; i <= 40; ++i) {
      const double s = P.s_lo() + (P.s_hi() - P.s_lo()) * i / 40.0;
      const double m0 = P.mu(s, 0), m1 = P.mu(s, 1), m2 = P.mu(s, 2), m3 = P.mu(s, 3);
      const double lhs = (m3 * m0 - m2 * m1) / (m0 * m0);
      const double p = P.r(s), h = fam.h(p);
      out.identity_residual = std::max(out.identity_residual, std::abs(lhs + 0.5 * h * h * fam.h.d3(p)));
    }
  }

  std::ostringstream v;
  if (!positive) {
    v << "refused: h is not positive on the range (outside the static region)";
  } else if (out.longest_flat > opts.eps_int) {
    v << "refused: |h'''| < " << opts.h3_tol << " on an interval of length " << out.longest_flat
      << "; constant curvature cannot be excluded";
  } else {
    out.exactly_two = true;
    v << "exactly two";
  }
  out.verdict = v.str();
  return out;
}

UniquenessProbe sphere_leaf_constant_curvature_guard(const Function1D& mu, const std::vector<double>& s_values,
                                                     double tol) {
  return sphere_warped_uniqueness_probe(mu, s_values, tol);
}

}  // namespace nullkit
