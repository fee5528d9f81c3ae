#include "nullkit/nullhyp.hpp"

#include "nullkit/parallel.hpp"

#include <cmath>

namespace nullkit {

GraphHypersurface::GraphHypersurface(std::shared_ptr<const GrwSpace> space, ScalarField h, Domain domain)
    : M_(std::move(space)), h_(std::move(h)), domain_(std::move(domain)) {
  if (!M_) throw Error("graph hypersurface needs a space");
  if (h_.dim() != M_->fibre().dim()) throw Error("graph function dimension does not match the fibre");
}

bool GraphHypersurface::in_domain(const Vec& x) const {
  return M_->fibre().contains(x) && (!domain_ || domain_(x));
}

double GraphHypersurface::height(const Vec& x) const {
  if (!in_domain(x)) throw DomainError("point outside the graph domain");
  const double t = h_.value(x);
  if (!M_->warping().contains(t)) throw DomainError("graph leaves the time interval at h = " + std::to_string(t));
  return t;
}

namespace {

struct LocalData {
  double t, f, fp;
  Vec grad;  // g_F-sharp of dh
  Mat gF;
};

LocalData local(const GraphHypersurface& L, const Vec& x) {
  LocalData d;
  d.t = L.height(x);
  d.f = L.space().warping().f(d.t);
  d.fp = L.space().warping().d1(d.t);
  d.gF = L.space().fibre().metric(x);
  d.grad = d.gF.ldlt().solve(L.h().gradient(x));
  return d;
}

ResidualReport collect(const std::vector<Vec>& grid, const std::function<double(const Vec&)>& fn) {
  ResidualReport r;
  r.residuals.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) { r.residuals[i] = fn(grid[i]); });
  for (double v : r.residuals) r.max_residual = std::max(r.max_residual, v);
  return r;
}

}  // namespace

ResidualReport validate_null_graph(const GraphHypersurface& L, const std::vector<Vec>& grid) {
  return collect(grid, [&](const Vec& x) {
    const LocalData d = local(L, x);
    return std::abs(std::sqrt(d.grad.dot(d.gF * d.grad)) - d.f);
  });
}

ResidualReport radial_identity_check(const GraphHypersurface& L, const std::vector<Vec>& grid) {
  return collect(grid, [&](const Vec& x) {
    const LocalData d = local(L, x);
    // nabla_X grad h = sharp of Hess h(X, .)
    const Mat H = hessian(L.space().fibre(), L.h(), x);
    const Vec lhs = d.gF.ldlt().solve(H * d.grad);
    const Vec r = lhs - d.f * d.fp * d.grad;
    return std::sqrt(r.dot(d.gF * r));
  });
}

Vec xi_field(const GraphHypersurface& L, const Vec& x) {
  const LocalData d = local(L, x);
  Vec xi(L.dim());
  xi[0] = -1.0 / d.f;
  xi.tail(d.grad.size()) = -d.grad / (d.f * d.f * d.f);
  return xi;
}

Mat screen_basis(const GraphHypersurface& L, const Vec& x, std::mt19937_64* rng) {
  const LocalData d = local(L, x);
  if (std::sqrt(d.grad.dot(d.gF * d.grad)) < 1e-12) throw DegenerateError("graph gradient vanishes");
  const Mat g = d.f * d.f * d.gF;
  Mat frame = orthonormal_complement(g, d.grad);
  const int k = static_cast<int>(frame.cols());
  if (rng && k > 1) {
    std::normal_distribution<double> N;
    Mat A(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) A(i, j) = N(*rng);
    Eigen::HouseholderQR<Mat> qr(A);
    frame = frame * Mat(qr.householderQ());
  }
  Mat out = Mat::Zero(L.dim(), k);
  out.bottomRows(frame.rows()) = frame;
  return out;
}

double second_fundamental_form(const GraphHypersurface& L, const Vec& x, const Vec& X, const Vec& Y) {
  const LocalData d = local(L, x);
  const int m = static_cast<int>(x.size());
  const Vec Xf = X.tail(m), Yf = Y.tail(m);
  const Mat H = hessian(L.space().fibre(), L.h(), x);
  return d.fp / (d.f * d.f) * (d.f * d.f * Xf.dot(d.gF * Yf)) + Xf.dot(H * Yf) / d.f;
}

Mat second_fundamental_matrix(const GraphHypersurface& L, const Vec& x, const Mat& frame) {
  const LocalData d = local(L, x);
  const int m = static_cast<int>(x.size());
  const Mat E = frame.bottomRows(m);
  const Mat H = hessian(L.space().fibre(), L.h(), x);
  Mat B = d.fp * (E.transpose() * d.gF * E) + E.transpose() * H * E / d.f;
  return 0.5 * (B + B.transpose());
}

double second_fundamental_form_connection(const GraphHypersurface& L, const Vec& x, const Vec& X, const Vec& Y) {
  const int m = static_cast<int>(x.size());
  const Vec Xf = X.tail(m);
  const double scale = Xf.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const double eps = 1e-3 / scale;
  const Vec dxi = fd5_scalar([&](double e) { return xi_field(L, Vec(x + e * Xf)); }, 0.0, eps);
  const Vec p = L.point(x);
  const Vec xi = xi_field(L, x);
  const Vec nabla = dxi + L.space().christoffel(p).contract(X, xi);
  return -nabla.dot(L.space().metric(p) * Y);
}

double mean_curvature(const GraphHypersurface& L, const Vec& x) {
  return second_fundamental_matrix(L, x, screen_basis(L, x)).trace();
}

double umbilic_factor(const GraphHypersurface& L, const Vec& x) {
  if (L.dim() < 3) throw Error("screen is empty in dimension below three");
  return mean_curvature(L, x) / (L.dim() - 2);
}

UmbilicityReport umbilicity_test(const GraphHypersurface& L, const std::vector<Vec>& grid, std::uint64_t seed,
                                 double tolerance, int pairs) {
  if (!(tolerance > 0)) throw Error("umbilicity tolerance must be positive");
  UmbilicityReport rep;
  rep.tolerance = tolerance;
  rep.samples.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const Vec& x = grid[i];
    std::mt19937_64 rng(item_seed(seed, i));
    const Mat frame = screen_basis(L, x);
    const Mat B = second_fundamental_matrix(L, x, frame);
    const int k = static_cast<int>(B.rows());
    UmbilicitySample s;
    s.x = x;
    s.rho = B.trace() / k;
    const Mat D = B - s.rho * Mat::Identity(k, k);
    // symmetric: spectral norm is the largest |eigenvalue|
    s.residual = Eigen::SelfAdjointEigenSolver<Mat>(D).eigenvalues().cwiseAbs().maxCoeff();
    std::normal_distribution<double> N;
    for (int q = 0; q < pairs; ++q) {
      Vec a(k), b(k);
      for (int j = 0; j < k; ++j) {
        a[j] = N(rng);
        b[j] = N(rng);
      }
      a.normalize();
      b.normalize();
      s.sampled_residual = std::max(s.sampled_residual, std::abs(a.dot(D * b)));
    }
    rep.samples[i] = s;
  });
  for (const auto& s : rep.samples) rep.max_residual = std::max(rep.max_residual, s.residual);
  rep.umbilic = rep.max_residual <= tolerance;
  return rep;
}

double null_sectional_from_rho(const GraphHypersurface& L, const Vec& x, double step) {
  const int m = static_cast<int>(x.size());
  const Vec xi_f = xi_field(L, x).tail(m);
  const double scale = xi_f.cwiseAbs().maxCoeff();
  const double eps = step / scale;
  double xi_rho;
  try {
    xi_rho = fd5_scalar([&](double e) { return umbilic_factor(L, Vec(x + e * xi_f)); }, 0.0, eps);
  } catch (const DomainError& e) {
    throw DomainError(std::string("insufficient neighbourhood for the xi-derivative: ") + e.what());
  }
  const double rho = umbilic_factor(L, x);
  return xi_rho - rho * rho;
}

}  // namespace nullkit
