#include "nullkit/jacobi.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nullkit {

double ricci_null(const GrwSpace& M, const Vec& p, const Vec& V) {
  M.require(p);
  if (const auto k = M.fibre().constant_curvature()) {
    const auto& w = M.warping();
    const double t = p[0], f = w.f(t);
    return (M.dim() - 2) * (*k + w.d1(t) * w.d1(t) - f * w.d2(t)) * V[0] * V[0] / (f * f);
  }
  return V.dot(M.ricci(p) * V);
}

std::vector<double> ricci_along(const GrwSpace& M, const NullGeodesic& g, const std::vector<double>& s) {
  std::vector<double> out;
  out.reserve(s.size());
  const bool fast = M.fibre().constant_curvature().has_value();
  for (double si : s) {
    if (fast) {
      // depends on t = alpha(s) only, valid past the fibre cut locus
      const double t = g.alpha(si);
      Vec p = Vec::Zero(M.dim());
      p[0] = t;
      p.tail(M.fibre().dim()) = g.x_star();
      Vec V = Vec::Zero(M.dim());
      V[0] = orientation_sign(g.orientation()) / M.warping().f(t);
      out.push_back(ricci_null(M, p, V));
    } else {
      out.push_back(ricci_null(M, g.point(si), g.velocity(si)));
    }
  }
  return out;
}

ConjugateReport scalar_jacobi(const GrwSpace& M, const NullGeodesic& g, double s_max, const num::OdeOptions& opts) {
  ConjugateReport rep;
  const int n = M.dim();
  const double limit = g.affine_limit();
  rep.s_max = std::min(s_max, limit);
  if (rep.s_max < s_max) {
    std::ostringstream os;
    os << "affine parameter capped at " << limit << " by the end of I; ";
    rep.diagnostics += os.str();
  }
  // the vertex end of a quadrature with a finite limit is reached only asymptotically
  if (rep.s_max == limit) rep.s_max = limit * (1 - 1e-9);
  auto rhs = [&](double s, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy[0] = y[1];
    dy[1] = -ricci_along(M, g, {s})[0] / (n - 2) * y[0];
  };
  Vec y0(2);
  y0 << 0.0, 1.0;
  const auto sol = num::integrate_ode(rhs, 0.0, y0, rep.s_max, opts);
  for (double s : num::sign_changes(sol, [](double, const Vec& y) { return y[0]; })) {
    if (s <= 1e-9) continue;  // J(0) = 0 is not a conjugate point
    rep.zeros.push_back({s, n - 2, std::nullopt});
  }
  return rep;
}

ConsistencyReport umbilic_consistency(const GraphHypersurface& L, const std::vector<Vec>& grid) {
  ConsistencyReport rep;
  const int n = L.dim();
  for (const Vec& x : grid) {
    ConsistencySample c;
    c.x = x;
    c.rho_route = null_sectional_from_rho(L, x);
    c.ricci_route = ricci_null(L.space(), L.point(x), xi_field(L, x)) / (n - 2);
    rep.max_residual = std::max(rep.max_residual, std::abs(c.rho_route - c.ricci_route));
    rep.samples.push_back(c);
  }
  return rep;
}

namespace {

struct Layout {
  int n, k;
  int x() const { return 0; }
  int v() const { return n; }
  int frame() const { return 2 * n; }
  int Y() const { return 2 * n + n * k; }
  int dY() const { return Y() + k * k; }
  int size() const { return dY() + k * k; }
};

Mat block(const Vec& y, int offset, int rows, int cols) {
  return Eigen::Map<const Mat>(y.data() + offset, rows, cols);
}

Mat jacobi_operator(const GrwSpace& M, const Vec& x, const Vec& V, const Mat& E) {
  const Riemann R = M.riemann(x);
  const Mat g = M.metric(x);
  const int k = static_cast<int>(E.cols());
  Mat A(k, k);
  for (int j = 0; j < k; ++j) {
    const Vec RJ = R.apply(E.col(j), V, V);
    for (int i = 0; i < k; ++i) A(i, j) = E.col(i).dot(g * RJ);
  }
  return 0.5 * (A + A.transpose());
}

}  // namespace

FullJacobiReport full_jacobi_system(const GrwSpace& M, const Vec& p0, const Vec& V0, double s_max,
                                    const FullJacobiOptions& opts) {
  M.require(p0);
  const int n = M.dim(), m = n - 1, k = n - 2;
  if (std::abs(metric_eval(M, p0, V0, V0)) > 1e-10 * std::max(1.0, V0.squaredNorm()))
    throw DomainError("initial vector is not null");
  const Layout lay{n, k};

  // screen at p0: (0, e_i / f) with e_i g_F-orthonormal to the fibre part of V0
  const Vec x0 = p0.tail(m);
  const Mat e = orthonormal_complement(M.fibre().metric(x0), V0.tail(m));
  if (e.cols() != k) throw DegenerateError("screen frame propagation failed at the start");
  Mat E0 = Mat::Zero(n, k);
  E0.bottomRows(m) = e / M.warping().f(p0[0]);

  Vec y0 = Vec::Zero(lay.size());
  y0.segment(lay.x(), n) = p0;
  y0.segment(lay.v(), n) = V0;
  Eigen::Map<Mat>(y0.data() + lay.frame(), n, k) = E0;
  Eigen::Map<Mat>(y0.data() + lay.dY(), k, k) = Mat::Identity(k, k);

  auto rhs = [&](double, const Vec& y, Vec& dy) {
    dy.resize(lay.size());
    const Vec x = y.segment(lay.x(), n), V = y.segment(lay.v(), n);
    const Mat E = block(y, lay.frame(), n, k);
    const Christoffel G = M.christoffel(x);
    dy.segment(lay.x(), n) = V;
    dy.segment(lay.v(), n) = -G.contract(V, V);
    Mat dE(n, k);
    for (int j = 0; j < k; ++j) dE.col(j) = -G.contract(V, E.col(j));
    Eigen::Map<Mat>(dy.data() + lay.frame(), n, k) = dE;
    const Mat A = jacobi_operator(M, x, V, E);
    Eigen::Map<Mat>(dy.data() + lay.Y(), k, k) = block(y, lay.dY(), k, k);
    Eigen::Map<Mat>(dy.data() + lay.dY(), k, k) = -A * block(y, lay.Y(), k, k);
  };
  auto guard = [&](double, const Vec& y) { return M.contains(y.segment(lay.x(), n)); };
  const auto sol = num::integrate_ode(rhs, 0.0, y0, s_max, opts.ode, guard);
  if (sol.stopped()) throw RangeError("frame propagation left the chart", sol.stop_parameter());

  FullJacobiReport rep;
  auto sigma = [&](double s) {
    const Vec y = sol(s);
    return Eigen::JacobiSVD<Mat>(block(y, lay.Y(), k, k)).singularValues().eval();
  };
  std::vector<double> smin;
  for (int i = 0; i <= opts.probes; ++i) {
    const double s = s_max * i / opts.probes;
    const Vec y = sol(s);
    const Vec x = y.segment(lay.x(), n), V = y.segment(lay.v(), n);
    const Mat A = jacobi_operator(M, x, V, block(y, lay.frame(), n, k));
    const double tr = A.trace();
    const Mat dev = A - tr / k * Mat::Identity(k, k);
    const Eigen::SelfAdjointEigenSolver<Mat> es(dev, Eigen::EigenvaluesOnly);
    rep.proportionality_residual = std::max(rep.proportionality_residual, es.eigenvalues().cwiseAbs().maxCoeff());
    rep.s.push_back(s);
    rep.op.push_back(A);
    rep.trace.push_back(tr);
    smin.push_back(sigma(s).minCoeff());
  }

  // interior local minima of sigma_min, refined by golden section
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 1; i < opts.probes; ++i) {
    if (!(smin[i] < smin[i - 1] && smin[i] <= smin[i + 1])) continue;
    double a = rep.s[i - 1], b = rep.s[i + 1];
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = sigma(c).minCoeff(), fd = sigma(d).minCoeff();
    while (b - a > 1e-12) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = sigma(c).minCoeff();
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = sigma(d).minCoeff();
      }
    }
    const double sc = 0.5 * (a + b);
    const Vec sv = sigma(sc);
    if (sv.minCoeff() > opts.zero_threshold) continue;
    ConjugatePoint z;
    z.s = sc;
    z.kernel_rank = static_cast<int>((sv.array() < opts.kernel_threshold).count());
    z.multiplicity = *z.kernel_rank;
    rep.zeros.push_back(z);
  }
  return rep;
}

}  // namespace nullkit
