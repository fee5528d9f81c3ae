#include "nullkit/twist.hpp"

#include "nullkit/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace nullkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const TwistedFibre& require_twisted(const GrwSpace& M) {
  const auto* T = dynamic_cast<const TwistedFibre*>(&M.fibre());
  if (!T) throw Error("construction needs a twisted-product fibre");
  return *T;
}

/// Unit direction of grad h in g_F.
Vec flow_direction(const GraphHypersurface& L, const Vec& x) {
  const auto& F = L.space().fibre();
  const Vec g = gradient(F, L.h(), x);
  const double n = norm(F, x, g);
  if (n < 1e-14) throw DegenerateError("graph gradient vanishes along the flow");
  return g / n;
}

/// d ln mu / ds = H f(h)^2/(n-2) - f'(h).
double log_mu_rate(const GraphHypersurface& L, const Vec& x) {
  const auto& w = L.space().warping();
  const double h = L.h().value(x);
  const double f = w.f(h);
  return mean_curvature(L, x) * f * f / (L.dim() - 2) - w.d1(h);
}

// 4-point Lagrange weights on a uniform grid, stencil clamped to the ends.
struct Stencil {
  int first = 0;
  std::array<double, 4> w{};
  std::array<double, 4> dw{};
};

Stencil lagrange(double lo, double step, int count, double x) {
  Stencil st;
  const double u = (x - lo) / step;
  st.first = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, count - 4);
  std::array<double, 4> nodes;
  for (int i = 0; i < 4; ++i) nodes[i] = st.first + i;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0, dw = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      const double denom = nodes[i] - nodes[j];
      double prod = 1.0 / denom;
      for (int k = 0; k < 4; ++k)
        if (k != i && k != j) prod *= (u - nodes[k]) / (nodes[i] - nodes[k]);
      dw += prod;
      w *= (u - nodes[j]) / denom;
    }
    st.w[i] = w;
    st.dw[i] = dw / step;
  }
  return st;
}

/// Shared state of a reconstruction; closures in the decomposition hold it.
struct Chart {
  GraphHypersurface L;
  Vec x0;
  double t0 = 0.0;
  Mat basis;  // m x (m-1), g_F-orthonormal, orthogonal to grad h at x0
  double half_width = 0.0;
  int nodes = 0;
  num::OdeOptions ode;

  std::vector<double> s_grid;
  std::vector<FlowLineRecord> lines;  // node-major, last leaf index fastest

  int leaf_dim() const { return static_cast<int>(basis.cols()); }
  double z_step() const { return 2 * half_width / (nodes - 1); }

  Vec leaf_point(const Vec& z) const {
    Vec y = x0 + basis * z;
    const auto& F = L.space().fibre();
    for (int it = 0; it < 50; ++it) {
      const double r = L.h().value(y) - t0;
      if (std::abs(r) <= 1e-14 * (1 + std::abs(t0))) return y;
      const Vec g = gradient(F, L.h(), y);
      y -= r * g / L.h().gradient(y).dot(g);
    }
    throw ConvergenceError("anchor-leaf projection did not converge", std::abs(L.h().value(y) - t0));
  }

  Mat leaf_metric(const Vec& z) const {
    const int k = leaf_dim();
    Mat J(x0.size(), k);
    for (int i = 0; i < k; ++i) J.col(i) = fd5([this](const Vec& q) { return leaf_point(q); }, z, i);
    const Mat G = J.transpose() * L.space().fibre().metric(leaf_point(z)) * J;
    return 0.5 * (G + G.transpose());
  }

  num::DenseSolution flow(const Vec& x, double s1, bool with_mu) const {
    const int m = static_cast<int>(x.size());
    Vec y0(with_mu ? m + 1 : m);
    y0.head(m) = x;
    if (with_mu) y0[m] = 0.0;
    auto rhs = [this, m, with_mu](double, const Vec& y, Vec& dy) {
      const Vec p = y.head(m);
      dy.resize(y.size());
      dy.head(m) = flow_direction(L, p);
      if (with_mu) dy[m] = log_mu_rate(L, p);
    };
    const auto& F = L.space().fibre();
    double last = 0.0;  // last admissible parameter
    auto guard = [this, &F, m, &last](double s, const Vec& y) {
      const Vec p = y.head(m);
      if (!F.contains(p) || !L.in_domain(p)) return false;
      if (!L.space().warping().contains(L.h().value(p))) return false;
      last = s;
      return true;
    };
    std::vector<double> breaks;
    if (with_mu)
      for (double s : s_grid)
        if ((s1 > 0 && s > 0 && s < s1) || (s1 < 0 && s < 0 && s > s1)) breaks.push_back(s);
    if (s1 < 0) std::reverse(breaks.begin(), breaks.end());
    num::DenseSolution sol;
    try {
      sol = num::integrate_ode(rhs, 0.0, y0, s1, ode, guard, breaks);
    } catch (const DomainError&) {
      // a trial stage left the domain before the guard saw an exit
      throw RangeError("flow line of E leaves the working domain", last);
    }
    if (sol.stopped()) throw RangeError("flow line of E leaves the working domain", sol.stop_parameter());
    return sol;
  }

  Vec to_fibre(double s, const Vec& z) const {
    const Vec x = leaf_point(z);
    if (s == 0.0) return x;
    return flow(x, s, false)(s);
  }

  std::size_t segment(double s) const {
    if (s < s_grid.front() - 1e-12 || s > s_grid.back() + 1e-12)
      throw DomainError("s outside the reconstructed base interval");
    auto it = std::upper_bound(s_grid.begin(), s_grid.end(), s);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - s_grid.begin() - 1, 0));
    return std::min(i, s_grid.size() - 2);
  }

  /// ln mu and its s-derivative on one flow line.
  std::pair<double, double> line_log_mu(std::size_t node, std::size_t seg, double s) const {
    const auto& r = lines[node];
    const double x0 = s_grid[seg], x1 = s_grid[seg + 1];
    return {num::hermite(x0, x1, r.log_mu[seg], r.log_mu[seg + 1], r.dlog_mu[seg], r.dlog_mu[seg + 1], s),
            num::hermite_derivative(x0, x1, r.log_mu[seg], r.log_mu[seg + 1], r.dlog_mu[seg], r.dlog_mu[seg + 1],
                                    s)};
  }

  /// ln mu, d/ds and d/dz_i of ln mu at (s, z) by tensor Lagrange in z.
  Vec log_mu_jet(double s, const Vec& z) const {
    const int k = leaf_dim();
    const std::size_t seg = segment(s);
    std::vector<Stencil> st;
    for (int i = 0; i < k; ++i) st.push_back(lagrange(-half_width, z_step(), nodes, z[i]));
    Vec out = Vec::Zero(k + 2);
    const int combos = 1 << (2 * k);
    for (int c = 0; c < combos; ++c) {
      std::size_t node = 0;
      double w = 1.0;
      Vec dw = Vec::Ones(k);
      for (int i = 0; i < k; ++i) {
        const int j = (c >> (2 * i)) & 3;
        node = node * nodes + static_cast<std::size_t>(st[i].first + j);
        for (int l = 0; l < k; ++l) dw[l] *= l == i ? st[i].dw[j] : st[i].w[j];
        w *= st[i].w[j];
      }
      const auto [v, dv] = line_log_mu(node, seg, s);
      out[0] += w * v;
      out[1] += w * dv;
      out.tail(k) += dw * v;
    }
    return out;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

GraphHypersurface construct_hypersurface(std::shared_ptr<const GrwSpace> M, double t0, bool dual) {
  if (!M) throw Error("construction needs a space");
  const TwistedFibre& T = require_twisted(*M);
  const auto& w = M->warping();
  w.require(t0);
  const double sign = dual ? -1.0 : 1.0;
  auto outer = [M, t0, sign](double s) {
    const auto& wp = M->warping();
    const double h = wp.quad_invert(Quadrature::C, t0, sign * s);
    const double f = wp.f(h);
    return std::array<double, 3>{h, sign * f, f * wp.d1(h)};
  };
  // reachable s values, in the orientation of the graph
  double lo = sign * w.quad(Quadrature::C, w.lo(), t0), hi = sign * w.quad(Quadrature::C, w.hi(), t0);
  if (lo > hi) std::swap(lo, hi);
  const double a = T.base_lo(), b = T.base_hi();
  auto domain = [lo, hi, a, b](const Vec& x) { return x[0] > std::max(lo, a) && x[0] < std::min(hi, b); };
  return GraphHypersurface(M, ScalarField::compose(outer, ScalarField::coordinate(T.dim(), 0)), domain);
}

double construct_mean_curvature(const GrwSpace& M, const TwistedDecomposition& D, double t0, const Vec& x,
                                bool dual) {
  const double sign = dual ? -1.0 : 1.0;
  const auto& w = M.warping();
  const double t = w.quad_invert(Quadrature::C, t0, sign * x[0]);
  const Vec z = x.tail(x.size() - 1);
  const double f = w.f(t);
  return (M.dim() - 2) / (f * f) * (w.d1(t) + sign * D.mu_s(x[0], z) / D.mu_at(x[0], z));
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

Reconstruction reconstruct_decomposition(const GraphHypersurface& L, const Vec& x0, const ReconstructOptions& opts) {
  if (L.dim() < 3) throw Error("reconstruction needs dimension at least three");
  if (!(opts.s_lo < 0 && opts.s_hi > 0)) throw Error("base interval must contain 0");
  if (opts.leaf_nodes < 4) throw Error("at least four leaf nodes per dimension are needed");
  if (!(opts.s_spacing > 0) || !(opts.leaf_half_width > 0)) throw Error("grid spacings must be positive");

  const auto& F = L.space().fibre();
  auto chart = std::make_shared<Chart>(Chart{L, x0, L.height(x0), Mat(), opts.leaf_half_width, opts.leaf_nodes,
                                             opts.ode, {}, {}});
  const Vec grad = gradient(F, L.h(), x0);
  chart->basis = orthonormal_complement(F.metric(x0), grad);
  const int k = chart->leaf_dim();

  // s grid: uniform on each side of 0, both ends exact
  const int n_lo = static_cast<int>(std::ceil(-opts.s_lo / opts.s_spacing - 1e-9));
  const int n_hi = static_cast<int>(std::ceil(opts.s_hi / opts.s_spacing - 1e-9));
  for (int i = n_lo; i >= 1; --i) chart->s_grid.push_back(opts.s_lo * i / n_lo);
  chart->s_grid.push_back(0.0);
  for (int i = 1; i <= n_hi; ++i) chart->s_grid.push_back(opts.s_hi * i / n_hi);

  // anchor-leaf nodes
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(opts.leaf_nodes);
  std::vector<Vec> zs(total, Vec(k));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = k - 1; i >= 0; --i) {
      zs[idx][i] = -opts.leaf_half_width + static_cast<double>(r % opts.leaf_nodes) * chart->z_step();
      r /= static_cast<std::size_t>(opts.leaf_nodes);
    }
  }

  Reconstruction out;
  out.t0 = chart->t0;
  out.x0 = x0;
  {
    std::vector<Vec> probe{x0};
    for (std::size_t idx : {std::size_t{0}, total - 1}) probe.push_back(chart->leaf_point(zs[idx]));
    const auto rep = umbilicity_test(L, probe, opts.seed, opts.umbilic_tolerance);
    out.umbilicity_residual = rep.max_residual;
    if (!rep.umbilic) {
      std::ostringstream os;
      os << "hypersurface is not umbilic near the anchor (residual " << rep.max_residual << ")";
      throw DomainError(os.str());
    }
  }

  const int m = F.dim();
  chart->lines.resize(total);
  const std::size_t zero = static_cast<std::size_t>(n_lo);
  parallel_for(total, [&](std::size_t idx) {
    FlowLineRecord rec;
    rec.z = zs[idx];
    const Vec start = chart->leaf_point(rec.z);
    const auto back = chart->flow(start, opts.s_lo, true);
    const auto fwd = chart->flow(start, opts.s_hi, true);
    for (std::size_t i = 0; i < chart->s_grid.size(); ++i) {
      const double s = chart->s_grid[i];
      Vec state(m + 1);
      if (i == zero) {
        state.head(m) = start;
        state[m] = 0.0;
      } else {
        state = i < zero ? back(s) : fwd(s);
      }
      const Vec x = state.head(m);
      rec.s.push_back(s);
      rec.x.push_back(x);
      rec.log_mu.push_back(state[m]);
      rec.dlog_mu.push_back(log_mu_rate(L, x));
      rec.unit_residual = std::max(rec.unit_residual, std::abs(norm(F, x, flow_direction(L, x)) - 1.0));
    }
    chart->lines[idx] = std::move(rec);
  });
  out.flow_lines = chart->lines;

  // assemble the decomposition
  TwistedDecomposition& D = out.decomposition;
  D.a = opts.s_lo;
  D.b = opts.s_hi;
  ChartBox box;
  box.lo = Vec::Constant(k, -opts.leaf_half_width);
  box.hi = Vec::Constant(k, opts.leaf_half_width);
  D.leaf = std::make_shared<CallableMetricFibre>(k, [chart](const Vec& z) { return chart->leaf_metric(z); }, box,
                                                 opts.leaf_half_width);
  auto value = [chart, k](const Vec& p) { return std::exp(chart->log_mu_jet(p[0], p.tail(k))[0]); };
  auto grad_fn = [chart, k](const Vec& p) {
    const Vec j = chart->log_mu_jet(p[0], p.tail(k));
    const double mu = std::exp(j[0]);
    Vec g(k + 1);
    g[0] = mu * j[1];
    g.tail(k) = mu * j.tail(k);
    return g;
  };
  auto hess_fn = [grad_fn, k](const Vec& p) {
    Mat H(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) H.col(i) = fd5(grad_fn, p, i, 1e-4);
    return Mat(0.5 * (H + H.transpose()));
  };
  D.mu = ScalarField::from_parts(k + 1, value, grad_fn, hess_fn);
  D.z0 = Vec::Zero(k);
  D.to_fibre = [chart](double s, const Vec& z) { return chart->to_fibre(s, z); };
  D.leaf_samples.push_back(D.z0);
  for (std::size_t idx : {std::size_t{0}, total - 1, total / 3}) D.leaf_samples.push_back(zs[idx]);
  return out;
}

double leaf_metric_residual(const GraphHypersurface& L, const Reconstruction& R, const std::vector<double>& s_values,
                            const std::vector<Vec>& z_values) {
  const auto& F = L.space().fibre();
  const auto& D = R.decomposition;
  double worst = 0.0;
  for (double s : s_values)
    for (const Vec& z : z_values) {
      const int k = static_cast<int>(z.size());
      const Vec X = D.to_fibre(s, z);
      Mat J(X.size(), k);
      for (int i = 0; i < k; ++i) J.col(i) = fd5([&](const Vec& q) { return D.to_fibre(s, q); }, z, i);
      const Mat pulled = J.transpose() * F.metric(X) * J;
      const double mu = D.mu_at(s, z);
      const Mat model = mu * mu * D.leaf->metric(z);
      worst = std::max(worst, (pulled - model).norm() / model.norm());
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Duals
// ---------------------------------------------------------------------------

GraphHypersurface dual_hypersurface(const GraphHypersurface& L, const Vec& x0) {
  const double t0 = L.height(x0);
  const auto M = L.space_ptr();
  // u = h(x) -> v = C(u; t0) -> h~ = C^{-1}(-v; t0)
  auto outer = [M, t0](double u) {
    const auto& w = M->warping();
    const double v = w.quad(Quadrature::C, u, t0);
    const double ht = w.quad_invert(Quadrature::C, t0, -v);
    const double fu = w.f(u), fh = w.f(ht);
    const double d1 = -fh / fu;
    const double d2 = (w.d1(ht) * fh + fh * w.d1(u)) / (fu * fu);
    return std::array<double, 3>{ht, d1, d2};
  };
  auto inner_domain = L;
  auto domain = [inner_domain, M, t0](const Vec& x) {
    if (!inner_domain.in_domain(x)) return false;
    try {
      const auto& w = M->warping();
      const double v = w.quad(Quadrature::C, inner_domain.h().value(x), t0);
      w.quad_invert(Quadrature::C, t0, -v);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  return GraphHypersurface(M, ScalarField::compose(outer, L.h()), domain);
}

double dual_mean_curvature_formula(const GraphHypersurface& L, double t0, const Vec& x) {
  const auto& w = L.space().warping();
  const double h = L.height(x);
  const double tt = w.quad_invert(Quadrature::C, t0, -w.quad(Quadrature::C, h, t0));
  const double f = w.f(tt);
  return (L.dim() - 2) / (f * f) * (w.d1(tt) - log_mu_rate(L, x));
}

std::string to_string(DeSitterDual k) {
  switch (k) {
    case DeSitterDual::PastCone: return "past-cone";
    case DeSitterDual::FutureConeAtAntipode: return "future-cone-at-antipode";
    case DeSitterDual::TotallyGeodesic: return "totally-geodesic";
  }
  return "unknown";
}

DeSitterClassification classify_desitter_dual(int n, double t0, const Vec& x_star, double boundary_tol) {
  const auto M = std::make_shared<GrwSpace>(WarpingProfile::parse("cosh(t)", -kInf, kInf),
                                            std::make_shared<SphereFibre>(n - 1));
  const auto& w = M->warping();
  M->fibre().require(x_star);
  const double pi = std::numbers::pi;
  DeSitterClassification out;
  out.t_c = w.quad_invert(Quadrature::C, 0.0, pi / 4);
  out.delta = w.quad(Quadrature::C, t0, 0.0);
  if (!(out.delta > 0)) throw DomainError("anchor must lie to the future of the vertex");
  const auto& S = dynamic_cast<const SphereFibre&>(M->fibre());
  if (std::abs(t0 - out.t_c) <= boundary_tol) {
    out.kind = DeSitterDual::TotallyGeodesic;
    out.boundary_case = true;
    out.vertex_time = kInf;
    return out;
  }
  if (t0 < out.t_c) {
    out.kind = DeSitterDual::PastCone;
    out.vertex_time = w.quad_invert(Quadrature::C, t0, out.delta);
    out.vertex_point = x_star;
  } else {
    out.kind = DeSitterDual::FutureConeAtAntipode;
    out.vertex_time = w.quad_invert(Quadrature::C, t0, out.delta - pi);
    out.vertex_point = S.chart(-S.embed(x_star));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Round-sphere fibres
// ---------------------------------------------------------------------------

SphereClassification classify_umbilic_sphere_fibre(const GraphHypersurface& L, const Vec& x0, double umbilic_tol,
                                                   double integral_tol) {
  const auto& M = L.space();
  const auto& F = M.fibre();
  const auto kc = F.constant_curvature();
  if (F.kind() != "sphere" || !kc || !(*kc > 0)) throw DomainError("fibre is not a round sphere");
  if (L.dim() <= 3) throw DomainError("sphere-fibre classification needs n > 3");
  const double rk = std::sqrt(*kc);
  const double pi = std::numbers::pi;
  const double total = M.warping().total_inverse();
  if (!(total > pi / rk + integral_tol)) {
    std::ostringstream os;
    os << "integral of 1/f over I is " << total << ", not above " << pi / rk;
    throw DomainError(os.str());
  }

  ReconstructOptions ro;
  ro.s_lo = -0.1;
  ro.s_hi = 0.1;
  ro.leaf_half_width = 0.05;
  ro.leaf_nodes = 4;
  ro.umbilic_tolerance = umbilic_tol;
  const Reconstruction R = reconstruct_decomposition(L, x0, ro);

  // mu(s) = cos(rk s + theta)/cos(theta) = cos(rk s) - tan(theta) sin(rk s); least squares in tan(theta)
  double num = 0.0, den = 0.0;
  const auto& line = R.flow_lines[R.flow_lines.size() / 2];
  std::vector<double> ss;
  for (double s = ro.s_lo; s <= ro.s_hi + 1e-12; s += 0.02) ss.push_back(s);
  for (double s : ss) {
    const double mu = R.decomposition.mu_at(s, line.z);
    const double sn = std::sin(rk * s);
    num += (std::cos(rk * s) - mu) * sn;
    den += sn * sn;
  }
  const double theta = std::atan(num / den);
  double fit = 0.0;
  for (double s : ss)
    fit = std::max(fit, std::abs(R.decomposition.mu_at(s, line.z) - std::cos(rk * s + theta) / std::cos(theta)));

  SphereClassification out;
  out.theta = theta;
  out.umbilicity_residual = R.umbilicity_residual;

  TwistedDecomposition D;
  D.a = (-pi / 2 - theta) / rk;
  D.b = (pi / 2 - theta) / rk;
  const int m = F.dim();
  D.leaf = std::make_shared<SphereFibre>(m - 1, std::cos(theta) / rk);
  D.mu = ScalarField::from_parts(
      m,
      [rk, theta](const Vec& p) { return std::cos(rk * p[0] + theta) / std::cos(theta); },
      [rk, theta, m](const Vec& p) {
        Vec g = Vec::Zero(m);
        g[0] = -rk * std::sin(rk * p[0] + theta) / std::cos(theta);
        return g;
      },
      [rk, theta, m](const Vec& p) {
        Mat H = Mat::Zero(m, m);
        H(0, 0) = -rk * rk * std::cos(rk * p[0] + theta) / std::cos(theta);
        return H;
      });
  Vec z0 = Vec::Constant(m - 1, 1.0);
  z0[m - 2] = 0.0;
  D.z0 = z0;
  D.leaf_samples = {z0};
  const Vec E0 = flow_direction(L, x0);
  const FibrePtr Fp = M.fibre_ptr();
  D.to_fibre = [Fp, x0, E0, z0](double s, const Vec& z) {
    if ((z - z0).norm() > 0) throw DomainError("only the anchor generator is mapped into the fibre");
    return exp_map(*Fp, x0, s * E0);
  };

  out.future = containment_by_twist(M, D, R.t0, Orientation::Future);
  out.past = containment_by_twist(M, D, R.t0, Orientation::Past);
  std::ostringstream diag;
  diag << "theta fit residual " << fit << "; ";
  if (fit > 1e-5) diag << "reconstructed mu is not of the round-sphere form; ";
  if (out.future.contained) {
    out.cone = true;
    out.vertex = *out.future.vertex;
  } else {
    diag << "future: " << out.future.diagnostics;
  }
  if (out.past.contained) out.past_vertex = out.past.vertex;
  if (!out.cone) diag << "not a cone";
  out.diagnostics = diag.str();
  return out;
}

// ---------------------------------------------------------------------------
// Obstruction scan
// ---------------------------------------------------------------------------

double direction_spread(const FibreModel& F, const Vec& x, const Vec& v) {
  if (F.dim() < 3) return 0.0;
  const Mat g = F.metric(x);
  const Vec u = v / std::sqrt(v.dot(g * v));
  const Mat basis = orthonormal_complement(g, u);
  const Riemann R = F.riemann(x);
  const int k = static_cast<int>(basis.cols());
  Mat S(k, k);
  for (int i = 0; i < k; ++i) {
    const Vec Ri = R.apply(basis.col(i), u, u);
    for (int j = 0; j < k; ++j) S(i, j) = basis.col(j).dot(g * Ri);
  }
  const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  return ev.maxCoeff() - ev.minCoeff();
}

ObstructionReport obstruction_scan(const FibreModel& F, const Vec& x, int directions, int planes,
                                   std::uint64_t seed, const std::vector<Vec>& extra_directions) {
  const int m = F.dim();
  const Mat g = F.metric(x);
  std::vector<Vec> dirs = extra_directions;
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    for (int i = 0; i < directions; ++i) {
      Vec v(m);
      for (int j = 0; j < m; ++j) v[j] = N(rng);
      dirs.push_back(v);
    }
  }
  ObstructionReport rep;
  rep.x = x;
  rep.directions.resize(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    DirectionSpread d;
    d.direction = dirs[i] / std::sqrt(dirs[i].dot(g * dirs[i]));
    d.spread = direction_spread(F, x, d.direction);
    std::mt19937_64 rng(item_seed(seed, i));
    std::normal_distribution<double> N;
    double lo = kInf, hi = -kInf;
    for (int q = 0; q < planes; ++q) {
      Vec w(m);
      for (int j = 0; j < m; ++j) w[j] = N(rng);
      try {
        const double K = sectional_curvature(F, x, d.direction, w);
        lo = std::min(lo, K);
        hi = std::max(hi, K);
      } catch (const DegenerateError&) {
      }
    }
    d.sampled_spread = hi >= lo ? hi - lo : 0.0;
    rep.directions[i] = d;
  });
  rep.min_spread = kInf;
  for (std::size_t i = 0; i < rep.directions.size(); ++i)
    if (rep.directions[i].spread < rep.min_spread) {
      rep.min_spread = rep.directions[i].spread;
      rep.argmin = i;
    }
  if (rep.directions.empty()) rep.min_spread = 0.0;
  return rep;
}

UniquenessProbe sphere_warped_uniqueness_probe(const Function1D& mu, const std::vector<double>& s_values,
                                               double tol) {
  UniquenessProbe out;
  for (double s : s_values) {
    const double m = mu(s), d1 = mu.d1(s), d2 = mu.d2(s);
    out.max_residual = std::max(out.max_residual, std::abs(d2 * m - d1 * d1 + 1.0));
  }
  out.constant_curvature = out.max_residual <= tol;
  return out;
}

}  // namespace nullkit
