#include "nullkit/cone.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nullkit {

double NullCone::max_radius() const { return space->fibre().injectivity_bound(x_star); }

void NullCone::validate() const {
  if (!space) throw Error("null cone needs a space");
  space->warping().require(t_star);
  space->fibre().require(x_star);
  if (!(vertex_collar > 0)) throw Error("vertex collar must be positive");
}

Membership cone_contains(const NullCone& C, const Vec& p, double tol) {
  C.validate();
  const int m = C.space->fibre().dim();
  const double t = p[0];
  C.space->warping().require(t);
  const Vec x = p.tail(m);
  const double d = distance(C.space->fibre(), C.x_star, x);
  if (d > C.max_radius()) throw DomainError("point is beyond the cone's normal neighbourhood");
  const double q = orientation_sign(C.orientation) * C.space->warping().quad(Quadrature::C, t, C.t_star);
  Membership out;
  out.residual = std::abs(q - d);
  out.contained = out.residual <= tol;
  return out;
}

GraphHypersurface cone_as_graph(const NullCone& C) {
  C.validate();
  const auto M = C.space;
  const double sign = orientation_sign(C.orientation);
  const double ts = C.t_star;
  auto outer = [M, sign, ts](double d) {
    const auto& w = M->warping();
    const double h = w.quad_invert(Quadrature::C, ts, sign * d);
    const double f = w.f(h), fp = w.d1(h);
    return std::array<double, 3>{h, sign * f, fp * f};
  };
  const ScalarField dist = distance_field(M->fibre_ptr(), C.x_star);
  const Vec xs = C.x_star;
  const auto& w = M->warping();
  // fibre distances reachable by the time quadrature inside I
  const double reach = sign > 0 ? w.quad(Quadrature::C, w.hi(), ts) : -w.quad(Quadrature::C, w.lo(), ts);
  const double lo = C.vertex_collar, hi = std::min(C.max_radius(), reach);
  auto domain = [M, xs, lo, hi](const Vec& x) {
    const double d = distance(M->fibre(), xs, x);
    return d >= lo && d < hi;
  };
  return GraphHypersurface(M, ScalarField::compose(outer, dist), domain);
}

Vec position_field_cone(const NullCone& C, const Vec& p) {
  C.validate();
  const auto& w = C.space->warping();
  const int m = C.space->fibre().dim();
  const double t = p[0];
  const double f = w.f(t);
  const double A = w.quad(Quadrature::A, t, C.t_star), Cq = w.quad(Quadrature::C, t, C.t_star);
  if (Cq == 0.0) throw DegenerateError("position field is undefined at the vertex slice");
  const double a = A / f, c = f * Cq;
  Vec P(m + 1);
  P[0] = a;
  P.tail(m) = (a / c) * position_field(C.space->fibre(), C.x_star, p.tail(m));
  return P;
}

Vec position_field_cone_geodesic(const NullCone& C, const Vec& p) {
  C.validate();
  const auto& F = C.space->fibre();
  const int m = F.dim();
  const Vec x = p.tail(m);
  const Vec v = log_map(F, C.x_star, x);
  const double d = norm(F, C.x_star, v);
  if (d == 0.0) throw DegenerateError("position field is undefined at the vertex");
  const NullGeodesic g(*C.space, C.t_star, C.x_star, v / d, C.orientation);
  const double s = std::abs(C.space->warping().quad(Quadrature::A, p[0], C.t_star));
  return s * g.velocity(s);
}

double rw_cone_rho(double k, const WarpingProfile& w, double t_star, double t, Orientation o) {
  const double Cq = std::abs(w.quad(Quadrature::C, t, t_star));
  if (Cq == 0.0) throw DomainError("rho diverges at the vertex");
  const double f = w.f(t), fp = w.d1(t);
  double term;
  if (k > 0) {
    const double r = std::sqrt(k);
    if (r * Cq >= std::numbers::pi) throw DomainError("cone reaches the conjugate locus of the sphere");
    term = r / std::tan(r * Cq);
  } else if (k == 0) {
    term = 1.0 / Cq;
  } else {
    const double r = std::sqrt(-k);
    term = r / std::tanh(r * Cq);
  }
  return (fp + orientation_sign(o) * term) / (f * f);
}

namespace {

/// Richardson limit of sample(r) as r -> 0 over r0 * ratio^k.
double radial_limit(const std::function<double(double)>& sample, double r0, const LimitOptions& lim) {
  std::vector<double> vals;
  for (int k = 0; k < lim.levels; ++k) vals.push_back(sample(r0 * std::pow(lim.ratio, k)));
  return num::richardson(vals, lim.ratio, 1);
}

}  // namespace

ContainmentVerdict containment_by_gradient(const GraphHypersurface& L, const Vec& x_star, double t_star,
                                           const std::vector<Vec>& grid, double angle_tol,
                                           const LimitOptions& lim) {
  ContainmentVerdict v;
  const auto& F = L.space().fibre();
  std::ostringstream diag;
  bool ok = true;
  double worst_limit = 0.0;
  for (const Vec& x : grid) {
    try {
      const Vec grad = gradient(F, L.h(), x);
      const Vec P = position_field(F, x_star, x);
      const Mat g = F.metric(x);
      const double gg = grad.dot(g * grad), pp = P.dot(g * P), gp = grad.dot(g * P);
      if (gg == 0.0 || pp == 0.0) throw DegenerateError("vanishing gradient or position field");
      v.angle_residual = std::max(v.angle_residual, 1.0 - gp * gp / (gg * pp));

      const double d = std::sqrt(pp);
      const Vec dir = log_map(F, x_star, x) / d;
      const double r0 = std::min(d, 0.25);
      const double lim_val =
          radial_limit([&](double r) { return L.height(exp_map(F, x_star, r * dir)); }, r0, lim);
      const double err = std::abs(lim_val - t_star);
      if (err >= worst_limit) {
        worst_limit = err;
        v.limit_value = lim_val;
      }
    } catch (const Error& e) {
      ok = false;
      diag << "sample failed: " << e.what() << "; ";
    }
  }
  v.limit_error = worst_limit;
  if (v.angle_residual > angle_tol) {
    ok = false;
    diag << "gradient not proportional to the position field (1 - cos^2 = " << v.angle_residual << "); ";
  }
  if (worst_limit > lim.tolerance) {
    ok = false;
    diag << "radial limit of h misses t_* by " << worst_limit << "; ";
  }
  v.contained = ok && !grid.empty();
  if (v.contained) v.vertex = GrwSpace::point(t_star, x_star);
  v.diagnostics = diag.str();
  return v;
}

ContainmentVerdict containment_by_twist(const GrwSpace& M, const TwistedDecomposition& D, double t0,
                                        Orientation o, const LimitOptions& lim) {
  ContainmentVerdict v;
  std::ostringstream diag;
  const bool future = o == Orientation::Future;
  const double end = future ? D.a : D.b;
  if (!std::isfinite(end)) {
    v.diagnostics = "the base interval is unbounded at the collapsing end";
    return v;
  }
  const double width = std::isfinite(D.b - D.a) ? D.b - D.a : 1.0;
  const double r0 = 0.1 * std::min(1.0, width);
  const double dir = future ? 1.0 : -1.0;
  std::vector<Vec> zs = D.leaf_samples;
  if (zs.empty()) zs.push_back(D.z0);
  bool ok = true;
  for (const Vec& z : zs) {
    try {
      const double lim_val = radial_limit([&](double r) { return D.mu_at(end + dir * r, z); }, r0, lim);
      v.limit_error = std::max(v.limit_error, std::abs(lim_val));
    } catch (const Error& e) {
      ok = false;
      diag << "mu sample failed: " << e.what() << "; ";
    }
  }
  if (v.limit_error > lim.tolerance) {
    ok = false;
    diag << "mu does not vanish at the " << (future ? "lower" : "upper") << " end (limit " << v.limit_error << "); ";
  }
  double t_star = 0.0;
  try {
    t_star = M.warping().quad_invert(Quadrature::C, t0, end);
    v.limit_value = t_star;
  } catch (const RangeError& e) {
    ok = false;
    diag << "t_* is not reachable inside I (quadrature limit " << e.exit_parameter() << " vs required " << end
         << "); ";
  }
  v.contained = ok;
  if (ok) {
    Vec xs;
    if (D.to_fibre) {
      const int m = static_cast<int>(D.to_fibre(end + dir * r0, D.z0).size());
      xs.resize(m);
      for (int i = 0; i < m; ++i)
        xs[i] = radial_limit([&](double r) { return D.to_fibre(end + dir * r, D.z0)[i]; }, r0, lim);
    }
    v.vertex = GrwSpace::point(t_star, xs);
  }
  v.diagnostics = diag.str();
  return v;
}

}  // namespace nullkit
