#include "nullkit/fixtures.hpp"
#include "nullkit/staticspace.hpp"

#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace nullkit;

namespace {

const double inf = std::numeric_limits<double>::infinity();
const std::vector<std::string> vars{"s", "a1", "a2"};

TwistedDecomposition twisted_plane() {
  TwistedDecomposition D;
  D.a = -inf;
  D.b = inf;
  D.leaf = std::make_shared<EuclideanFibre>(2);
  D.mu = ScalarField::parse("exp(0.3*s) + 0.2*a1^2", vars);
  D.z0 = Vec::Zero(2);
  return D;
}

std::vector<Vec> grid() {
  std::vector<Vec> out;
  for (double s : {-0.6, 0.0, 0.4})
    for (double a : {-0.5, 0.3}) {
      Vec x(3);
      x << s, a, 0.2 - a;
      out.push_back(x);
    }
  return out;
}

/// Taylor coefficients of phi with phi phi' = phi - 1, phi(0) = r0 (h = 1 - 1/r).
std::vector<double> schwarzschild_series(double r0, int terms) {
  std::vector<double> a(terms + 1, 0.0);
  a[0] = r0;
  for (int k = 0; k < terms; ++k) {
    double acc = a[k] - (k == 0 ? 1.0 : 0.0);
    for (int j = 1; j <= k; ++j) acc -= a[j] * (k + 1 - j) * a[k + 1 - j];
    a[k + 1] = acc / (a[0] * (k + 1));
  }
  return a;
}

double horner(const std::vector<double>& a, double s) {
  double v = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * s + *it;
  return v;
}

}  // namespace

TEST_CASE("static chart connection") {
  const auto F = std::make_shared<SphereFibre>(2);
  const ScalarField phi = ScalarField::parse("1.5 + 0.3*cos(x1) + 0.1*sin(x2)", {"x1", "x2"});
  const StaticChart C(F, phi);
  Vec p(3);
  p << 0.7, 1.1, 0.4;
  const auto G = C.christoffel(p);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(G(k, i, j) - testing::christoffel_oracle([&](const Vec& q) { return C.metric(q); }, p, k, i, j)) <=
              1e-6);
}

TEST_CASE("conformal transfer of B and H") {
  SUBCASE("constant potential") {
    const Mat B = testing::random_vec(4).reshaped(2, 2);
    const Mat I = Mat::Identity(2, 2);
    CHECK((conformal_B_transform(B, 0.0, 1.0, I) - B).norm() <= 1e-15);
    CHECK((conformal_B_transform(B, 0.0, 2.0, I) - B / 4).norm() <= 1e-15);
    CHECK(conformal_H_transform(0.7, 0.0, 4) == 0.7);
  }
  SUBCASE("phi = 1 reduces to the GRW graph") {
    const auto D = twisted_plane();
    const auto L = static_umbilic_construct(D, ScalarField::constant(3, 1.0), 0.2);
    const auto Lc = conformal_graph(L.model, L.h);
    for (const Vec& x : grid()) {
      CHECK(static_xi_ln_phi(L.model, L.h, x) == 0.0);
      CHECK(std::abs(static_mean_curvature(L.model, L.h, x) - mean_curvature(Lc, x)) <= 1e-6);
    }
  }
  SUBCASE("varying potential") {
    const auto D = twisted_plane();
    const ScalarField phi = ScalarField::parse("1 + 0.2*s^2 + 0.1*a1 + 0.05*a2*s", vars);
    for (bool dual : {false, true}) {
      const auto L = static_umbilic_construct(D, phi, 0.3, dual);
      const auto Lc = conformal_graph(L.model, L.h);
      CHECK(validate_null_graph(Lc, grid()).max_residual <= 1e-12);
      for (const Vec& x : grid()) {
        const Mat E = static_screen(L.model, L.h, x);
        const Mat gram = E.transpose() * L.model.chart()->metric(GrwSpace::point(L.h.value(x), x)) * E;
        const Mat Bs = static_b_star(L.model, L.h, x, E);
        const double xl = static_xi_ln_phi(L.model, L.h, x);
        const Mat B = second_fundamental_matrix(Lc, x, E);
        CHECK((conformal_B_transform(Bs, xl, phi.value(x), gram) - B).norm() <= 1e-5);
        const double Hs = Bs.trace();
        CHECK(std::abs(conformal_H_transform(Hs, xl, 4) - mean_curvature(Lc, x)) <= 1e-5);
        CHECK(std::abs(Hs - L.mean_curvature_formula(x)) <= 1e-5);
        // umbilic for g*
        CHECK((Bs - Hs / 2 * gram).norm() <= 1e-5);
      }
    }
  }
}

TEST_CASE("dual graph") {
  const ScalarField h = ScalarField::parse("a1^2 + sin(s)", vars);
  Vec x0(3);
  x0 << 0.2, 0.4, -0.1;
  const ScalarField d = static_dual_graph(h, x0);
  const ScalarField dd = static_dual_graph(d, x0);
  for (const Vec& x : grid()) {
    CHECK(std::abs(dd.value(x) - h.value(x)) <= 1e-12);
    CHECK(std::abs(d.value(x) + h.value(x) - 2 * h.value(x0)) <= 1e-12);
  }
  const auto L = static_umbilic_construct(twisted_plane(), ScalarField::parse("1 + 0.1*s^2", vars), 0.1);
  const auto Ld = static_dual(static_dual(L));
  for (const Vec& x : grid()) CHECK(std::abs(Ld.h.value(x) - L.h.value(x)) <= 1e-12);
}

TEST_CASE("radial profile") {
  const auto sch = RadialStaticFamily::parse("1 - 1/r", 1.0, 50.0);
  const RadialProfile P(sch, 3.0, -0.5, 0.5);
  CHECK_FALSE(P.truncated());
  const auto a = schwarzschild_series(3.0, 40);
  std::vector<double> ss;
  for (int i = 0; i <= 20; ++i) ss.push_back(-0.45 + 0.9 * i / 20);
  for (double s : ss) {
    CHECK(std::abs(P.r(s) - horner(a, s)) <= 1e-8);
    const double r = P.r(s);
    CHECK(std::abs(P.mu(s) * std::sqrt(1 - 1 / r) - r) <= 1e-10);
    // mu derivatives against differences of the profile
    CHECK(std::abs(P.mu(s, 1) - fd5_scalar([&](double q) { return P.mu(q); }, s, 1e-3)) <= 1e-8);
    CHECK(std::abs(P.mu(s, 2) - fd5_scalar([&](double q) { return P.mu(q, 1); }, s, 1e-3)) <= 1e-8);
    CHECK(std::abs(P.mu(s, 3) - fd5_scalar([&](double q) { return P.mu(q, 2); }, s, 1e-3)) <= 1e-8);
  }
  CHECK(P.pullback_residual(ss) <= 1e-7);

  SUBCASE("horizon truncation") {
    const RadialProfile Q(sch, 1.2, -40.0, 0.5);  // r - 1 decays like exp(s)
    CHECK(Q.truncated());
    CHECK(Q.s_lo() > -40.0);
    CHECK(Q.r(Q.s_lo()) > 1.0);
    CHECK_FALSE(Q.report().empty());
    CHECK_THROWS_AS(Q.r(-40.0), DomainError);
  }
  SUBCASE("flat h") {
    const auto flat = RadialStaticFamily::parse("1", 0.0, 50.0);
    const RadialProfile Q(flat, 2.0, -0.5, 0.5);
    for (double s : ss) CHECK(std::abs(Q.r(s) - (2 + s)) <= 1e-11);
  }
}

TEST_CASE("static umbilic hypersurfaces of Schwarzschild") {
  const auto sch = RadialStaticFamily::parse("1 - 1/r", 1.0, 50.0);
  const RadialProfile P(sch, 3.0, -0.5, 0.5);
  const auto data = radial_static_data(P);
  CHECK(data.decomposition.mu_at(0.0, data.decomposition.z0) == doctest::Approx(1.0).epsilon(1e-14));
  const auto L = static_umbilic_construct(data.decomposition, data.potential, 0.0);
  const auto Ld = static_dual(L);
  // the fibre metric pulls back to dr^2/h + r^2 g_0
  for (double s : {-0.4, 0.0, 0.3}) {
    Vec x(3);
    x << s, 1.1, 0.6;
    const double r = P.r(s), h = 1 - 1 / r;
    const Mat g = L.model.fibre->metric(x);
    CHECK(std::abs(g(0, 0) - h) <= 1e-10);  // (dr/ds)^2 / h = h
    CHECK(std::abs(g(1, 1) - r * r) <= 1e-9);
    CHECK(std::abs(g(2, 2) - r * r * std::sin(1.1) * std::sin(1.1)) <= 1e-9);
    CHECK(std::abs(L.model.phi.value(x) - std::sqrt(h)) <= 1e-12);

    const double H = static_mean_curvature(L.model, L.h, x);
    CHECK(std::abs(H - 2 * h / r) <= 1e-5);
    CHECK(std::abs(H - L.mean_curvature_formula(x)) <= 1e-5);
    const double Hd = static_mean_curvature(Ld.model, Ld.h, x);
    CHECK(std::abs(Hd + 2 * h / r) <= 1e-5);
    CHECK(std::abs(Hd - Ld.mean_curvature_formula(x)) <= 1e-5);
  }
  SUBCASE("flat h gives H* = 2/(s + r0)") {
    const auto flat = RadialStaticFamily::parse("1", 0.0, 50.0);
    const RadialProfile Q(flat, 2.0, -0.5, 0.5);
    const auto d = radial_static_data(Q);
    const auto Lf = static_umbilic_construct(d.decomposition, d.potential, 0.0);
    for (double s : {-0.4, 0.1, 0.45}) {
      Vec x(3);
      x << s, 1.3, -0.4;
      CHECK(std::abs(static_mean_curvature(Lf.model, Lf.h, x) - 2 / (s + 2)) <= 1e-5);
    }
  }
}

TEST_CASE("uniqueness certificate") {
  {
    const auto sch = RadialStaticFamily::parse("1 - 1/r", 1.0, 50.0);
    const auto c = uniqueness_certificate(sch, 1.5, 8.0);
    CHECK(c.exactly_two);
    CHECK(c.verdict == "exactly two");
    CHECK(c.identity_residual <= 1e-6);
  }
  {
    // Reissner-Nordstrom with m = 1, q^2 = 0.5: h''' vanishes only at r = 1
    const auto rn = RadialStaticFamily::parse("1 - 2/r + 0.5/r^2", 0.5, 50.0);
    const auto c = uniqueness_certificate(rn, 2.0, 6.0);
    CHECK(c.exactly_two);
    CHECK(c.identity_residual <= 1e-6);
    // q^2 = 2 has no horizon and h''' vanishes at r = 4
    const auto outer = RadialStaticFamily::parse("1 - 2/r + 2/r^2", 0.5, 50.0);
    const auto c2 = uniqueness_certificate(outer, 0.8, 6.0);
    CHECK(c2.exactly_two);
    CHECK(c2.longest_flat <= 0.05);
  }
  {
    const auto flat = RadialStaticFamily::parse("1", 0.0, 50.0);
    const auto c = uniqueness_certificate(flat, 1.0, 3.0);
    CHECK_FALSE(c.exactly_two);
    CHECK(c.verdict.rfind("refused", 0) == 0);
    CHECK(c.identity_residual <= 1e-10);
  }
  {
    const auto sch = RadialStaticFamily::parse("1 - 1/r", 0.1, 50.0);
    CHECK_FALSE(uniqueness_certificate(sch, 0.5, 3.0).exactly_two);
  }
}
