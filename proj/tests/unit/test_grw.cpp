#include "nullkit/grw.hpp"

#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace nullkit;
using testing::random_vec;
using testing::uniform;

namespace {

const double pi = std::numbers::pi;
const double inf = std::numeric_limits<double>::infinity();

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vec unit(const FibreModel& F, const Vec& x, Vec u) { return u / norm(F, x, u); }

}  // namespace

TEST_CASE("warping quadratures") {
  const auto one = WarpingProfile::constant(1.0, -inf, inf);
  CHECK(one.quad_invert(Quadrature::A, 0.3, 1.7) == doctest::Approx(2.0).epsilon(1e-14));

  const auto ch = WarpingProfile::parse("cosh(t)", -inf, inf);
  CHECK(ch.catalog() == "cosh");
  for (double sigma : {0.2, 1.0, 7.5})
    CHECK(ch.quad_invert(Quadrature::A, 0.0, sigma) == doctest::Approx(std::asinh(sigma)).epsilon(1e-12));
  // tanh(t/2) = tan(pi/8)
  const double t_c = 2.0 * std::atanh(std::tan(pi / 8));
  CHECK(ch.quad_invert(Quadrature::C, 0.0, pi / 4) == doctest::Approx(t_c).epsilon(1e-12));
  CHECK(t_c == doctest::Approx(0.881374).epsilon(1e-6));
  CHECK(ch.total_inverse() == doctest::Approx(pi).epsilon(1e-14));

  // generic path (expression outside the catalog) against the closed forms
  const auto gen = WarpingProfile::parse("cosh(t)*1", -inf, inf);
  CHECK(gen.catalog().empty());
  for (double t : {-3.0, -0.4, 0.05, 0.9, 2.6, 12.0}) {
    CHECK(gen.quad(Quadrature::A, t, 0.3) == doctest::Approx(std::sinh(t) - std::sinh(0.3)).epsilon(1e-11));
    CHECK(gen.quad(Quadrature::C, t, 0.3) ==
          doctest::Approx(2 * std::atan(std::tanh(t / 2)) - 2 * std::atan(std::tanh(0.15))).epsilon(1e-11));
  }
  CHECK(gen.quad_invert(Quadrature::C, 0.0, pi / 4) == doctest::Approx(t_c).epsilon(1e-11));
  CHECK(gen.total_inverse() == doctest::Approx(pi).epsilon(1e-9));
  for (int i = 0; i < 20; ++i) {
    const double v = uniform(-1.5, 1.5);
    const double t = gen.quad_invert(Quadrature::C, 0.0, v);
    CHECK(std::abs(gen.quad(Quadrature::C, t, 0.0) - v) <= 1e-10 * (1 + std::abs(v)));
  }

  try {
    (void)ch.quad_invert(Quadrature::C, 0.0, 2.0);
    FAIL("expected a range error");
  } catch (const RangeError& e) {
    CHECK(e.exit_parameter() == doctest::Approx(pi / 2));
  }
  const auto cs = WarpingProfile::parse("cos(t)", -pi / 2, pi / 2);
  CHECK(cs.total_inverse() == inf);
  CHECK(cs.quad_invert(Quadrature::C, 0.0, 5.0) == doctest::Approx(2 * std::atan(std::tanh(2.5))).epsilon(1e-12));
  CHECK_THROWS_AS((void)cs.quad_invert(Quadrature::A, 0.0, 1.5), RangeError);
  const auto pw = WarpingProfile::parse("t^2", 0.0, inf);
  CHECK(pw.quad(Quadrature::A, 2.0, 1.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(pw.quad(Quadrature::C, 2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("metric evaluation") {
  GrwSpace M(WarpingProfile::parse("cosh(t)", -inf, inf), std::make_shared<EuclideanFibre>(2));
  const Vec p = vec({0.7, 0.1, 0.2});
  const Vec dt = vec({1, 0, 0});
  CHECK(metric_eval(M, p, dt, dt) == -1.0);
  const Vec z = M.zeta(p);
  CHECK(metric_eval(M, p, z, z) == doctest::Approx(-std::cosh(0.7) * std::cosh(0.7)));
  CHECK(metric_eval(M, p, dt, vec({0, 1, 0})) == 0.0);
  GrwSpace Ads(WarpingProfile::parse("cos(t)", -pi / 2, pi / 2), std::make_shared<EuclideanFibre>(2));
  CHECK_THROWS_AS(metric_eval(Ads, vec({2.0, 0, 0}), dt, dt), DomainError);
}

TEST_CASE("christoffel symbols against the metric") {
  GrwSpace M(WarpingProfile::parse("2 + sin(t)", -inf, inf), std::make_shared<SphereFibre>(2));
  const Vec p = vec({0.4, 1.1, 0.3});
  const auto G = M.christoffel(p);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(G(k, i, j) ==
              doctest::Approx(testing::christoffel_oracle([&](const Vec& y) { return M.metric(y); }, p, k, i, j))
                  .epsilon(1e-7)
                  .scale(1.0));
}

TEST_CASE("null geodesics by quadrature") {
  GrwSpace Mink(WarpingProfile::constant(1.0, -inf, inf), std::make_shared<EuclideanFibre>(3));
  const Vec xs = vec({0.1, 0.2, 0.3});
  const Vec u = vec({0.6, 0.0, 0.8});
  auto gam = null_geodesic_quadrature(Mink, 0.5, xs, u, Orientation::Future);
  for (double s : {0.0, 0.5, 3.0}) {
    CHECK((gam.point(s) - GrwSpace::point(0.5 + s, xs + s * u)).norm() < 1e-13);
  }

  GrwSpace dS(WarpingProfile::parse("cosh(t)", -inf, inf), std::make_shared<SphereFibre>(3));
  const Vec x0 = vec({1.2, 1.0, 0.4});
  const Vec u0 = unit(dS.fibre(), x0, vec({0.3, -0.5, 0.2}));
  for (Orientation o : {Orientation::Future, Orientation::Past}) {
    auto g = null_geodesic_quadrature(dS, 0.0, x0, u0, o);
    const double sign = orientation_sign(o);
    for (double s : {0.3, 1.0, 2.0}) {
      const Vec p = g.point(s), V = g.velocity(s);
      CHECK(std::abs(metric_eval(dS, p, V, V)) <= 1e-8);
      CHECK(metric_eval(dS, p, V, dS.zeta(p)) == doctest::Approx(-sign).epsilon(1e-8));
      CHECK(g.alpha(s) == doctest::Approx(sign * std::asinh(s)).epsilon(1e-12));
      // b(s) = int_0^s f(alpha(r))^-2 dr against C(alpha(s))
      const auto b = num::integrate([&](double r) { return 1.0 / (1.0 + r * r); }, 0.0, s);
      CHECK(g.fibre_parameter(s) == doctest::Approx(b.value).epsilon(1e-10));
      CHECK(distance(dS.fibre(), x0, p.tail(3)) == doctest::Approx(b.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("quadrature and numeric null geodesics agree") {
  std::vector<std::shared_ptr<GrwSpace>> spaces{
      std::make_shared<GrwSpace>(WarpingProfile::constant(1.0, -inf, inf), std::make_shared<EuclideanFibre>(3)),
      std::make_shared<GrwSpace>(WarpingProfile::parse("cosh(t)", -inf, inf), std::make_shared<SphereFibre>(3)),
      std::make_shared<GrwSpace>(WarpingProfile::parse("exp(t)", -inf, inf), std::make_shared<HyperbolicFibre>(3))};
  for (const auto& M : spaces) {
    for (int trial = 0; trial < 3; ++trial) {
      const Vec x = random_vec(3, 0.2, 0.5);
      const Vec u = unit(M->fibre(), x, random_vec(3));
      const double ts = uniform(-0.3, 0.3);
      auto g = null_geodesic_quadrature(*M, ts, x, u, Orientation::Future);
      const std::vector<double> params{0.25, 0.5, 0.8};
      const auto rec = null_geodesic_numeric(*M, g.point(0.0), g.velocity(0.0), params);
      for (std::size_t i = 0; i < params.size(); ++i) {
        CHECK((rec.x[i] - g.point(params[i])).norm() <= 1e-6);
        CHECK((rec.v[i] - g.velocity(params[i])).norm() <= 1e-6);
      }
      // reversing V reverses the curve
      auto back = null_geodesic_numeric(*M, g.point(0.5), -g.velocity(0.5), {0.5});
      CHECK((back.x[0] - g.point(0.0)).norm() <= 1e-8);
    }
  }
  CHECK_THROWS_AS(null_geodesic_numeric(*spaces[0], Vec::Zero(4), vec({1, 0, 0, 0}), {1.0}), DomainError);
}

TEST_CASE("null sectional curvature") {
  const Vec v = vec({1, 0, 0}), w = vec({0, 1, 0});
  GrwSpace flat(WarpingProfile::constant(1.0, -inf, inf), std::make_shared<EuclideanFibre>(3));
  CHECK(null_sectional_curvature(flat, Vec::Zero(4), v, w) == 0.0);

  GrwSpace es(WarpingProfile::constant(1.0, -inf, inf), std::make_shared<SphereFibre>(3));
  const Vec p = vec({0.0, pi / 2, pi / 2, 0.3});
  // at the equator the polar chart is orthonormal
  CHECK(null_sectional_curvature(es, p, v, w) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(null_sectional_curvature_tensor(es, p, v, w) == doctest::Approx(1.0).epsilon(1e-5));

  GrwSpace dS(WarpingProfile::parse("cosh(t)", -inf, inf), std::make_shared<SphereFibre>(3));
  const Vec q = vec({0.8, pi / 2, pi / 2, 0.3});
  CHECK(std::abs(null_sectional_curvature(dS, q, v, w)) < 1e-12);
  CHECK(std::abs(null_sectional_curvature_tensor(dS, q, v, w)) < 1e-5);

  GrwSpace gen(WarpingProfile::parse("2 + sin(t)", -inf, inf), std::make_shared<HyperbolicFibre>(3, -0.7));
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = random_vec(3, -0.4, 0.4);
    const Mat g = gen.fibre().metric(x);
    Mat basis(3, 2);
    basis.col(0) = random_vec(3);
    basis.col(1) = random_vec(3);
    // g_F-orthonormalize
    Vec a = basis.col(0) / std::sqrt(basis.col(0).dot(g * basis.col(0)));
    Vec b = basis.col(1) - a.dot(g * basis.col(1)) * a;
    b /= std::sqrt(b.dot(g * b));
    const Vec pt = GrwSpace::point(uniform(-1, 1), x);
    CHECK(null_sectional_curvature(gen, pt, a, b) ==
          doctest::Approx(null_sectional_curvature_tensor(gen, pt, a, b)).epsilon(1e-5).scale(1.0));
  }
  CHECK_THROWS_AS(null_sectional_curvature(flat, Vec::Zero(4), v, 2 * w), DegenerateError);
}

TEST_CASE("conformal field") {
  std::vector<Vec> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(random_vec(3, -0.5, 0.5));
  GrwSpace one(WarpingProfile::constant(1.0, -inf, inf), std::make_shared<EuclideanFibre>(2));
  CHECK(conformal_check(one, grid) == 0.0);
  GrwSpace ch(WarpingProfile::parse("cosh(t)", -inf, inf), std::make_shared<HyperbolicFibre>(2));
  CHECK(conformal_check(ch, grid) <= 1e-6);
  GrwSpace ex(WarpingProfile::parse("exp(t)", -inf, inf), std::make_shared<EuclideanFibre>(2));
  CHECK(conformal_check(ex, grid) <= 1e-6);
}
