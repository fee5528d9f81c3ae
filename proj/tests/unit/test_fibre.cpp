#include "nullkit/fibre.hpp"

#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace nullkit;
using testing::random_vec;
using testing::uniform;

namespace {

const double pi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

std::shared_ptr<TwistedFibre> linear_twist() {
  // (-1, inf) x_{s+1} S^1
  auto leaf = std::make_shared<SphereFibre>(1);
  return std::make_shared<TwistedFibre>(-1.0, 1e6, leaf, ScalarField::parse("s + 1", {"s", "a1"}));
}

}  // namespace

TEST_CASE("metric evaluation") {
  EuclideanFibre E(2);
  CHECK(metric(E, v2(0.3, -2), v2(1, 0), v2(0, 1)) == 0.0);
  SphereFibre S(2);
  CHECK(metric(S, v2(pi / 2, 0.4), v2(0, 1), v2(0, 1)) == doctest::Approx(1.0));
  auto leaf = std::make_shared<EuclideanFibre>(1);
  TwistedFibre T(-1, 1, leaf, ScalarField::constant(2, 2.0));
  CHECK(metric(T, v2(0.1, 0.2), v2(0, 1), v2(0, 1)) == doctest::Approx(4.0));
  CHECK_THROWS_AS(metric(S, v2(0.0, 0.0), v2(1, 0), v2(1, 0)), DomainError);
}

TEST_CASE("christoffel symbols") {
  EuclideanFibre E(3);
  const auto G = E.christoffel(v3(1, 2, 3));
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(G(k, i, j) == 0.0);

  SphereFibre S(2);
  const Vec x = v2(0.7, 1.1);
  const auto GS = S.christoffel(x);
  CHECK(GS(0, 1, 1) == doctest::Approx(-std::sin(0.7) * std::cos(0.7)).epsilon(1e-12));
  const double oracle = testing::christoffel_oracle([&](const Vec& y) { return S.metric(y); }, x, 0, 1, 1);
  CHECK(GS(0, 1, 1) == doctest::Approx(oracle).epsilon(1e-8));

  auto leaf = std::make_shared<SphereFibre>(2);
  TwistedFibre T(-0.5, 3.0, leaf, ScalarField::parse("exp(s) + a1^2", {"s", "a1", "a2"}));
  const Vec p = v3(0.3, 1.2, 0.4);
  const auto GT = T.christoffel(p);
  const double mu = std::exp(0.3) + 1.44, mus = std::exp(0.3);
  const Mat gS = leaf->metric(p.tail(2));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CHECK(GT(0, 1 + a, 1 + b) == doctest::Approx(-mu * mus * gS(a, b)).epsilon(1e-10));
      const double o = testing::christoffel_oracle([&](const Vec& y) { return T.metric(y); }, p, 0, 1 + a, 1 + b);
      CHECK(GT(0, 1 + a, 1 + b) == doctest::Approx(o).epsilon(1e-7));
    }
}

TEST_CASE("metric compatibility on sampled grids") {
  // analytic jets against plain differences of the metric
  std::vector<std::shared_ptr<FibreModel>> models{
      std::make_shared<SphereFibre>(3, 1.7), std::make_shared<HyperbolicFibre>(3, -0.5),
      std::make_shared<ProductFibre>(std::vector<FibrePtr>{std::make_shared<SphereFibre>(2),
                                                            std::make_shared<HyperbolicFibre>(1)})};
  for (const auto& F : models) {
    for (int trial = 0; trial < 10; ++trial) {
      Vec x = random_vec(F->dim(), 0.2, 0.6);
      const MetricJet j = F->jet(x);
      for (int k = 0; k < F->dim(); ++k) {
        const double h = 1e-6;
        Vec p = x, m = x;
        p[k] += h;
        m[k] -= h;
        const Mat d = (F->metric(p) - F->metric(m)) / (2 * h);
        CHECK((d - j.deriv[static_cast<std::size_t>(k)]).norm() <= 1e-6 * std::max(1.0, d.norm()));
      }
    }
  }
}

TEST_CASE("geodesics") {
  EuclideanFibre E(3);
  auto rec = geodesic(E, Vec::Zero(3), v3(1, 0, 0), {3.0});
  CHECK((rec.x[0] - v3(3, 0, 0)).norm() < 1e-15);

  SphereFibre S(2);
  const Vec x = v2(pi / 2, 0.3);
  const Vec antipode = S.chart(-S.embed(x));
  const auto st = geodesic_at(S, x, v2(1, 0), pi);
  CHECK(distance(S, st.x, antipode) < 1e-9);

  auto T = linear_twist();
  const Vec p = v2(0.2, 0.5);
  GeodesicRecord g = geodesic(*T, p, v2(1, 0), {0.5, 1.0, 2.0});
  for (std::size_t i = 0; i < g.s.size(); ++i) {
    CHECK(g.x[i][0] == doctest::Approx(0.2 + g.s[i]).epsilon(1e-10));
    CHECK(g.x[i][1] == doctest::Approx(0.5).epsilon(1e-10));
  }

  // speed conservation on a numerically integrated geodesic
  const Vec v = v2(0.3, 0.4);
  const double speed0 = norm(*T, p, v);
  g = geodesic(*T, p, v, {0.5, 1.0, 1.5});
  for (std::size_t i = 0; i < g.s.size(); ++i)
    CHECK(std::abs(norm(*T, g.x[i], g.v[i]) - speed0) <= 1e-8 * speed0);
}

TEST_CASE("exponential map and distance") {
  EuclideanFibre E(2);
  CHECK((exp_map(E, v2(1, 2), v2(0.5, -1)) - v2(1.5, 1)).norm() < 1e-15);

  SphereFibre S(3);
  const Vec pole_near = v3(0.4, 1.0, 0.2);
  CHECK(distance(S, v3(1e-2, 1.0, 0.5), v3(0.9, 1.0, 0.5)) == doctest::Approx(0.89).epsilon(1e-12));

  HyperbolicFibre H(2, -1.0);
  const Vec o = Vec::Zero(2);
  for (double s : {0.3, 1.0, 2.5}) {
    const Vec y = exp_map(H, o, v2(s / 2.0, 0.0));  // metric at origin is 4 delta
    CHECK(distance(H, o, y) == doctest::Approx(s).epsilon(1e-12));
  }

  // distance(x, exp(x, v)) = |v|
  std::vector<std::shared_ptr<FibreModel>> closed{std::make_shared<SphereFibre>(3),
                                                  std::make_shared<HyperbolicFibre>(3, -2.0),
                                                  std::make_shared<EuclideanFibre>(3)};
  for (const auto& F : closed)
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x = random_vec(3, 0.4, 0.6);
      Vec v = random_vec(3, -0.3, 0.3);
      const Vec y = exp_map(*F, x, v);
      if (!F->contains(y)) continue;
      CHECK(std::abs(distance(*F, x, y) - norm(*F, x, v)) <= 1e-8);
      CHECK(std::abs(distance(*F, x, y) - distance(*F, y, x)) <= 1e-12);
    }

  auto T = linear_twist();
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = v2(uniform(0.0, 0.5), uniform(-0.5, 0.5));
    const Vec v = v2(uniform(-0.3, 0.3), uniform(-0.3, 0.3));
    const Vec y = exp_map(*T, x, v);
    CHECK(std::abs(distance(*T, x, y) - norm(*T, x, v)) <= 1e-6);
    const Vec back = log_map(*T, x, y);
    CHECK((back - v).norm() <= 1e-7);
  }
  (void)pole_near;
}

TEST_CASE("position field") {
  EuclideanFibre E(3);
  const Vec xs = v3(0.1, -0.2, 0.3), x = v3(1, 1, 1);
  CHECK((position_field(E, xs, x) - (x - xs)).norm() < 1e-14);

  SphereFibre S(2);
  const Vec c = v2(1.0, 0.2);
  const Vec p = geodesic_at(S, c, v2(0.0, 1.0 / std::sin(1.0)), 0.8).x;
  CHECK(norm(S, p, position_field(S, c, p)) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(position_field(S, c, c).norm() < 1e-14);

  // shooting-based position field against a dense geodesic from the centre
  auto T = linear_twist();
  const Vec centre = v2(0.3, 0.1);
  const Vec dir = v2(0.4, 0.5);
  const auto rec = geodesic(*T, centre, dir, {0.25, 0.5, 0.75, 1.0});
  for (std::size_t i = 0; i < rec.s.size(); ++i) {
    const Vec P = position_field(*T, centre, rec.x[i]);
    CHECK((P - rec.s[i] * rec.v[i]).norm() <= 1e-6);
  }
}

TEST_CASE("gradient and hessian") {
  EuclideanFibre E(3);
  const auto h = ScalarField::parse("sqrt(x1^2 + x2^2 + x3^2)", {"x1", "x2", "x3"});
  const Vec x = v3(0.5, -1.0, 2.0);
  CHECK(norm(E, x, gradient(E, h, x)) == doctest::Approx(1.0).epsilon(1e-13));
  const Mat Hs = hessian(E, h, x);
  // oracle: differences of the analytic gradient, restricted to the radial complement
  Mat Hfd(3, 3);
  for (int k = 0; k < 3; ++k) {
    Vec p = x, m = x;
    p[k] += 1e-6;
    m[k] -= 1e-6;
    Hfd.col(k) = (h.gradient(p) - h.gradient(m)) / 2e-6;
  }
  const Mat perp = orthonormal_complement(Mat::Identity(3, 3), x);
  const Mat restricted = perp.transpose() * Hs * perp;
  CHECK((restricted - Mat::Identity(2, 2) / x.norm()).norm() < 1e-12);
  CHECK((perp.transpose() * Hfd * perp - restricted).norm() < 1e-7);

  SphereFibre S(2);
  const Vec c = v2(1.2, 0.3);
  const auto dist = ScalarField::from_callable(2, [&](const Vec& y) { return S.distance_closed(c, y); });
  for (int trial = 0; trial < 10; ++trial) {
    const Vec y = v2(uniform(0.5, 2.0), uniform(-1.0, 1.5));
    if (S.distance_closed(c, y) < 0.1) continue;
    CHECK(norm(S, y, gradient(S, dist, y)) == doctest::Approx(1.0).epsilon(1e-8));
    const Mat H = hessian(S, dist, y);
    CHECK(std::abs(H(0, 1) - H(1, 0)) <= 1e-7);
  }
}

TEST_CASE("sectional curvature") {
  SphereFibre S(3);
  HyperbolicFibre H(3, -1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = random_vec(3, 0.4, 0.6);
    const Vec u = random_vec(3), v = random_vec(3);
    CHECK(sectional_curvature(S, x, u, v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sectional_curvature(H, x, u, v) == doctest::Approx(-1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sectional_curvature(S, v3(0.5, 0.5, 0.5), v3(1, 0, 0), v3(2, 0, 0)), DegenerateError);

  // twisted ds^2 + mu(s)^2 g_S: planes containing d_s have curvature -mu_ss / mu
  auto leaf = std::make_shared<SphereFibre>(2);
  TwistedFibre T(-1.0, 2.0, leaf, ScalarField::parse("cosh(s) + 0.5*s^2", {"s", "a1", "a2"}));
  const Vec p = v3(0.4, 1.1, 0.3);
  const double mu = std::cosh(0.4) + 0.08, mss = std::cosh(0.4) + 1.0;
  for (int trial = 0; trial < 5; ++trial) {
    Vec w = random_vec(3);
    w[0] = 0.0;
    CHECK(sectional_curvature(T, p, v3(1, 0, 0), w) == doctest::Approx(-mss / mu).epsilon(1e-8));
  }
}

TEST_CASE("jacobi transport") {
  EuclideanFibre E(2);
  auto rec = jacobi_transport(E, v2(0, 0), v2(1, 0), v2(0.1, 0.2), v2(0.3, -0.4), {0.5, 2.0});
  CHECK((rec.J[1] - (v2(0.1, 0.2) + 2.0 * v2(0.3, -0.4))).norm() < 1e-10);
  rec = jacobi_transport(E, v2(0, 0), v2(1, 0), Vec::Zero(2), Vec::Zero(2), {1.0});
  CHECK(rec.J[0].norm() == 0.0);

  SphereFibre S(2);
  const Vec x = v2(pi / 2, 0.0);
  const Vec v = v2(0.0, 1.0);  // along the equator
  const Vec w = v2(1.0, 0.0);
  const std::vector<double> params{0.5, 1.0, 2.0, 3.0};
  rec = jacobi_transport(S, x, v, Vec::Zero(2), w, params);
  for (std::size_t i = 0; i < params.size(); ++i)
    CHECK(norm(S, rec.x[i], rec.J[i]) == doctest::Approx(std::sin(params[i])).epsilon(1e-9));
}

TEST_CASE("position field and Jacobi identity") {
  EuclideanFibre E(3);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec w = random_vec(3);
    const auto r = check_lemma_position_jacobi(E, Vec::Zero(3), random_vec(3), w);
    CHECK(r.lhs == doctest::Approx(w.squaredNorm()).epsilon(1e-9));
    CHECK(r.rhs == doctest::Approx(w.squaredNorm()).epsilon(1e-7));
  }

  // distance sphere on S^2: theta cot(theta) |w|^2; radial: |w|^2
  SphereFibre S(2);
  const Vec c = v2(pi / 2, 0.0);
  const double th = 0.9;
  const Vec x = v2(pi / 2, th);
  const Vec tangential = v2(1.0, 0.0);
  auto r = check_lemma_position_jacobi(S, c, x, tangential);
  CHECK(r.lhs == doctest::Approx(th / std::tan(th)).epsilon(1e-8));
  CHECK(r.rhs == doctest::Approx(th / std::tan(th)).epsilon(1e-7));
  r = check_lemma_position_jacobi(S, c, x, v2(0.0, 1.0));
  CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-7));
}
