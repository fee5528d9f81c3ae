#include "nullkit/fixtures.hpp"
#include "nullkit/nullhyp.hpp"

#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace nullkit;
using testing::random_vec;
using testing::uniform;

namespace {

const double pi = std::numbers::pi;

/// Cone t = t_* + d_F(x_*, x) in a space with f = 1.
GraphHypersurface static_cone(const fixtures::SpacePtr& M, const Vec& xs, double ts = 0.0) {
  auto d = distance_field(M->fibre_ptr(), xs);
  auto h = ScalarField::compose([ts](double u) { return std::array<double, 3>{u + ts, 1.0, 0.0}; }, d);
  return GraphHypersurface(M, h);
}

std::vector<Vec> shell(const Vec& centre, double r_lo, double r_hi, int count, const FibreModel& F) {
  std::vector<Vec> out;
  while (static_cast<int>(out.size()) < count) {
    Vec dir = random_vec(static_cast<int>(centre.size()));
    dir /= norm(F, centre, dir);
    const Vec x = exp_map(F, centre, uniform(r_lo, r_hi) * dir);
    if (F.contains(x)) out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("null graph validation") {
  const auto M = fixtures::minkowski(4);
  const Vec xs = Vec::Zero(3);
  const auto cone = static_cone(M, xs);
  const auto grid = shell(xs, 0.3, 2.0, 20, M->fibre());
  CHECK(validate_null_graph(cone, grid).max_residual < 1e-12);
  CHECK(radial_identity_check(cone, grid).max_residual < 1e-8);

  const GraphHypersurface flat(M, ScalarField::constant(3, 0.5));
  const auto r = validate_null_graph(flat, grid);
  CHECK(r.max_residual == doctest::Approx(1.0));

  for (const auto& name : fixtures::table1_names()) {
    const auto row = fixtures::table1(name, 4);
    CHECK(validate_null_graph(*row.graph, row.grid).max_residual <= 1e-8);
    CHECK(radial_identity_check(*row.graph, row.grid).max_residual <= 1e-5);
  }

  // a non-null graph reports a residual for the radial identity without asserting
  const GraphHypersurface bad(M, ScalarField::parse("2*x1 + x2^2", {"x1", "x2", "x3"}));
  CHECK(radial_identity_check(bad, grid).max_residual > 0.1);

  GrwSpace ads = *fixtures::anti_de_sitter(3);
  const GraphHypersurface leaving(std::make_shared<GrwSpace>(ads), ScalarField::constant(2, 2.0));
  CHECK_THROWS_AS(validate_null_graph(leaving, {Vec::Zero(2)}), DomainError);
}

TEST_CASE("xi field and screen") {
  const auto M = fixtures::minkowski(3);
  const auto cone = static_cone(M, Vec::Zero(2));
  Vec x(2);
  x << 3.0, 4.0;
  const Vec xi = xi_field(cone, x);
  CHECK(xi[0] == -1.0);
  CHECK(xi[1] == doctest::Approx(-0.6));
  CHECK(xi[2] == doctest::Approx(-0.8));
  const Mat E = screen_basis(cone, x);
  REQUIRE(E.cols() == 1);
  CHECK(std::abs(E(1, 0) * 0.6 + E(2, 0) * 0.8) < 1e-14);

  for (const auto& name : fixtures::table1_names()) {
    const auto row = fixtures::table1(name, 5);
    const auto& L = *row.graph;
    std::mt19937_64 rng(7);
    for (const Vec& y : row.grid) {
      const Vec p = L.point(y), v = xi_field(L, y);
      const Mat g = L.space().metric(p);
      CHECK(std::abs(v.dot(g * v)) <= 1e-9);
      CHECK(std::abs(v.dot(g * L.space().zeta(p)) - 1.0) <= 1e-9);
      const Mat F = screen_basis(L, y, &rng);
      CHECK(F.cols() == 3);
      CHECK((F.transpose() * g * F - Mat::Identity(3, 3)).norm() <= 1e-9);
      CHECK((F.transpose() * g * v).norm() <= 1e-9);
    }
  }
}

TEST_CASE("second fundamental form and mean curvature") {
  // cone in Minkowski: B = g / d
  const auto M = fixtures::minkowski(4);
  const Vec xs = Vec::Zero(3);
  const auto cone = static_cone(M, xs);
  for (const Vec& x : shell(xs, 0.5, 2.0, 10, M->fibre())) {
    const double d = x.norm();
    const Mat E = screen_basis(cone, x);
    const Mat B = second_fundamental_matrix(cone, x, E);
    CHECK((B - Mat::Identity(2, 2) / d).norm() <= 1e-9);
    CHECK(mean_curvature(cone, x) == doctest::Approx(2.0 / d).epsilon(1e-9));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(second_fundamental_form_connection(cone, x, E.col(i), E.col(j)) -
                       second_fundamental_form(cone, x, E.col(i), E.col(j))) <= 1e-5);
  }

  // Einstein static: H = (n-2) cot d
  const auto ES = fixtures::einstein_static(5);
  Vec c(4);
  c << 1.3, 1.4, 1.2, 0.5;
  const auto esc = static_cone(ES, c, 0.2);
  std::mt19937_64 rng(11);
  for (const Vec& x : shell(c, 0.4, 2.2, 10, ES->fibre())) {
    const double d = distance(ES->fibre(), c, x);
    CHECK(mean_curvature(esc, x) == doctest::Approx(3.0 / std::tan(d)).epsilon(1e-7).scale(1.0));
    const double H1 = second_fundamental_matrix(esc, x, screen_basis(esc, x, &rng)).trace();
    const double H2 = second_fundamental_matrix(esc, x, screen_basis(esc, x, &rng)).trace();
    CHECK(std::abs(H1 - H2) <= 1e-9);
    const Mat E = screen_basis(esc, x);
    CHECK(std::abs(second_fundamental_form_connection(esc, x, E.col(0), E.col(1)) -
                   second_fundamental_form(esc, x, E.col(0), E.col(1))) <= 1e-5);
    CHECK(std::abs(second_fundamental_form_connection(esc, x, E.col(2), E.col(2)) -
                   second_fundamental_form(esc, x, E.col(2), E.col(2))) <= 1e-5);
  }

  for (const auto& name : fixtures::table1_names()) {
    const auto row = fixtures::table1(name, 4);
    for (const Vec& y : row.grid) {
      const Mat E = screen_basis(*row.graph, y);
      CHECK(second_fundamental_matrix(*row.graph, y, E).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK(std::abs(mean_curvature(*row.graph, y)) <= 1e-6);
      CHECK(std::abs(second_fundamental_form_connection(*row.graph, y, E.col(0), E.col(1))) <= 1e-5);
    }
  }
}

TEST_CASE("umbilicity") {
  const auto M = fixtures::minkowski(4);
  const Vec xs = Vec::Zero(3);
  const auto grid = shell(xs, 0.5, 1.5, 10, M->fibre());
  const auto rep = umbilicity_test(static_cone(M, xs), grid, 3);
  CHECK(rep.umbilic);
  CHECK(rep.max_residual <= 1e-6);

  // perturbed cone t = |x| + eps * bump
  const auto bumped = GraphHypersurface(
      M, ScalarField::parse("sqrt(x1^2 + x2^2 + x3^2) + 0.01*exp(-4*((x1-0.7)^2 + x2^2 + x3^2))", {"x1", "x2", "x3"}));
  std::vector<Vec> near;
  for (int i = 0; i < 5; ++i) {
    Vec x(3);
    x << 0.7 + 0.1 * i, 0.05 * i, 0.1;
    near.push_back(x);
  }
  const auto bad = umbilicity_test(bumped, near, 3);
  CHECK_FALSE(bad.umbilic);
  CHECK(bad.max_residual > 1e-3);

  // n = 3: screen is a line and the residual vanishes identically
  const auto M3 = fixtures::minkowski(3);
  const GraphHypersurface any(M3, ScalarField::parse("x1 + 0.1*x2^2", {"x1", "x2"}));
  Vec y(2);
  y << 0.2, 0.3;
  CHECK(umbilicity_test(any, {y}, 1).max_residual == 0.0);

  // determinism in the seed
  const auto a = umbilicity_test(bumped, near, 99), b = umbilicity_test(bumped, near, 99);
  for (std::size_t i = 0; i < near.size(); ++i) CHECK(a.samples[i].sampled_residual == b.samples[i].sampled_residual);
  for (const auto& s : a.samples) CHECK(s.sampled_residual <= s.residual + 1e-15);
}

TEST_CASE("null sectional curvature from rho") {
  // both routes: xi(rho) - rho^2 and the plane formula scaled by 1/f^2
  const auto M = fixtures::minkowski(4);
  const auto cone = static_cone(M, Vec::Zero(3));
  Vec x(3);
  x << 0.6, -0.4, 0.8;
  CHECK(std::abs(null_sectional_from_rho(cone, x)) <= 1e-6);

  const auto ES = fixtures::einstein_static(4);
  Vec c(3);
  c << 1.4, 1.2, 0.3;
  const auto esc = static_cone(ES, c);
  for (const Vec& y : shell(c, 0.5, 2.0, 5, ES->fibre())) {
    const Vec grad = gradient(ES->fibre(), esc.h(), y);
    const Vec w = -grad / grad.dot(ES->fibre().metric(y) * grad) * std::sqrt(grad.dot(ES->fibre().metric(y) * grad));
    const Vec v = screen_basis(esc, y).col(0).tail(3);
    const double K = null_sectional_curvature(*ES, esc.point(y), v, w);
    CHECK(K == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(null_sectional_from_rho(esc, y) == doctest::Approx(K).epsilon(1e-4));
  }

  const auto row = fixtures::table1("de-sitter", 4);
  CHECK(std::abs(null_sectional_from_rho(*row.graph, row.grid[3])) <= 1e-4);
}
