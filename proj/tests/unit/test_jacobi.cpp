#include "nullkit/cone.hpp"
#include "nullkit/fixtures.hpp"
#include "nullkit/jacobi.hpp"

#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace nullkit;

namespace {

const double pi = std::numbers::pi;
const double inf = std::numeric_limits<double>::infinity();

std::shared_ptr<const GrwSpace> space(const std::string& f, FibrePtr F) {
  return std::make_shared<GrwSpace>(WarpingProfile::parse(f, -inf, inf), std::move(F));
}

/// Point on S^3 where the a3 circle is a great circle well inside the chart.
Vec equator_point(double a3) {
  Vec x(3);
  x << pi / 2, pi / 2, a3;
  return x;
}

}  // namespace

TEST_CASE("Ricci along null geodesics") {
  std::vector<double> ss{0.0, 0.3, 1.0, 2.2};
  {
    const auto M = fixtures::minkowski(4);
    const NullGeodesic g(*M, 0.0, Vec::Zero(3), Vec::Unit(3, 1), Orientation::Future);
    for (double r : ricci_along(*M, g, ss)) CHECK(std::abs(r) <= 1e-12);
  }
  {
    const auto M = fixtures::de_sitter(4);
    const NullGeodesic g(*M, -0.5, equator_point(-2.0), Vec::Unit(3, 2), Orientation::Future);
    for (double r : ricci_along(*M, g, {0.0, 0.3, 1.0})) CHECK(std::abs(r) <= 1e-10);
  }
  {
    const auto M = fixtures::einstein_static(5);
    Vec x(4);
    x << 1.0, 1.2, 1.4, 0.3;
    Vec u = testing::random_vec(4);
    u /= norm(M->fibre(), x, u);
    const NullGeodesic g(*M, 0.0, x, u, Orientation::Future);
    for (double r : ricci_along(*M, g, ss)) CHECK(r == doctest::Approx(3.0).epsilon(1e-12));
  }
  // closed form against the chart Ricci tensor
  for (const char* f : {"cosh(t/2)", "1 + 0.1*sin(t)", "exp(t/3)"}) {
    const auto M = space(f, std::make_shared<SphereFibre>(3));
    Vec p(4);
    p << 0.4, 1.1, 1.3, -0.2;
    Vec X = testing::random_vec(3);
    X /= norm(M->fibre(), p.tail(3), X);
    Vec V(4);
    V[0] = 1.0 / M->warping().f(p[0]);
    V.tail(3) = X / (M->warping().f(p[0]) * M->warping().f(p[0]));
    CHECK(ricci_null(*M, p, V) == doctest::Approx(V.dot(M->ricci(p) * V)).epsilon(1e-7));
  }
}

TEST_CASE("scalar Jacobi equation") {
  {
    const auto M = fixtures::minkowski(4);
    const NullGeodesic g(*M, 0.0, Vec::Zero(3), Vec::Unit(3, 0), Orientation::Future);
    CHECK(scalar_jacobi(*M, g, 20.0).zeros.empty());
  }
  {
    const auto M = fixtures::de_sitter(4);
    const NullGeodesic g(*M, 0.0, equator_point(-2.0), Vec::Unit(3, 2), Orientation::Future);
    const auto rep = scalar_jacobi(*M, g, 20.0);
    CHECK(rep.zeros.empty());
  }
  {
    const auto M = fixtures::einstein_static(5);
    const NullGeodesic g(*M, 0.0, Vec::Constant(4, 1.0), Vec::Unit(4, 0), Orientation::Future);
    const auto rep = scalar_jacobi(*M, g, 7.0);
    REQUIRE(rep.zeros.size() == 2);
    CHECK(rep.zeros[0].s == doctest::Approx(pi).epsilon(1e-10));
    CHECK(rep.zeros[0].multiplicity == 3);
    CHECK(rep.zeros[1].s == doctest::Approx(2 * pi).epsilon(1e-10));
  }
}

TEST_CASE("full Jacobi system") {
  SUBCASE("Einstein static, n = 5") {
    const auto M = fixtures::einstein_static(5);
    Vec x(4);
    x << pi / 2, pi / 2, pi / 2, -2.0;
    Vec V(5);
    V << 1.0, 0.0, 0.0, 0.0, 1.0;
    const auto full = full_jacobi_system(*M, GrwSpace::point(0.0, x), V, 3.6);
    CHECK(full.proportionality_residual <= 1e-6);
    REQUIRE(full.zeros.size() == 1);
    CHECK(std::abs(full.zeros[0].s - pi) <= 1e-6);
    CHECK(full.zeros[0].kernel_rank == 3);
    const NullGeodesic g(*M, 0.0, x, Vec::Unit(4, 3), Orientation::Future);
    const auto scalar = scalar_jacobi(*M, g, 3.6);
    REQUIRE(scalar.zeros.size() == 1);
    CHECK(std::abs(scalar.zeros[0].s - full.zeros[0].s) <= 1e-6);
  }
  SUBCASE("RW with a varying warping, sphere fibre") {
    const auto M = space("1 + 0.1*sin(t)", std::make_shared<SphereFibre>(3));
    const double ts = 0.2;
    const Vec x = equator_point(-2.6);
    const NullGeodesic g(*M, ts, x, Vec::Unit(3, 2), Orientation::Future);
    const double s_max = 3.8;
    const auto scalar = scalar_jacobi(*M, g, s_max);
    const auto full = full_jacobi_system(*M, GrwSpace::point(ts, x), g.velocity(0.0), s_max);
    CHECK(full.proportionality_residual <= 1e-6);
    REQUIRE(scalar.zeros.size() >= 1);
    REQUIRE(full.zeros.size() == scalar.zeros.size());
    for (std::size_t i = 0; i < full.zeros.size(); ++i) {
      CHECK(std::abs(full.zeros[i].s - scalar.zeros[i].s) <= 1e-6);
      CHECK(full.zeros[i].kernel_rank == 2);
    }
  }
  SUBCASE("proportionality for k = -1, 0, 1") {
    std::vector<std::pair<FibrePtr, Vec>> fibres{
        {std::make_shared<HyperbolicFibre>(3), Vec::Constant(3, -0.2)},
        {std::make_shared<EuclideanFibre>(3), Vec::Constant(3, 0.3)},
        {std::make_shared<SphereFibre>(3), equator_point(-2.0)}};
    for (const auto& [F, x] : fibres) {
      const auto M = space("cosh(t/2)", F);
      Vec u = F->kind() == "sphere" ? Vec(Vec::Unit(3, 2)) : Vec(Vec::Constant(3, 1.0));
      u /= norm(*F, x, u);
      const NullGeodesic g(*M, 0.1, x, u, Orientation::Future);
      const auto full = full_jacobi_system(*M, GrwSpace::point(0.1, x), g.velocity(0.0), 0.4);
      CHECK(full.proportionality_residual <= 1e-6);
      const auto ric = ricci_along(*M, g, {full.s[100], full.s[1500]});
      CHECK(full.trace[100] == doctest::Approx(ric[0]).epsilon(1e-6));
      CHECK(full.trace[1500] == doctest::Approx(ric[1]).epsilon(1e-6));
    }
  }
  SUBCASE("mixed direction in a product of spheres is not proportional") {
    const auto S2 = std::make_shared<SphereFibre>(2);
    const auto M = space("1", std::make_shared<ProductFibre>(std::vector<FibrePtr>{S2, S2}));
    Vec x(4);
    x << pi / 2, -1.0, pi / 2, 0.5;
    const double a = 0.6;
    Vec V(5);
    V << 1.0, 0.0, std::cos(a), 0.0, std::sin(a);
    const auto full = full_jacobi_system(*M, GrwSpace::point(0.0, x), V, 1.0);
    CHECK(full.proportionality_residual > 1e-3);
  }
}

TEST_CASE("umbilic consistency of the two curvature routes") {
  {
    const auto M = fixtures::minkowski(4);
    const auto L = cone_as_graph(NullCone{M, 0.0, Vec::Zero(3), Orientation::Future});
    std::vector<Vec> grid;
    for (int i = 0; i < 6; ++i) grid.push_back(testing::random_vec(3, 0.3, 1.5));
    CHECK(umbilic_consistency(L, grid).max_residual <= 1e-5);
  }
  {
    const auto M = fixtures::einstein_static(4);
    Vec xs(3);
    xs << 1.2, 1.4, 0.3;
    const auto L = cone_as_graph(NullCone{M, 0.0, xs, Orientation::Future});
    std::vector<Vec> grid;
    for (int i = 0; i < 6; ++i) {
      Vec u = testing::random_vec(3);
      u /= norm(M->fibre(), xs, u);
      grid.push_back(exp_map(M->fibre(), xs, testing::uniform(0.4, 2.0) * u));
    }
    const auto rep = umbilic_consistency(L, grid);
    CHECK(rep.max_residual <= 1e-4);
    for (const auto& s : rep.samples) CHECK(s.ricci_route > 0.0);
  }
  {
    const auto row = fixtures::table1("de-sitter", 4);
    const auto rep = umbilic_consistency(*row.graph, {row.grid[1], row.grid[6], row.grid[13]});
    CHECK(rep.max_residual <= 1e-5);
    for (const auto& s : rep.samples) CHECK(std::abs(s.rho_route) <= 1e-5);
  }
}
