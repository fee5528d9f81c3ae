#include "nullkit/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace nullkit;

TEST_CASE("gauss-kronrod quadrature") {
  auto r = num::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  r = num::integrate([](double x) { return 1.0 / std::cosh(x); }, -INFINITY, INFINITY);
  CHECK(r.value == doctest::Approx(std::numbers::pi).epsilon(1e-10));
  r = num::integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  r = num::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  r = num::integrate([](double x) { return x * x; }, 1.0, 0.0);
  CHECK(r.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("root finders") {
  const double r = num::brent([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
  CHECK(std::abs(std::cos(r) - r) < 1e-15);
  CHECK(num::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(num::brent([](double x) { return x * x + 1.0; }, -1.0, 1.0), ConvergenceError);
}

TEST_CASE("dormand-prince with dense output") {
  // harmonic oscillator
  num::OdeRhs rhs = [](double, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  Vec y0(2);
  y0 << 0.0, 1.0;
  const auto sol = num::integrate_ode(rhs, 0.0, y0, 10.0);
  for (double s : {0.1, 1.3, 4.7, 9.99}) {
    CHECK(sol(s)[0] == doctest::Approx(std::sin(s)).epsilon(1e-9));
    CHECK(sol(s)[1] == doctest::Approx(std::cos(s)).epsilon(1e-9));
  }
  const auto zeros = num::sign_changes(sol, [](double, const Vec& y) { return y[0]; });
  // an exact zero at the start is reported as well
  REQUIRE(zeros.size() == 4);
  CHECK(zeros[0] == 0.0);
  for (std::size_t k = 1; k < 4; ++k) CHECK(zeros[k] == doctest::Approx(k * std::numbers::pi).epsilon(1e-9));
  CHECK_THROWS_AS(sol(10.5), RangeError);

  // backwards integration and breakpoints
  const std::vector<double> bps{-0.5, -1.25};
  const auto back = num::integrate_ode(rhs, 0.0, y0, -2.0, {}, {}, bps);
  CHECK(back(-2.0)[0] == doctest::Approx(std::sin(-2.0)).epsilon(1e-9));
  bool hit = false;
  for (const auto& st : back.steps()) hit = hit || std::abs(st.s0 - (-1.25)) < 1e-15;
  CHECK(hit);

  // guard: stops where y0 leaves (-inf, 0.5]
  const auto g = num::integrate_ode(rhs, 0.0, y0, 3.0, {}, [](double, const Vec& y) { return y[0] <= 0.5; });
  CHECK(g.stopped());
  CHECK(g.stop_parameter() == doctest::Approx(std::asin(0.5)).epsilon(1e-8));
}

TEST_CASE("richardson extrapolation") {
  // forward difference of exp at 0 has error expansion in h
  std::vector<double> vals;
  for (int k = 0; k < 4; ++k) {
    const double h = 0.1 / std::pow(2.0, k);
    vals.push_back((std::exp(h) - 1.0) / h);
  }
  CHECK(num::richardson(vals, 0.5, 1) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("hermite interpolation") {
  auto f = [](double x) { return x * x * x - x; };
  auto df = [](double x) { return 3 * x * x - 1; };
  for (double x : {0.2, 0.5, 0.9}) {
    CHECK(num::hermite(0, 1, f(0), f(1), df(0), df(1), x) == doctest::Approx(f(x)).epsilon(1e-14));
    CHECK(num::hermite_derivative(0, 1, f(0), f(1), df(0), df(1), x) == doctest::Approx(df(x)).epsilon(1e-13));
  }
}
