#include "nullkit/fixtures.hpp"

#include <limits>
#include <numbers>

namespace nullkit::fixtures {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double pi = std::numbers::pi;

void require_dim(int n) {
  if (n < 3) throw Error("fixture spacetimes need dimension at least 3");
}

/// Deterministic sample of the leaf chart.
std::vector<Vec> leaf_samples(const FibreModel& leaf, int count) {
  const int m = leaf.dim();
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    Vec z(m);
    for (int j = 0; j < m; ++j) {
      const double u = std::fmod(0.37 * (i + 1) * (j + 2) + 0.21 * j, 1.0);  // low-discrepancy-ish
      if (leaf.kind() == "sphere")
        z[j] = j == m - 1 ? -2.0 + 4.0 * u : 0.6 + 1.9 * u;
      else if (leaf.kind() == "hyperbolic")
        z[j] = (-0.4 + 0.8 * u) / std::sqrt(static_cast<double>(m));
      else
        z[j] = -1.0 + 2.0 * u;
    }
    out.push_back(z);
  }
  return out;
}

}  // namespace

SpacePtr minkowski(int n) {
  require_dim(n);
  return std::make_shared<GrwSpace>(WarpingProfile::constant(1.0, -kInf, kInf), std::make_shared<EuclideanFibre>(n - 1));
}

SpacePtr de_sitter(int n) {
  require_dim(n);
  return std::make_shared<GrwSpace>(WarpingProfile::parse("cosh(t)", -kInf, kInf), std::make_shared<SphereFibre>(n - 1));
}

SpacePtr einstein_static(int n) {
  require_dim(n);
  return std::make_shared<GrwSpace>(WarpingProfile::constant(1.0, -kInf, kInf), std::make_shared<SphereFibre>(n - 1));
}

SpacePtr anti_de_sitter(int n) {
  require_dim(n);
  return std::make_shared<GrwSpace>(WarpingProfile::parse("cos(t)", -pi / 2, pi / 2),
                                    std::make_shared<HyperbolicFibre>(n - 1));
}

FibrePtr warped_fibre(double a, double b, const std::string& mu, FibrePtr leaf) {
  std::vector<std::string> vars{"s"};
  for (const auto& c : leaf->coordinate_names()) vars.push_back(c);
  return std::make_shared<TwistedFibre>(a, b, leaf, ScalarField::parse(mu, vars));
}

std::vector<std::string> table1_names() { return {"minkowski", "de-sitter", "anti-de-sitter"}; }

Table1Row table1(const std::string& name, int n) {
  require_dim(n);
  const int m = n - 1;
  Table1Row row;
  row.name = name;
  FibrePtr leaf;
  FibrePtr fibre;
  std::string h;
  std::shared_ptr<GrwSpace> M;
  std::vector<double> s_values;
  if (name == "minkowski") {
    leaf = std::make_shared<EuclideanFibre>(m - 1);
    fibre = warped_fibre(-kInf, kInf, "1", leaf);
    M = std::make_shared<GrwSpace>(WarpingProfile::constant(1.0, -kInf, kInf), fibre);
    h = "s";
    s_values = {-2.0, -0.7, 0.0, 0.9, 2.5};
  } else if (name == "de-sitter") {
    leaf = std::make_shared<SphereFibre>(m - 1);
    fibre = warped_fibre(-pi / 2, pi / 2, "cos(s)", leaf);
    M = std::make_shared<GrwSpace>(WarpingProfile::parse("cosh(t)", -kInf, kInf), fibre);
    h = "2*atanh(tan(s/2))";
    s_values = {-1.2, -0.6, 0.0, 0.5, 1.1};
  } else if (name == "anti-de-sitter") {
    leaf = std::make_shared<HyperbolicFibre>(m - 1);
    fibre = warped_fibre(-kInf, kInf, "cosh(s)", leaf);
    M = std::make_shared<GrwSpace>(WarpingProfile::parse("cos(t)", -pi / 2, pi / 2), fibre);
    h = "2*atan(tanh(s/2))";
    s_values = {-2.0, -0.8, 0.0, 0.7, 1.6};
  } else {
    throw Error("unknown standard fixture: " + name);
  }
  const auto names = fibre->coordinate_names();
  row.graph = std::make_shared<GraphHypersurface>(M, ScalarField::parse(h, names));
  for (double s : s_values)
    for (const Vec& z : leaf_samples(*leaf, 4)) {
      Vec x(m);
      x[0] = s;
      x.tail(m - 1) = z;
      row.grid.push_back(x);
    }
  return row;
}

}  // namespace nullkit::fixtures
