#pragma once

// Model spacetimes and the three totally geodesic graphs used throughout the
// tests, the acceptance suite and the `fixtures` command.

#include "nullkit/nullhyp.hpp"

#include <memory>
#include <string>

namespace nullkit::fixtures {

using SpacePtr = std::shared_ptr<const GrwSpace>;

/// R x_1 R^{n-1}.
SpacePtr minkowski(int n);
/// R x_cosh S^{n-1}.
SpacePtr de_sitter(int n);
/// R x_1 S^{n-1}.
SpacePtr einstein_static(int n);
/// (-pi/2, pi/2) x_cos H^{n-1}.
SpacePtr anti_de_sitter(int n);

/// Fibre written as a warped product (a, b) x_mu(s) leaf, leaf a unit sphere
/// or hyperbolic space of dimension n-2.
FibrePtr warped_fibre(double a, double b, const std::string& mu, FibrePtr leaf);

/// The totally geodesic graphs: "minkowski" (h = s over R x R^{n-2}),
/// "de-sitter" (h = 2 atanh(tan(s/2)) over (-pi/2, pi/2) x_cos S^{n-2}) and
/// "anti-de-sitter" (h = 2 atan(tanh(s/2)) over R x_cosh H^{n-2}).
struct Table1Row {
  std::string name;
  std::shared_ptr<const GraphHypersurface> graph;
  /// sample points inside the graph domain
  std::vector<Vec> grid;
};

Table1Row table1(const std::string& name, int n);
std::vector<std::string> table1_names();

}  // namespace nullkit::fixtures
