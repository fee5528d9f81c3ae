#pragma once

// Local twisted decomposition (J x S, ds^2 + mu(s,z)^2 g_S) of a fibre, with
// mu(0, z) = 1 and an optional map back into the original fibre chart.

#include "nullkit/fibre.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace nullkit {

struct TwistedDecomposition {
  double a = 0.0, b = 0.0;  // base interval J, 0 in J
  FibrePtr leaf;
  /// mu over (s, z) with z in leaf coordinates.
  ScalarField mu;
  Vec z0;  // anchor leaf point
  /// (s, z) -> original fibre coordinates, when reconstructed from a fibre.
  std::function<Vec(double, const Vec&)> to_fibre;
  /// leaf points used for sampling
  std::vector<Vec> leaf_samples;

  double mu_at(double s, const Vec& z) const;
  /// d mu / ds.
  double mu_s(double s, const Vec& z) const;
  FibrePtr fibre() const;
};

}  // namespace nullkit
