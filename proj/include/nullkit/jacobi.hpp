#pragma once

// Conjugate points along null geodesics of GRW spaces. Geodesics are affinely
// normalized by g(gamma', zeta) = -1 at the vertex (future) or +1 (past).

#include "nullkit/grw.hpp"
#include "nullkit/nullhyp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nullkit {

/// Ric(V, V) at p. Closed form (n-2)(k + f'^2 - f f'') V^t^2 / f^2 for null V
/// when the fibre has constant curvature k, otherwise the chart Ricci tensor.
double ricci_null(const GrwSpace& M, const Vec& p, const Vec& V);

/// Ric(gamma', gamma') at the requested affine parameters.
std::vector<double> ricci_along(const GrwSpace& M, const NullGeodesic& g, const std::vector<double>& s);

struct ConjugatePoint {
  double s = 0.0;
  /// n - 2 by the scalar reduction
  int multiplicity = 0;
  /// singular values of the full Jacobi matrix below the kernel threshold
  std::optional<int> kernel_rank;
};

struct ConjugateReport {
  std::vector<ConjugatePoint> zeros;
  double s_max = 0.0;
  std::string diagnostics;
};

/// J'' + Ric(gamma', gamma')/(n-2) J = 0, J(0) = 0, J'(0) = 1, on (0, s_max].
ConjugateReport scalar_jacobi(const GrwSpace& M, const NullGeodesic& g, double s_max,
                              const num::OdeOptions& opts = {});

struct ConsistencySample {
  Vec x;
  double rho_route = 0.0;    // xi(rho) - rho^2
  double ricci_route = 0.0;  // Ric(xi, xi)/(n-2)
};

struct ConsistencyReport {
  std::vector<ConsistencySample> samples;
  double max_residual = 0.0;
};

/// Compares the two expressions for the null sectional curvature of an umbilic L.
ConsistencyReport umbilic_consistency(const GraphHypersurface& L, const std::vector<Vec>& grid);

struct FullJacobiReport {
  std::vector<double> s;
  /// Jacobi operator A_ij = g(R(E_j, V)V, E_i) in a parallel screen frame
  std::vector<Mat> op;
  std::vector<double> trace;
  /// max over samples of |A - (tr A/(n-2)) I|_2
  double proportionality_residual = 0.0;
  std::vector<ConjugatePoint> zeros;
};

struct FullJacobiOptions {
  int probes = 2000;
  double zero_threshold = 1e-6;
  double kernel_threshold = 1e-7;
  num::OdeOptions ode{1e-11, 1e-13};
};

/// Integrates geodesic, parallel screen frame and the (n-2) x (n-2) Jacobi
/// matrix Y with Y(0) = 0, Y'(0) = I. Zeros are minima of sigma_min(Y).
FullJacobiReport full_jacobi_system(const GrwSpace& M, const Vec& p0, const Vec& V0, double s_max,
                                    const FullJacobiOptions& opts = {});

}  // namespace nullkit
