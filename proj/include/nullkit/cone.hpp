#pragma once

// Local nullcones of GRW spaces: C^+ = {C(t; t_*) = d_F(x_*, x)} and
// C^- = {C(t_*; t) = d_F(x_*, x)}.

#include "nullkit/decomposition.hpp"
#include "nullkit/grw.hpp"
#include "nullkit/nullhyp.hpp"

#include <memory>
#include <optional>
#include <string>

namespace nullkit {

struct NullCone {
  std::shared_ptr<const GrwSpace> space;
  double t_star = 0.0;
  Vec x_star;
  Orientation orientation = Orientation::Future;
  /// graph operations require C(t; t_*) >= collar
  double vertex_collar = 1e-3;

  /// Largest admissible fibre distance from the vertex.
  double max_radius() const;
  void validate() const;
};

struct Membership {
  bool contained = false;
  /// |C(t; t_*) - d_F(x_*, x)| with the orientation sign applied.
  double residual = 0.0;
};

Membership cone_contains(const NullCone& C, const Vec& p, double tol = 1e-8);

/// h(x) = C^{-1}(+-d_F(x_*, x); t_*), on collar <= d_F < max_radius.
GraphHypersurface cone_as_graph(const NullCone& C);

/// P = a d_t + (a/c) P^F with a = A(t; t_*)/f(t), c = f(t) C(t; t_*).
Vec position_field_cone(const NullCone& C, const Vec& p);
/// s gamma'(s) along the generator through p, s = |A(t; t_*)|.
Vec position_field_cone_geodesic(const NullCone& C, const Vec& p);

/// rho of a cone in a RW space with fibre curvature k:
/// (1/f^2)(f' + sgn sqrt(k) cot(sqrt(k) |C|)), with the k = 0 and k < 0 rows.
/// sgn is +1 for future cones and -1 for past cones.
double rw_cone_rho(double k, const WarpingProfile& w, double t_star, double t,
                   Orientation o = Orientation::Future);

struct ContainmentVerdict {
  bool contained = false;
  /// (t_*, x_*) when contained; only t_* when no fibre map is known
  std::optional<Vec> vertex;
  double angle_residual = 0.0;
  double limit_value = 0.0;
  double limit_error = 0.0;
  std::string diagnostics;
};

struct LimitOptions {
  double ratio = 0.5;
  int levels = 6;
  double tolerance = 1e-4;
};

/// Gradient containment test: grad h proportional to P^F on the grid and h -> t_* towards x_*.
ContainmentVerdict containment_by_gradient(const GraphHypersurface& L, const Vec& x_star, double t_star,
                                           const std::vector<Vec>& grid, double angle_tol = 1e-8,
                                           const LimitOptions& lim = {});

/// Containment test on a decomposition: mu -> 0 at the relevant end of J and the
/// corresponding t_* is reachable inside I.
ContainmentVerdict containment_by_twist(const GrwSpace& M, const TwistedDecomposition& D, double t0,
                                        Orientation o, const LimitOptions& lim = {});

}  // namespace nullkit
