#pragma once

// Correspondence between totally umbilic null graphs t = h(x) and local
// twisted decompositions ds^2 + mu(s,z)^2 g_S of the fibre. The base
// coordinate is s = C(h(x); t_0), which is arclength along E = grad h/|grad h|.

#include "nullkit/cone.hpp"
#include "nullkit/decomposition.hpp"
#include "nullkit/nullhyp.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nullkit {

// ---------------------------------------------------------------------------
// Construction from a decomposition
// ---------------------------------------------------------------------------

/// Graph s = C(t; t_0) (or s = -C(t; t_0) for the dual) over a GRW space whose
/// fibre is a twisted product with base coordinate x[0] = s.
GraphHypersurface construct_hypersurface(std::shared_ptr<const GrwSpace> M, double t0, bool dual = false);

/// (n-2)/f(t)^2 (f'(t) +- mu_s/mu) at the fibre point (s, z).
double construct_mean_curvature(const GrwSpace& M, const TwistedDecomposition& D, double t0, const Vec& x,
                                bool dual = false);

// ---------------------------------------------------------------------------
// Reconstruction from a hypersurface
// ---------------------------------------------------------------------------

struct ReconstructOptions {
  double s_lo = -0.3, s_hi = 0.3;
  /// anchor-leaf chart half-width (coordinate offsets along a g_F-orthonormal basis)
  double leaf_half_width = 0.2;
  int leaf_nodes = 7;  // per leaf dimension
  double s_spacing = 0.01;
  double umbilic_tolerance = 1e-6;
  std::uint64_t seed = 1;
  num::OdeOptions ode{1e-11, 1e-12};
};

struct FlowLineRecord {
  Vec z;  // anchor-leaf coordinates
  std::vector<double> s;
  std::vector<Vec> x;
  std::vector<double> log_mu;
  std::vector<double> dlog_mu;
  /// max | |E|_F - 1 | along the samples
  double unit_residual = 0.0;
};

struct Reconstruction {
  TwistedDecomposition decomposition;
  double t0 = 0.0;
  Vec x0;
  std::vector<FlowLineRecord> flow_lines;
  double umbilicity_residual = 0.0;
};

Reconstruction reconstruct_decomposition(const GraphHypersurface& L, const Vec& x0,
                                         const ReconstructOptions& opts = {});

/// Leaf-metric check: max over (s, z) samples of |g_F(d_z X, d_z X) - mu^2 g_S| relative.
double leaf_metric_residual(const GraphHypersurface& L, const Reconstruction& R, const std::vector<double>& s_values,
                            const std::vector<Vec>& z_values);

// ---------------------------------------------------------------------------
// Duals
// ---------------------------------------------------------------------------

/// Dual graph through (t_0, x_0) on the original fibre:
/// h~ = C^{-1}(-C(h; t_0); t_0).
GraphHypersurface dual_hypersurface(const GraphHypersurface& L, const Vec& x0);

/// (n-2)/f(t~)^2 (f'(t~) - mu_s/mu) with mu_s/mu = H f(h)^2/(n-2) - f'(h) read off L.
double dual_mean_curvature_formula(const GraphHypersurface& L, double t0, const Vec& x);

enum class DeSitterDual { PastCone, FutureConeAtAntipode, TotallyGeodesic };

std::string to_string(DeSitterDual k);

struct DeSitterClassification {
  DeSitterDual kind = DeSitterDual::TotallyGeodesic;
  bool boundary_case = false;
  double t_c = 0.0;
  double delta = 0.0;         // C(t_0; 0), fibre distance of x_0 from the vertex
  double vertex_time = 0.0;   // t_s or t_l
  Vec vertex_point;           // x_* or its antipode
};

/// Dual of C^+_{(0, x_*)} in R x_cosh S^{n-1} through a point at time t_0.
DeSitterClassification classify_desitter_dual(int n, double t0, const Vec& x_star, double boundary_tol = 1e-9);

// ---------------------------------------------------------------------------
// Round-sphere fibres
// ---------------------------------------------------------------------------

struct SphereClassification {
  bool cone = false;
  double theta = 0.0;
  Vec vertex;  // (t_*, x_*) of the future cone when cone
  std::optional<Vec> past_vertex;
  ContainmentVerdict future, past;
  double umbilicity_residual = 0.0;
  std::string diagnostics;
};

/// Throws DomainError when int_I 1/f <= pi + tol, or when L is not umbilic at x0.
SphereClassification classify_umbilic_sphere_fibre(const GraphHypersurface& L, const Vec& x0,
                                                   double umbilic_tol = 1e-6, double integral_tol = 1e-9);

// ---------------------------------------------------------------------------
// Obstruction scan
// ---------------------------------------------------------------------------

struct DirectionSpread {
  Vec direction;
  double spread = 0.0;          // eigenvalue range of w -> R(w,v)v on v-perp
  double sampled_spread = 0.0;  // range over the random planes
};

struct ObstructionReport {
  Vec x;
  std::vector<DirectionSpread> directions;
  double min_spread = 0.0;
  std::size_t argmin = 0;
};

/// Exact spread for one unit direction v.
double direction_spread(const FibreModel& F, const Vec& x, const Vec& v);

ObstructionReport obstruction_scan(const FibreModel& F, const Vec& x, int directions, int planes,
                                   std::uint64_t seed, const std::vector<Vec>& extra_directions = {});

struct UniquenessProbe {
  bool constant_curvature = false;
  double max_residual = 0.0;
};

/// |mu'' mu - mu'^2 + 1| over the samples of J.
UniquenessProbe sphere_warped_uniqueness_probe(const Function1D& mu, const std::vector<double>& s_values,
                                               double tol = 1e-8);

}  // namespace nullkit
