#pragma once

// Null hypersurfaces of a GRW space written as graphs t = h(x) over a fibre
// domain. Screen vectors are returned as spacetime vectors (0, X) with X
// g_F-orthogonal to grad h.

#include "nullkit/grw.hpp"

#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace nullkit {

class GraphHypersurface {
 public:
  using Domain = std::function<bool(const Vec&)>;

  GraphHypersurface(std::shared_ptr<const GrwSpace> space, ScalarField h, Domain domain = {});

  const GrwSpace& space() const { return *M_; }
  const std::shared_ptr<const GrwSpace>& space_ptr() const { return M_; }
  const ScalarField& h() const { return h_; }
  int dim() const { return M_->dim(); }
  bool in_domain(const Vec& x) const;

  /// h(x); throws DomainError when x is outside the domain or h(x) leaves I.
  double height(const Vec& x) const;
  Vec point(const Vec& x) const { return GrwSpace::point(height(x), x); }

 private:
  std::shared_ptr<const GrwSpace> M_;
  ScalarField h_;
  Domain domain_;
};

struct ResidualReport {
  std::vector<double> residuals;
  double max_residual = 0.0;
};

/// | |grad h|_F - f(h) | per point.
ResidualReport validate_null_graph(const GraphHypersurface& L, const std::vector<Vec>& grid);

/// | nabla_{grad h} grad h - f(h) f'(h) grad h |_F per point.
ResidualReport radial_identity_check(const GraphHypersurface& L, const std::vector<Vec>& grid);

/// xi = -(1/f(h)) d_t - (1/f(h)^3) grad h, so that g(zeta, xi) = 1.
Vec xi_field(const GraphHypersurface& L, const Vec& x);

/// g-orthonormal screen frame, n x (n-2). With `rng`, the frame is rotated
/// by a random orthogonal matrix.
Mat screen_basis(const GraphHypersurface& L, const Vec& x, std::mt19937_64* rng = nullptr);

/// B(X, Y) = f'(h)/f(h)^2 g(X, Y) + (1/f(h)) Hess^F h(X, Y).
double second_fundamental_form(const GraphHypersurface& L, const Vec& x, const Vec& X, const Vec& Y);
/// B(X, Y) = -g(nabla_X xi, Y) with the derivative of xi along L by differences.
double second_fundamental_form_connection(const GraphHypersurface& L, const Vec& x, const Vec& X, const Vec& Y);
/// Matrix of B in the frame.
Mat second_fundamental_matrix(const GraphHypersurface& L, const Vec& x, const Mat& frame);

double mean_curvature(const GraphHypersurface& L, const Vec& x);
/// rho = H / (n-2).
double umbilic_factor(const GraphHypersurface& L, const Vec& x);

struct UmbilicitySample {
  Vec x;
  double rho = 0.0;
  /// sup over unit screen pairs of |B(X,Y) - rho g(X,Y)|.
  double residual = 0.0;
  /// max over the random screen pairs drawn for this point.
  double sampled_residual = 0.0;
};

struct UmbilicityReport {
  std::vector<UmbilicitySample> samples;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool umbilic = false;
};

UmbilicityReport umbilicity_test(const GraphHypersurface& L, const std::vector<Vec>& grid, std::uint64_t seed,
                                 double tolerance = 1e-6, int pairs = 8);

/// xi(rho) - rho^2, the derivative of rho taken along xi by differences.
double null_sectional_from_rho(const GraphHypersurface& L, const Vec& x, double step = 1e-3);

}  // namespace nullkit
