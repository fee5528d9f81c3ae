#pragma once

// Standard static spaces g* = g_F - phi^2 dt^2 in the chart (t, x), their
// conformal GRW form g = g*/phi^2 = -dt^2 + g_F/phi^2, and the radial family
// (1/h(r)) dr^2 + r^2 g_0 - h(r) dt^2.

#include "nullkit/decomposition.hpp"
#include "nullkit/grw.hpp"
#include "nullkit/nullhyp.hpp"
#include "nullkit/twist.hpp"

#include <memory>
#include <string>
#include <vector>

namespace nullkit {

class StaticChart : public LorentzChart {
 public:
  StaticChart(FibrePtr fibre, ScalarField phi);
  int dim() const override { return 1 + F_->dim(); }
  bool contains(const Vec& p) const override;
  Mat metric(const Vec& p) const override;
  Christoffel christoffel(const Vec& p) const override;

  const FibreModel& fibre() const { return *F_; }
  const FibrePtr& fibre_ptr() const { return F_; }
  const ScalarField& phi() const { return phi_; }

 private:
  FibrePtr F_;
  ScalarField phi_;
};

struct StaticModel {
  FibrePtr fibre;
  ScalarField phi;

  std::shared_ptr<const StaticChart> chart() const;
  /// (F, g_F/phi^2)
  FibrePtr conformal_fibre() const;
  /// -dt^2 + g_F/phi^2 on the whole real line
  std::shared_ptr<const GrwSpace> conformal_space() const;
};

/// The graph t = h(x) as a null hypersurface of the conformal GRW space.
GraphHypersurface conformal_graph(const StaticModel& S, const ScalarField& h);

/// xi = (-1, -grad h) with the gradient taken in g_F/phi^2; shared by g* and g.
Vec static_xi(const StaticModel& S, const ScalarField& h, const Vec& x);

/// Screen frame (columns (0, X)) orthonormal for g*.
Mat static_screen(const StaticModel& S, const ScalarField& h, const Vec& x);

/// B*(X, Y) = -g*(nabla*_X xi, Y) on the frame, from the g* connection and
/// differences of xi along the hypersurface.
Mat static_b_star(const StaticModel& S, const ScalarField& h, const Vec& x, const Mat& frame);

/// Trace of B* in a g*-orthonormal screen.
double static_mean_curvature(const StaticModel& S, const ScalarField& h, const Vec& x);

/// B = (B* + xi(ln phi) G*)/phi^2, with G* the g* Gram matrix of the frame.
Mat conformal_B_transform(const Mat& b_star, double xi_ln_phi, double phi, const Mat& gram_star);
/// H = H* + (n-2) xi(ln phi).
double conformal_H_transform(double h_star, double xi_ln_phi, int n);

/// xi(ln phi) at x.
double static_xi_ln_phi(const StaticModel& S, const ScalarField& h, const Vec& x);

struct StaticConstruction {
  StaticModel model;
  ScalarField h;  // t = +-s + t_0 over (s, z)
  double t0 = 0.0;
  bool dual = false;
  TwistedDecomposition decomposition;
  ScalarField potential;  // phi over (s, z)

  /// construct: (n-2) d/ds ln(mu phi); dual: -(n-2) d/ds ln(mu phi)
  double mean_curvature_formula(const Vec& x) const;
};

/// L = {t = s + t_0} (or {t = -s + t_0}) in F x_phi R, where F carries
/// g_F = phi^2 (ds^2 + mu^2 g_S).
StaticConstruction static_umbilic_construct(const TwistedDecomposition& D, const ScalarField& phi, double t0,
                                            bool dual = false);
StaticConstruction static_dual(const StaticConstruction& L);

/// Dual graph through x0: t~ = 2 t(x0) - h(x) (the conformal warping is constant).
ScalarField static_dual_graph(const ScalarField& h, const Vec& x0);

// ---------------------------------------------------------------------------
// Radial family
// ---------------------------------------------------------------------------

struct RadialStaticFamily {
  Function1D h;
  double r_lo = 0.0, r_hi = 0.0;

  static RadialStaticFamily parse(const std::string& text, double r_lo, double r_hi,
                                  const std::map<std::string, double>& params = {});
};

class RadialProfile {
 public:
  /// Integrates phi' = h(phi), phi(0) = r0, over [s_lo, s_hi]; stops where
  /// h <= horizon or phi leaves I_r and records the reached interval.
  RadialProfile(RadialStaticFamily fam, double r0, double s_lo, double s_hi, double horizon = 1e-8);

  double r0() const { return r0_; }
  double s_lo() const { return lo_; }
  double s_hi() const { return hi_; }
  bool truncated() const { return truncated_; }
  const std::string& report() const { return report_; }
  const RadialStaticFamily& family() const { return fam_; }

  /// phi(s) and its derivatives through third order
  double r(double s) const;
  double r_derivative(int order, double s) const;
  /// mu = phi/sqrt(h(phi)) and derivatives through third order
  double mu(double s, int order = 0) const;
  /// static potential sqrt(h(phi(s)))
  double potential(double s) const;
  Function1D mu_function() const;

  /// leaf radius mu(0) used to normalize mu(0) = 1
  double leaf_radius() const { return mu(0.0); }

  /// max of |phi'^2/h(phi)^2 - 1| and |phi^2/h(phi) - mu^2| relative, phi' by differences of the dense output
  double pullback_residual(const std::vector<double>& s) const;

 private:
  RadialStaticFamily fam_;
  double r0_;
  double lo_, hi_;
  bool truncated_ = false;
  std::string report_;
  num::DenseSolution fwd_, back_;
};

/// Normalized warped decomposition (mu(0) = 1, leaf sphere of radius mu(0)) and potential over (s, a1, a2).
struct RadialStaticData {
  TwistedDecomposition decomposition;
  ScalarField potential;
};
RadialStaticData radial_static_data(const RadialProfile& P);

struct CertificateOptions {
  double eps_int = 0.05;
  double h3_tol = 1e-8;
  /// profile used for the identity cross-check; r0 defaults to the range midpoint
  double identity_half_width = 0.2;
};

struct CertificateSample {
  double r = 0.0;
  double h3 = 0.0;
};

struct UniquenessCertificate {
  bool exactly_two = false;
  std::string verdict;
  std::vector<CertificateSample> samples;
  /// longest run of samples with |h'''| < tol
  double longest_flat = 0.0;
  /// max |(mu''/mu)' + h^2 h'''/2| along a profile
  double identity_residual = 0.0;
};

UniquenessCertificate uniqueness_certificate(const RadialStaticFamily& fam, double r_a, double r_b,
                                             const CertificateOptions& opts = {});

/// Delegates to the warped-sphere uniqueness probe.
UniquenessProbe sphere_leaf_constant_curvature_guard(const Function1D& mu, const std::vector<double>& s_values,
                                                     double tol = 1e-8);

}  // namespace nullkit
