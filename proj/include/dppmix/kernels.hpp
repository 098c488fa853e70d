// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "dppmix/geometry.hpp"

namespace dppmix {

enum class Family { Gaussian, Cauchy, BesselMostRepulsive };

std::string family_name(Family f);

/// Isotropic correlation family C(u) = C(|u|), C(0) = 1.
///
///   Gaussian             C(r) = exp(-(r/alpha)^2),            params {alpha}
///   Cauchy               C(r) = (1 + (r/alpha)^2)^(-nu),      params {alpha, nu}
///   BesselMostRepulsive  C(r) = Gamma(d/2+1) J_{d/2}(2 pi R r) / (pi R r)^{d/2},
///                        params {rho}; R = Gamma(d/2+1)^{1/d} rho^{1/d} / sqrt(pi).
///
/// The Bessel family is the correlation whose spectral measure is the uniform
/// indicator of the ball of radius R; its intensity rho is part of the family
/// because the kernel is only defined jointly with it.
struct CorrelationFamily {
  Family family = Family::Gaussian;
  int dim = 2;
  std::vector<double> params;

  static CorrelationFamily gaussian(int dim, double alpha);
  static CorrelationFamily cauchy(int dim, double alpha, double nu);
  static CorrelationFamily bessel_most_repulsive(int dim, double rho);
  static CorrelationFamily make(Family f, int dim, const std::vector<double>& params);

  [[nodiscard]] double correlation(double r) const;
  [[nodiscard]] double correlation_vec(const double* u) const;

  /// Fourier transform c_hat(xi) with the unitary convention
  /// c_hat(xi) = int C(u) exp(-2 pi i xi.u) du, evaluated at |xi| = xi_norm.
  [[nodiscard]] double spectral(double xi_norm) const;
  [[nodiscard]] double spectral_sup() const;

  /// Monotone envelope of sup_{s >= r} |C(s)|. Exact for the positive
  /// decreasing families; for the Bessel family the oscillation is dominated
  /// by min(1, Gamma(d/2+1) sqrt(2/(pi z)) sqrt(1+1/z) / (z/2)^{d/2}).
  [[nodiscard]] double envelope(double r) const;
  [[nodiscard]] double log_envelope(double r) const;

  [[nodiscard]] bool square_integrable() const;
  [[nodiscard]] double bessel_ball_radius() const;  // R above; Bessel family only

  void validate_params() const;
};

/// Intensity model for the kernel K(x,y) = sqrt(rho(x)) C(y-x) sqrt(rho(y)).
struct IntensityModel {
  bool homogeneous = true;
  double rho = 1.0;                                          // homogeneous
  Eigen::VectorXd beta;                                      // log-linear
  std::function<Eigen::VectorXd(const double*)> covariate;   // z(x)
  std::vector<std::string> covariate_names;

  [[nodiscard]] double value(const double* x) const;
};

/// A fully specified kernel: correlation family + intensity + intensity cap.
/// The validated factories enforce the existence condition
/// rho_max * sup(c_hat) <= 1 together with square-integrability; `unchecked`
/// skips the existence check for callers that use the kernel as a formula
/// (bound evaluation, determinant algebra) rather than as a point process.
struct KernelSpec {
  CorrelationFamily corr;
  IntensityModel intensity;
  double rho_max = 1.0;
  bool existence_checked = false;

  static KernelSpec homogeneous(const CorrelationFamily& c, double rho);
  static KernelSpec homogeneous_unchecked(const CorrelationFamily& c, double rho);
  /// Bessel most-repulsive process at intensity rho.
  static KernelSpec bessel(int dim, double rho);
  /// Log-linear intensity rho(x) = exp(z(x).beta); rho_max must bound rho on
  /// the window of interest and is verified on a coarse grid here plus
  /// pointwise wherever the intensity is later evaluated.
  static KernelSpec log_linear(const CorrelationFamily& c, const Eigen::VectorXd& beta,
                               std::function<Eigen::VectorXd(const double*)> covariate,
                               std::vector<std::string> covariate_names, double rho_max,
                               const Window& check_window);

  [[nodiscard]] int dim() const { return corr.dim; }
  [[nodiscard]] double rho_at(const double* x) const;
  [[nodiscard]] double kernel(const double* x, const double* y) const;

  /// omega(r) = sup over |x-y| >= r of |K(x,y)| (via the correlation
  /// envelope; exact for positive decreasing correlations).
  [[nodiscard]] double omega(double r) const;
  [[nodiscard]] double omega_log(double r) const;

  /// rho_max * c_hat(xi): the quantity the existence condition bounds by 1.
  [[nodiscard]] double spectral_density(double xi_norm) const;

  /// 1 - rho_max * sup(c_hat); >= 0 (up to 1e-9) for a valid process.
  [[nodiscard]] double existence_margin() const;
  void require_valid_process(const std::string& where) const;
};

}  // namespace dppmix
