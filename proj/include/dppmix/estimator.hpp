// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dppmix/geometry.hpp"
#include "dppmix/kernels.hpp"

namespace dppmix {

/// Covariate map z(x) in R^m for the log-linear intensity exp(z(x) . beta).
/// The first coordinate is conventionally the intercept 1.
using CovariateMap = std::function<Eigen::VectorXd(const double*)>;

/// z(x) = (1): homogeneous model with beta = (log rho).
CovariateMap intercept_only();

struct BetaFit {
  Eigen::VectorXd beta;
  int iterations = 0;
  bool converged = false;
  double score_norm = 0.0;
};

/// Poisson-likelihood score sum_{x in X} z(x) - int_W z(u) exp(z(u).beta) du
/// (estimating equation for the first stage; the integral uses a midpoint
/// tensor grid with quad_nodes points per axis).
Eigen::VectorXd score_beta(const PointPattern& pat, const Window& w, const CovariateMap& z,
                           const Eigen::VectorXd& beta, int quad_nodes = 48);

/// Newton iteration on the score with step halving. Throws
/// NonConvergenceError if the score norm fails to reach tol * max(1, N)
/// within max_iter steps. With z = (1) the solution is log(N / |W|).
BetaFit fit_beta(const PointPattern& pat, const Window& w, const CovariateMap& z,
                 const Eigen::VectorXd& beta0, int quad_nodes = 48, int max_iter = 60,
                 double tol = 1e-12);

struct KHatCurve {
  std::vector<double> t;
  std::vector<double> k;
};

/// Intensity-reweighted Ripley K with translation edge correction:
///   K(t) = sum_{x != y, |x-y| <= t} 1 / (rho(x) rho(y) prod_k (L_k - |x_k - y_k|)).
/// Requires at least 2 points and max(t) < shortest window side.
KHatCurve ripley_k_hat(const PointPattern& pat, const Window& w,
                       const std::function<double(const double*)>& rho_hat,
                       const std::vector<double>& t_grid);

/// Theoretical K function of the correlation family:
///   K(t) = s_d int_0^t r^{d-1} (1 - C(r)^2) dr.
std::vector<double> k_theoretical(const CorrelationFamily& c, const std::vector<double>& t_grid);

/// Closed form of the above for the Gaussian family in d = 2:
///   K(t) = pi t^2 - (pi alpha^2 / 2)(1 - exp(-2 t^2 / alpha^2)).
double k_gaussian_closed_form(double alpha, double t);

/// Uniform grid of n points from r_lower to r_upper inclusive.
std::vector<double> k_grid(double r_lower, double r_upper, int n);

struct ContrastFit {
  Eigen::VectorXd psi;
  double contrast = 0.0;
  bool converged = false;
  bool at_boundary = false;
  int evaluations = 0;
};

/// Minimum-contrast fit of the correlation parameters: minimizes the
/// trapezoid integral of (khat^c - K_psi^c)^2 over the khat grid within the
/// box [lo, hi] (golden section for 1 parameter, Nelder-Mead for 2).
/// Parameter layout per family: Gaussian (alpha), Cauchy (alpha, nu),
/// Bessel (rho).
ContrastFit fit_correlation(Family family, int dim, const KHatCurve& khat,
                            const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                            double c_exponent = 0.5);

struct TwoStepOptions {
  int quad_nodes = 48;
  int t_nodes = 64;
  double r_lower = 0.05;
  double r_upper = 2.5;
  double contrast_exponent = 0.5;
  Eigen::VectorXd psi_lo;
  Eigen::VectorXd psi_hi;
  Eigen::VectorXd beta0;  // empty: zero start
};

struct TwoStepFit {
  BetaFit beta;
  ContrastFit corr;
  KHatCurve khat;
  std::vector<double> k_fitted;
};

/// Two-step estimation of an inhomogeneous model: (1) beta from the Poisson
/// score with covariates z, (2) correlation parameters by minimum contrast
/// on the intensity-reweighted K computed with the stage-1 fit.
TwoStepFit two_step_fit(const PointPattern& pat, const Window& w, const CovariateMap& z,
                        Family family, const TwoStepOptions& opt);

}  // namespace dppmix
