// SPDX-License-Identifier: MIT
#include "dppmix/kernels.hpp"

#include <cmath>

#include "dppmix/errors.hpp"

namespace dppmix {

namespace {
constexpr double kPi = 3.14159265358979323846;

double norm_of(const double* u, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += u[k] * u[k];
  return std::sqrt(s);
}
}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Gaussian:
      return "gaussian";
    case Family::Cauchy:
      return "cauchy";
    case Family::BesselMostRepulsive:
      return "bessel";
  }
  return "?";
}

CorrelationFamily CorrelationFamily::gaussian(int dim, double alpha) {
  CorrelationFamily c{Family::Gaussian, dim, {alpha}};
  c.validate_params();
  return c;
}

CorrelationFamily CorrelationFamily::cauchy(int dim, double alpha, double nu) {
  CorrelationFamily c{Family::Cauchy, dim, {alpha, nu}};
  c.validate_params();
  return c;
}

CorrelationFamily CorrelationFamily::bessel_most_repulsive(int dim, double rho) {
  CorrelationFamily c{Family::BesselMostRepulsive, dim, {rho}};
  c.validate_params();
  return c;
}

CorrelationFamily CorrelationFamily::make(Family f, int dim, const std::vector<double>& params) {
  CorrelationFamily c{f, dim, params};
  c.validate_params();
  return c;
}

void CorrelationFamily::validate_params() const {
  if (dim < 1) throw ValidationError("correlation family: dimension must be >= 1");
  switch (family) {
    case Family::Gaussian:
      if (params.size() != 1 || !(params[0] > 0.0))
        throw ValidationError("gaussian family: needs alpha > 0");
      break;
    case Family::Cauchy:
      if (params.size() != 2 || !(params[0] > 0.0))
        throw ValidationError("cauchy family: needs alpha > 0 and nu");
      // nu > d/4 makes C square-integrable; the existence check additionally
      // needs nu > d/2 for an integrable correlation.
      if (!(params[1] > 0.25 * dim))
        throw ValidationError("cauchy family: nu must exceed dim/4");
      break;
    case Family::BesselMostRepulsive:
      if (params.size() != 1 || !(params[0] > 0.0))
        throw ValidationError("bessel family: needs rho > 0");
      break;
  }
}

double CorrelationFamily::bessel_ball_radius() const {
  if (family != Family::BesselMostRepulsive)
    throw ValidationError("ball radius only defined for the bessel family");
  const double rho = params[0];
  return std::pow(std::tgamma(0.5 * dim + 1.0), 1.0 / dim) * std::pow(rho, 1.0 / dim) /
         std::sqrt(kPi);
}

double CorrelationFamily::correlation(double r) const {
  r = std::abs(r);
  switch (family) {
    case Family::Gaussian: {
      const double t = r / params[0];
      return std::exp(-t * t);
    }
    case Family::Cauchy: {
      const double t = r / params[0];
      return std::pow(1.0 + t * t, -params[1]);
    }
    case Family::BesselMostRepulsive: {
      const double nu = 0.5 * dim;
      const double z = 2.0 * kPi * bessel_ball_radius() * r;
      if (z < 1e-2) {
        // J_nu(z) (z/2)^{-nu} = sum_m (-1)^m (z/2)^{2m} / (m! Gamma(nu+m+1))
        const double q = 0.25 * z * z;
        return 1.0 - q / (nu + 1.0) + q * q / (2.0 * (nu + 1.0) * (nu + 2.0));
      }
      return std::tgamma(nu + 1.0) * std::cyl_bessel_j(nu, z) / std::pow(0.5 * z, nu);
    }
  }
  return 0.0;
}

double CorrelationFamily::correlation_vec(const double* u) const {
  return correlation(norm_of(u, dim));
}

double CorrelationFamily::spectral(double xi_norm) const {
  const double xi = std::abs(xi_norm);
  switch (family) {
    case Family::Gaussian: {
      const double a = params[0];
      const double amp = std::pow(a * std::sqrt(kPi), dim);
      const double t = kPi * a * xi;
      return amp * std::exp(-t * t);
    }
    case Family::Cauchy: {
      const double a = params[0];
      const double nu = params[1];
      if (!(nu > 0.5 * dim))
        throw ValidationError("cauchy spectral density requires nu > dim/2");
      const double mu = nu - 0.5 * dim;
      const double z = 2.0 * kPi * a * xi;
      if (z < 1e-8)
        return std::pow(a, dim) * std::pow(kPi, 0.5 * dim) * std::tgamma(mu) / std::tgamma(nu);
      return std::pow(a, dim) * (2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(nu)) *
             std::pow(0.5 * z, mu) * std::cyl_bessel_k(mu, z);
    }
    case Family::BesselMostRepulsive: {
      // Uniform spectral measure: rho * c_hat is the indicator of the ball.
      return xi <= bessel_ball_radius() ? 1.0 / params[0] : 0.0;
    }
  }
  return 0.0;
}

double CorrelationFamily::spectral_sup() const {
  switch (family) {
    case Family::Gaussian:
    case Family::Cauchy:
      // C >= 0, so c_hat peaks at 0.
      return spectral(0.0);
    case Family::BesselMostRepulsive:
      return 1.0 / params[0];
  }
  return 0.0;
}

double CorrelationFamily::envelope(double r) const {
  r = std::abs(r);
  switch (family) {
    case Family::Gaussian:
    case Family::Cauchy:
      return correlation(r);
    case Family::BesselMostRepulsive: {
      const double nu = 0.5 * dim;
      const double z = 2.0 * kPi * bessel_ball_radius() * r;
      if (z <= 0.0) return 1.0;
      const double env = std::tgamma(nu + 1.0) * std::sqrt(2.0 / (kPi * z)) *
                         std::sqrt(1.0 + 1.0 / z) / std::pow(0.5 * z, nu);
      return std::min(1.0, env);
    }
  }
  return 0.0;
}

double CorrelationFamily::log_envelope(double r) const {
  r = std::abs(r);
  switch (family) {
    case Family::Gaussian: {
      const double t = r / params[0];
      return -t * t;
    }
    case Family::Cauchy:
      return -params[1] * std::log1p((r / params[0]) * (r / params[0]));
    case Family::BesselMostRepulsive: {
      const double nu = 0.5 * dim;
      const double z = 2.0 * kPi * bessel_ball_radius() * r;
      if (z <= 0.0) return 0.0;
      const double le = std::lgamma(nu + 1.0) + 0.5 * std::log(2.0 / (kPi * z)) +
                        0.5 * std::log1p(1.0 / z) - nu * std::log(0.5 * z);
      return std::min(0.0, le);
    }
  }
  return 0.0;
}

bool CorrelationFamily::square_integrable() const {
  switch (family) {
    case Family::Gaussian:
    case Family::BesselMostRepulsive:
      return true;
    case Family::Cauchy:
      return 4.0 * params[1] > dim;
  }
  return false;
}

double IntensityModel::value(const double* x) const {
  if (homogeneous) return rho;
  const Eigen::VectorXd z = covariate(x);
  if (z.size() != beta.size()) throw ValidationError("intensity: covariate/beta size mismatch");
  return std::exp(z.dot(beta));
}

namespace {

KernelSpec make_homogeneous(const CorrelationFamily& c, double rho, bool check) {
  if (!(rho > 0.0)) throw ValidationError("kernel spec: rho must be > 0");
  if (c.family == Family::BesselMostRepulsive && std::abs(rho - c.params[0]) > 1e-12 * rho)
    throw ValidationError("bessel kernel: intensity is fixed by the family parameter rho");
  KernelSpec s;
  s.corr = c;
  s.intensity.homogeneous = true;
  s.intensity.rho = rho;
  s.rho_max = rho;
  s.existence_checked = check;
  if (check) s.require_valid_process("kernel spec");
  return s;
}

}  // namespace

KernelSpec KernelSpec::homogeneous(const CorrelationFamily& c, double rho) {
  return make_homogeneous(c, rho, true);
}

KernelSpec KernelSpec::homogeneous_unchecked(const CorrelationFamily& c, double rho) {
  return make_homogeneous(c, rho, false);
}

KernelSpec KernelSpec::bessel(int dim, double rho) {
  return homogeneous(CorrelationFamily::bessel_most_repulsive(dim, rho), rho);
}

KernelSpec KernelSpec::log_linear(const CorrelationFamily& c, const Eigen::VectorXd& beta,
                                  std::function<Eigen::VectorXd(const double*)> covariate,
                                  std::vector<std::string> covariate_names, double rho_max,
                                  const Window& check_window) {
  if (c.family == Family::BesselMostRepulsive)
    throw ValidationError("bessel kernel: no inhomogeneous form (intensity folded into family)");
  if (!(rho_max > 0.0)) throw ValidationError("kernel spec: rho_max must be > 0");
  if (beta.size() == 0 || !covariate) throw ValidationError("kernel spec: log-linear model needs beta and covariate");
  KernelSpec s;
  s.corr = c;
  s.intensity.homogeneous = false;
  s.intensity.beta = beta;
  s.intensity.covariate = std::move(covariate);
  s.intensity.covariate_names = std::move(covariate_names);
  s.rho_max = rho_max;
  s.existence_checked = true;
  s.require_valid_process("kernel spec");
  // Coarse sanity check that rho_max really bounds the intensity field; the
  // sampler re-checks pointwise at every thinning site.
  const int d = check_window.dim();
  const int n = 17;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  while (true) {
    for (int k = 0; k < d; ++k)
      x[static_cast<std::size_t>(k)] =
          check_window.lower[k] + check_window.side(k) * idx[static_cast<std::size_t>(k)] / (n - 1);
    if (s.intensity.value(x.data()) > rho_max * (1.0 + 1e-9))
      throw ValidationError("kernel spec: intensity exceeds rho_max inside the window");
    int k = 0;
    for (; k < d; ++k) {
      if (++idx[static_cast<std::size_t>(k)] < n) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
    if (k == d) break;
  }
  return s;
}

double KernelSpec::rho_at(const double* x) const { return intensity.value(x); }

double KernelSpec::kernel(const double* x, const double* y) const {
  const int d = corr.dim;
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    const double diff = y[k] - x[k];
    s += diff * diff;
  }
  const double c = corr.correlation(std::sqrt(s));
  if (intensity.homogeneous) return intensity.rho * c;
  return std::sqrt(intensity.value(x) * intensity.value(y)) * c;
}

double KernelSpec::omega(double r) const { return rho_max * corr.envelope(r); }

double KernelSpec::omega_log(double r) const { return std::log(rho_max) + corr.log_envelope(r); }

double KernelSpec::spectral_density(double xi_norm) const {
  return rho_max * corr.spectral(xi_norm);
}

double KernelSpec::existence_margin() const { return 1.0 - rho_max * corr.spectral_sup(); }

void KernelSpec::require_valid_process(const std::string& where) const {
  if (!corr.square_integrable())
    throw ValidationError(where + ": correlation is not square-integrable");
  if (corr.family == Family::Cauchy && !(corr.params[1] > 0.5 * corr.dim))
    throw ValidationError(where + ": cauchy existence needs nu > dim/2");
  if (existence_margin() < -1e-9)
    throw ValidationError(where + ": spectral density exceeds 1 (no such process); margin=" +
                          std::to_string(existence_margin()));
}

}  // namespace dppmix
