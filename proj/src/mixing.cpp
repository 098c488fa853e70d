// SPDX-License-Identifier: MIT
#include "dppmix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dppmix/dpp_core.hpp"
#include "dppmix/errors.hpp"
#include "dppmix/quadrature.hpp"
#include "dppmix/rng.hpp"
#include "dppmix/sampler.hpp"
#include "dppmix/stats.hpp"

namespace dppmix {

double sphere_surface(int dim) {
  if (dim < 1) throw ValidationError("sphere_surface: dim must be >= 1");
  const double hd = 0.5 * dim;
  return 2.0 * std::pow(3.14159265358979323846, hd) / std::tgamma(hd);
}

double alpha_upper_pq(const KernelSpec& spec, double p, double q, double r) {
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("alpha_upper_pq: volumes must be > 0");
  if (!(r >= 0.0)) throw ValidationError("alpha_upper_pq: r must be >= 0");
  const double w = spec.omega(r);
  return p * q * w * w;
}

double alpha_upper_p_inf(const KernelSpec& spec, double p, double r) {
  if (!(p > 0.0)) throw ValidationError("alpha_upper_p_inf: volume must be > 0");
  if (!(r > 0.0)) throw ValidationError("alpha_upper_p_inf: r must be > 0");
  if (!spec.corr.square_integrable())
    throw ValidationError("alpha_upper_p_inf: omega^2 tail integral diverges for this kernel");
  const int d = spec.dim();
  const auto integrand = [&](double t) {
    const double lw = spec.omega_log(t);
    return std::exp(2.0 * lw + (d - 1) * std::log(t));
  };
  const QuadResult tail = integrate_tail(integrand, r, 1e-7);
  return p * sphere_surface(d) * tail.value;
}

AlphaSandwich alpha_sandwich(const KernelSpec& spec, const Window& a, const Window& b) {
  if (spec.corr.family == Family::BesselMostRepulsive)
    throw ValidationError(
        "alpha_sandwich: lower bound needs a pointwise-nonnegative kernel; "
        "the Bessel-type kernel oscillates");
  spec.require_valid_process("alpha_sandwich");
  if (a.dim() != spec.dim() || b.dim() != spec.dim())
    throw ValidationError("alpha_sandwich: window dimension mismatch");

  AlphaSandwich out;
  // Cov(N(A), N(B)) = -int_A int_B K^2 for disjoint boxes.
  out.upper = -count_covariance_integral(spec, a, b);
  if (out.upper < 0.0) out.upper = 0.0;

  out.op_norm = spec.rho_max * spec.corr.spectral_sup();
  out.op_norm_is_analytic = true;
  if (!(out.op_norm < 1.0))
    throw ValidationError("alpha_sandwich: lower bound needs operator norm < 1");

  const double p = a.volume();
  const double q = b.volume();
  const double exponent = (p + q) * spec.rho_max / out.op_norm;
  out.prefactor = std::exp(exponent * std::log1p(-out.op_norm));
  out.lower = out.prefactor * out.upper;
  return out;
}

VoidAlphaEstimate void_alpha(const KernelSpec& spec, const Window& a, const Window& b,
                             int nodes_per_axis) {
  VoidAlphaEstimate out;
  out.p_a = void_probability(spec, {a}, nodes_per_axis);
  out.p_b = void_probability(spec, {b}, nodes_per_axis);
  out.p_ab = void_probability(spec, {a, b}, nodes_per_axis);
  out.alpha = out.p_a * out.p_b - out.p_ab;
  return out;
}

CovIneqReport covariance_inequality_check(const KernelSpec& spec, const Window& sim_window,
                                          const Window& a, const Window& b, double scale_a,
                                          int cap_a, double scale_b, int cap_b, int replicates,
                                          std::uint64_t master_seed) {
  if (replicates < 16) throw ValidationError("covariance_inequality_check: need >= 16 replicates");
  if (cap_a < 1 || cap_b < 1)
    throw ValidationError("covariance_inequality_check: caps must be >= 1");
  const int d = spec.dim();
  for (int k = 0; k < d; ++k) {
    if (a.lower[k] < sim_window.lower[k] || a.upper[k] > sim_window.upper[k] ||
        b.lower[k] < sim_window.lower[k] || b.upper[k] > sim_window.upper[k])
      throw ValidationError("covariance_inequality_check: boxes must lie inside sim_window");
  }

  const DppSampler sampler(spec, sim_window);
  std::vector<double> fs(static_cast<std::size_t>(replicates));
  std::vector<double> gs(static_cast<std::size_t>(replicates));
  for (int rep = 0; rep < replicates; ++rep) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(rep));
    const PointPattern pat = sampler.sample(rng);
    int na = 0, nb = 0;
    for (std::size_t i = 0; i < pat.size(); ++i) {
      const double* x = pat.point(i);
      if (a.contains(x)) ++na;
      if (b.contains(x)) ++nb;
    }
    fs[static_cast<std::size_t>(rep)] = scale_a * std::min(na, cap_a);
    gs[static_cast<std::size_t>(rep)] = scale_b * std::min(nb, cap_b);
  }

  const std::size_t n = fs.size();
  double fbar = 0.0, gbar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fbar += fs[i];
    gbar += gs[i];
  }
  fbar /= static_cast<double>(n);
  gbar /= static_cast<double>(n);
  double cov = 0.0, m22 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double df = fs[i] - fbar;
    const double dg = gs[i] - gbar;
    cov += df * dg;
    m22 += df * df * dg * dg;
  }
  cov /= static_cast<double>(n - 1);
  m22 /= static_cast<double>(n);

  CovIneqReport out;
  out.cov_fg = cov;
  out.cov_fg_se = std::sqrt(std::max(m22 - cov * cov, 0.0) / static_cast<double>(n));
  out.count_cov = count_covariance_integral(spec, a, b);
  out.bound = std::abs(scale_a) * std::abs(scale_b) * std::abs(out.count_cov);
  out.holds = std::abs(out.cov_fg) <= out.bound + 3.0 * out.cov_fg_se;
  return out;
}

}  // namespace dppmix
