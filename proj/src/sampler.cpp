// SPDX-License-Identifier: MIT
#include "dppmix/sampler.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dppmix/errors.hpp"

namespace dppmix {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676656;

// Sum of lambda over the |k|_inf = t shell (t = 0 means the single origin).
double shell_mass(const KernelSpec& spec, const Window& w, int t, std::vector<int>& shell_modes,
                  std::vector<double>& shell_lambda) {
  const int d = w.dim();
  shell_modes.clear();
  shell_lambda.clear();
  double mass = 0.0;
  std::vector<int> k(static_cast<std::size_t>(d), -t);
  while (true) {
    int linf = 0;
    for (int a = 0; a < d; ++a) linf = std::max(linf, std::abs(k[static_cast<std::size_t>(a)]));
    if (linf == t) {
      double xi2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double f = k[static_cast<std::size_t>(a)] / w.side(a);
        xi2 += f * f;
      }
      const double lam = spec.spectral_density(std::sqrt(xi2));
      if (lam > 1.0 + 1e-9)
        throw NumericError("spectral basis: mode eigenvalue above 1 (" + std::to_string(lam) +
                           "); kernel violates the existence condition");
      if (lam > 1e-12) {
        for (int a = 0; a < d; ++a) shell_modes.push_back(k[static_cast<std::size_t>(a)]);
        shell_lambda.push_back(std::min(lam, 1.0));
        mass += std::min(lam, 1.0);
      }
    }
    int a = 0;
    for (; a < d; ++a) {
      if (++k[static_cast<std::size_t>(a)] <= t) break;
      k[static_cast<std::size_t>(a)] = -t;
    }
    if (a == d) break;
  }
  return mass;
}

}  // namespace

SpectralBasis build_spectral_basis(const KernelSpec& spec, const Window& w, int truncation) {
  spec.require_valid_process("spectral basis");
  if (w.dim() != spec.dim()) throw ValidationError("spectral basis: window dimension mismatch");
  SpectralBasis b;
  b.window = w;
  b.dim = w.dim();
  b.mass_target = spec.rho_max * w.volume();

  std::vector<int> shell_modes;
  std::vector<double> shell_lambda;
  const int t_cap = truncation >= 0 ? truncation : 4096;
  int plateau = 0;
  for (int t = 0; t <= t_cap; ++t) {
    const double add = shell_mass(spec, w, t, shell_modes, shell_lambda);
    b.modes.insert(b.modes.end(), shell_modes.begin(), shell_modes.end());
    b.lambda.insert(b.lambda.end(), shell_lambda.begin(), shell_lambda.end());
    b.mass_captured += add;
    b.truncation = t;
    if (truncation >= 0) continue;  // explicit cutoff: take every shell up to it
    if (b.mass_captured >= 0.999 * b.mass_target) break;
    plateau = add <= 1e-12 * std::max(1.0, b.mass_captured) ? plateau + 1 : 0;
    if (plateau >= 3) break;  // spectrum exhausted (compactly supported density)
    if (t == t_cap)
      throw ResourceError("spectral basis: truncation cap reached before 99.9% mass");
  }
  b.low_mass_warning = b.mass_captured < 0.99 * b.mass_target;
  if (static_cast<double>(b.count()) > 2e6)
    throw ResourceError("spectral basis: too many modes");
  return b;
}

DppSampler::DppSampler(KernelSpec spec, const Window& w, int truncation)
    : spec_(std::move(spec)), window_(w), basis_(build_spectral_basis(spec_, w, truncation)) {}

PointPattern DppSampler::sample_stationary(RngStream& rng) const {
  const int d = basis_.dim;
  const std::size_t total = basis_.count();

  // Bernoulli mode selection; the kept modes define a projection DPP.
  std::vector<const int*> kept;
  kept.reserve(static_cast<std::size_t>(basis_.mass_target * 1.5) + 8);
  for (std::size_t j = 0; j < total; ++j) {
    if (rng.bernoulli(basis_.lambda[j])) kept.push_back(&basis_.modes[j * static_cast<std::size_t>(d)]);
  }
  const int n = static_cast<int>(kept.size());
  PointPattern pat(window_);
  if (n == 0) return pat;

  // F holds an orthonormal basis (columns s..s+m) of the orthogonal
  // complement, within the kept-mode span, of the directions already pinned
  // down by accepted points.
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Identity(n, n);
  int s = 0;

  // Per-axis phase tables e^{-2 pi i k x_a / L_a}, k = -T..T.
  const int t = basis_.truncation;
  const int row = 2 * t + 1;
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(d) * row);
  Eigen::VectorXcd v(n);
  Eigen::VectorXcd w_res;
  std::vector<double> x(static_cast<std::size_t>(d));

  for (int m = n; m > 0; --m) {
    long iter = 0;
    while (true) {
      if (++iter > kMaxRejectionIterations)
        throw NonConvergenceError("dpp sampler: rejection cap hit (pathological kernel?)");
      for (int a = 0; a < d; ++a) {
        x[static_cast<std::size_t>(a)] = rng.uniform(window_.lower[a], window_.upper[a]);
        const double ang = -kTwoPi * x[static_cast<std::size_t>(a)] / window_.side(a);
        const std::complex<double> base(std::cos(ang), std::sin(ang));
        auto* tab = &phase[static_cast<std::size_t>(a) * row];
        tab[t] = 1.0;
        for (int j = 1; j <= t; ++j) {
          tab[t + j] = tab[t + j - 1] * base;
          tab[t - j] = std::conj(tab[t + j]);
        }
      }
      for (int j = 0; j < n; ++j) {
        const int* k = kept[static_cast<std::size_t>(j)];
        std::complex<double> p = phase[static_cast<std::size_t>(t + k[0])];
        for (int a = 1; a < d; ++a)
          p *= phase[static_cast<std::size_t>(a) * row + static_cast<std::size_t>(t + k[a])];
        v[j] = p;
      }
      w_res.noalias() = f.block(0, s, n, m).adjoint() * v;
      const double res2 = w_res.squaredNorm();
      if (rng.uniform01() * n < res2) break;  // accept: density (res2/|W|)/m vs envelope n/(m |W|)
    }
    pat.push_back(x.data());
    if (m == 1) break;
    // Householder downdate: rotate the accepted direction onto the block's
    // first column, then shrink the block.
    Eigen::VectorXcd c = w_res / w_res.norm();
    std::complex<double> ph = std::abs(c[0]) > 0.0 ? c[0] / std::abs(c[0]) : std::complex<double>(1.0, 0.0);
    c[0] += ph;
    c /= c.norm();
    f.block(0, s, n, m) -= 2.0 * (f.block(0, s, n, m) * c) * c.adjoint();
    ++s;
  }
  return pat;
}

PointPattern DppSampler::sample(RngStream& rng) const {
  PointPattern pat = sample_stationary(rng);
  if (spec_.intensity.homogeneous) return pat;
  return thin_inhomogeneous(pat, spec_, rng);
}

PointPattern thin_inhomogeneous(const PointPattern& pat, const KernelSpec& spec, RngStream& rng) {
  if (spec.intensity.homogeneous)
    throw ValidationError("thin_inhomogeneous: spec has a homogeneous intensity");
  PointPattern out(pat.window);
  for (std::size_t i = 0; i < pat.size(); ++i) {
    const double rho = spec.rho_at(pat.point(i));
    if (rho > spec.rho_max * (1.0 + 1e-12))
      throw ValidationError("thin_inhomogeneous: intensity exceeds rho_max at a point");
    if (rng.uniform01() * spec.rho_max < rho) out.push_back(pat.point(i));
  }
  return out;
}

PointPattern sample_poisson(const KernelSpec& spec, const Window& w, RngStream& rng) {
  const int d = w.dim();
  PointPattern pat(w);
  const long n = rng.poisson(spec.rho_max * w.volume());
  std::vector<double> x(static_cast<std::size_t>(d));
  for (long i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = rng.uniform(w.lower[a], w.upper[a]);
    if (!spec.intensity.homogeneous) {
      const double rho = spec.rho_at(x.data());
      if (rho > spec.rho_max * (1.0 + 1e-12))
        throw ValidationError("sample_poisson: intensity exceeds rho_max");
      if (!(rng.uniform01() * spec.rho_max < rho)) continue;
    }
    pat.push_back(x.data());
  }
  return pat;
}

}  // namespace dppmix
