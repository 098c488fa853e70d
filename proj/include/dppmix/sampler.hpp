// SPDX-License-Identifier: MIT
#pragma once

#include <complex>
#include <vector>

#include "dppmix/geometry.hpp"
#include "dppmix/kernels.hpp"
#include "dppmix/rng.hpp"

namespace dppmix {

/// Fourier modes of the kernel operator periodized on a box: mode k in Z^d
/// has eigenvalue lambda_k = rho_max * c_hat(k / L) in [0, 1]. The basis is
/// truncated at |k|_inf <= truncation; the default picks the smallest cutoff
/// whose captured spectral mass is >= 99.9% of rho_max |W| (the mean point
/// count of the stationary process at intensity rho_max).
struct SpectralBasis {
  Window window;
  int dim = 0;
  int truncation = 0;
  std::vector<int> modes;      // flattened, modes.size() = count * dim
  std::vector<double> lambda;  // matching eigenvalues, in (0, 1]
  double mass_captured = 0.0;
  double mass_target = 0.0;
  bool low_mass_warning = false;

  [[nodiscard]] std::size_t count() const {
    return dim == 0 ? 0 : modes.size() / static_cast<std::size_t>(dim);
  }
};

SpectralBasis build_spectral_basis(const KernelSpec& spec, const Window& w, int truncation = -1);

/// Exact sampler for the (periodized) DPP on a box. Each draw Bernoulli-
/// selects modes by eigenvalue, then samples the resulting projection DPP
/// point by point from its conditional density, via rejection against the
/// uniform proposal. An orthonormal basis of the complement of the selected
/// mode directions is maintained through Householder reflections, so a
/// proposal costs one (n x m) adjoint product and the whole draw is O(n^3).
///
/// For log-linear kernels the stationary process at rho_max is sampled and
/// independently thinned with retention rho(x)/rho_max.
class DppSampler {
 public:
  DppSampler(KernelSpec spec, const Window& w, int truncation = -1);

  /// One replicate of the process described by the spec (thinning included).
  [[nodiscard]] PointPattern sample(RngStream& rng) const;

  /// Stationary draw at intensity rho_max, no thinning.
  [[nodiscard]] PointPattern sample_stationary(RngStream& rng) const;

  [[nodiscard]] const SpectralBasis& basis() const { return basis_; }
  [[nodiscard]] const KernelSpec& spec() const { return spec_; }

  static constexpr long kMaxRejectionIterations = 1'000'000;

 private:
  KernelSpec spec_;
  Window window_;
  SpectralBasis basis_;
};

/// Independent thinning with retention rho(x) / rho_max.
PointPattern thin_inhomogeneous(const PointPattern& pat, const KernelSpec& spec, RngStream& rng);

/// Poisson process with the same intensity model as the spec (baseline for
/// variance and summary-statistic comparisons).
PointPattern sample_poisson(const KernelSpec& spec, const Window& w, RngStream& rng);

}  // namespace dppmix
