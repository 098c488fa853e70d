// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <functional>

#include "dppmix/functionals.hpp"
#include "dppmix/geometry.hpp"
#include "dppmix/kernels.hpp"

namespace dppmix {

/// Surface area of the unit sphere in R^d: 2 pi^{d/2} / Gamma(d/2).
double sphere_surface(int dim);

/// Distance-decay upper bound for the strong mixing coefficient between
/// regions of volume at most p and q separated by at least r:
///   alpha_{p,q}(r) <= p q omega(r)^2.
double alpha_upper_pq(const KernelSpec& spec, double p, double q, double r);

/// One-sided version with the second region unbounded:
///   alpha_{p,inf}(r) <= p s_d int_r^inf omega(t)^2 t^{d-1} dt.
/// Requires the tail integral to converge (square-integrable kernels).
double alpha_upper_p_inf(const KernelSpec& spec, double p, double r);

/// Two-sided control of alpha for a concrete pair of boxes. The upper bound
/// is the K^2 mass int_A int_B K(x,y)^2; the lower bound multiplies it by
///   (1 - |K|_op)^{(p + q) sup_x K(x,x) / |K|_op},
/// which comes from comparing void probabilities of A and B. Valid for
/// pointwise-nonnegative kernels with |K|_op < 1 (Gaussian and Cauchy
/// families); the oscillating Bessel kernel is rejected.
struct AlphaSandwich {
  double lower = 0.0;
  double upper = 0.0;
  double prefactor = 0.0;  // lower / upper
  double op_norm = 0.0;
  bool op_norm_is_analytic = true;
};

AlphaSandwich alpha_sandwich(const KernelSpec& spec, const Window& a, const Window& b);

/// Dependence witnessed by the void-void event: P(N(A)=0) P(N(B)=0) -
/// P(N(A)=0, N(B)=0) >= 0 under negative association, and any such event
/// probability gap is a lower bound for alpha between the two regions.
/// Probabilities are Fredholm determinants of the discretized operator.
struct VoidAlphaEstimate {
  double p_a = 0.0;
  double p_b = 0.0;
  double p_ab = 0.0;
  double alpha = 0.0;  // p_a * p_b - p_ab
};

VoidAlphaEstimate void_alpha(const KernelSpec& spec, const Window& a, const Window& b,
                             int nodes_per_axis);

/// Monte-Carlo check of the covariance inequality
///   |Cov(f(X cap A), g(X cap B))| <= |f|_A |g|_B |Cov(N(A), N(B))|
/// with capped, scaled counts f = s_a min(N(A), cap) (add-one-point seminorm
/// |f|_A = s_a) and likewise for g. Patterns are sampled on `sim_window`,
/// which must contain both boxes with margin. `holds` allows 3 SE of MC
/// noise on the left-hand side.
struct CovIneqReport {
  double cov_fg = 0.0;
  double cov_fg_se = 0.0;
  double bound = 0.0;
  double count_cov = 0.0;  // Cov(N(A), N(B)), by integration
  bool holds = false;
};

CovIneqReport covariance_inequality_check(const KernelSpec& spec, const Window& sim_window,
                                          const Window& a, const Window& b, double scale_a,
                                          int cap_a, double scale_b, int cap_b, int replicates,
                                          std::uint64_t master_seed);

}  // namespace dppmix
