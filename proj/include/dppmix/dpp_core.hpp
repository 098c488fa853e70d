// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dppmix/geometry.hpp"
#include "dppmix/kernels.hpp"

namespace dppmix {

/// Kernel matrix K[x] = (K(x_i, x_j))_{ij} for a finite configuration.
/// Throws on duplicate points.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts);

/// n-th order intensity rho_n(x_1..x_n) = det K[x]; values within 1e-9 below
/// zero are clamped to 0.
double intensity_n(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts);

/// D(x, y) = rho_2(x,y) - rho_1(x) rho_1(y) = -|K(x,y)|^2.
double d_function(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Integral of D over A x B (equals Cov(N(A), N(B)) for disjoint A, B; for
/// overlapping sets the full covariance adds the intensity mass of the
/// overlap). Stationary kernels reduce to a single d-dim integral of
/// C^2(u) |A cap (B - u)|; otherwise a 2d-dim tensor rule is used.
double count_covariance_integral(const KernelSpec& spec, const Window& a, const Window& b,
                                 double rel_tol = 1e-4);

/// Var(N(A)) = int_A rho + int int_{A x A} D for a DPP.
double count_variance(const KernelSpec& spec, const Window& a, double rel_tol = 1e-4);

/// Midpoint Nystrom discretization of the kernel operator on a union of
/// disjoint boxes: matrix M_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j) with w the
/// cell volumes. Eigenvalues approximate the operator spectrum on the region.
struct DiscretizedOperator {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd eigenvalues;  // ascending

  [[nodiscard]] double op_norm() const { return eigenvalues.size() ? eigenvalues[eigenvalues.size() - 1] : 0.0; }
  [[nodiscard]] double trace() const { return matrix.trace(); }
};

DiscretizedOperator discretize_operator(const KernelSpec& spec, const std::vector<Window>& boxes,
                                        int grid_n);

/// P(N(A) = 0) = det(I - K_A) via the Nystrom eigenvalues; requires all
/// eigenvalues <= 1 + 1e-6 (operator validity), result clamped to [0, 1].
double void_probability(const KernelSpec& spec, const std::vector<Window>& boxes,
                        int grid_n = 24);

/// det(M1) det(M2) - det(M) for the PSD block matrix M = [[M1, N],[N^T, M2]],
/// together with the bound k(n-k) Tr(N^T N) max|M|^(n-2). The gap lies in
/// [0, bound] up to numerical tolerance.
struct DetSplitGap {
  double gap = 0.0;
  double bound = 0.0;
};
DetSplitGap det_split_gap(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                          const Eigen::MatrixXd& n);

/// Checks det(I - M N) >= 1 - Tr(M N) for PSD M, N with M <= N^{-1} in the
/// Loewner order (verified through the largest eigenvalue of
/// N^{1/2} M N^{1/2}); returns both sides.
struct DetTraceBound {
  double det_side = 0.0;
  double trace_side = 0.0;
};
DetTraceBound det_trace_lower(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n);

/// Bound on E[2^(n N(A))]: exp((2^n - 1) sup|K| |A|).
double exp_moment_bound(const KernelSpec& spec, const Window& a, int n);

}  // namespace dppmix
