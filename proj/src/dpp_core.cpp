// SPDX-License-Identifier: MIT
#include "dppmix/dpp_core.hpp"

#include <cmath>

#include "dppmix/errors.hpp"
#include "dppmix/quadrature.hpp"

namespace dppmix {

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts) {
  const int n = static_cast<int>(pts.size());
  for (const auto& p : pts)
    if (p.size() != spec.dim()) throw ValidationError("kernel_matrix: point dimension mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (pts[static_cast<std::size_t>(i)] == pts[static_cast<std::size_t>(j)])
        throw ValidationError("kernel_matrix: duplicate points");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = spec.kernel(pts[static_cast<std::size_t>(i)].data(),
                                   pts[static_cast<std::size_t>(j)].data());
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

double intensity_n(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts) {
  if (pts.empty()) return 1.0;
  const double det = kernel_matrix(spec, pts).determinant();
  if (det < 0.0 && det >= -1e-9) return 0.0;
  return det;
}

double d_function(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double k = spec.kernel(x.data(), y.data());
  return -k * k;
}

namespace {

// Stationary case: - int C^2(u) rho^2 |A cap (B - u)| du over the difference
// box {b - a : a in A, b in B}.
double cov_integral_stationary(const KernelSpec& spec, const Window& a, const Window& b,
                               double rel_tol) {
  const int d = a.dim();
  Eigen::VectorXd lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = b.lower[k] - a.upper[k];
    hi[k] = b.upper[k] - a.lower[k];
  }
  const Window diff{lo, hi};
  const double rho = spec.intensity.rho;
  Eigen::VectorXd u(d);
  const auto f = [&](const double* uv) {
    for (int k = 0; k < d; ++k) u[k] = uv[k];
    double ov = 1.0;
    for (int k = 0; k < d; ++k) {
      // overlap of [aLo,aHi] and [bLo-u,bHi-u] per axis
      const double lo_k = std::max(a.lower[k], b.lower[k] - uv[k]);
      const double hi_k = std::min(a.upper[k], b.upper[k] - uv[k]);
      if (hi_k <= lo_k) return 0.0;
      ov *= hi_k - lo_k;
    }
    const double c = spec.corr.correlation_vec(uv);
    return c * c * ov;
  };
  const QuadResult q = integrate_box(f, diff, rel_tol, 16, 8);
  return -rho * rho * q.value;
}

double cov_integral_general(const KernelSpec& spec, const Window& a, const Window& b,
                            double rel_tol) {
  const int d = a.dim();
  Eigen::VectorXd lo(2 * d), hi(2 * d);
  lo << a.lower, b.lower;
  hi << a.upper, b.upper;
  const Window prod{lo, hi};
  const auto f = [&](const double* xy) {
    const double k = spec.kernel(xy, xy + d);
    return k * k;
  };
  const QuadResult q = integrate_box(f, prod, rel_tol, 8, 5);
  return -q.value;
}

}  // namespace

double count_covariance_integral(const KernelSpec& spec, const Window& a, const Window& b,
                                 double rel_tol) {
  if (a.dim() != spec.dim() || b.dim() != spec.dim())
    throw ValidationError("count_covariance_integral: dimension mismatch");
  if (spec.intensity.homogeneous) return cov_integral_stationary(spec, a, b, rel_tol);
  return cov_integral_general(spec, a, b, rel_tol);
}

double count_variance(const KernelSpec& spec, const Window& a, double rel_tol) {
  double mass = 0.0;
  if (spec.intensity.homogeneous) {
    mass = spec.intensity.rho * a.volume();
  } else {
    const auto f = [&](const double* x) { return spec.rho_at(x); };
    mass = integrate_box(f, a, rel_tol, 16, 8).value;
  }
  return mass + count_covariance_integral(spec, a, a, rel_tol);
}

DiscretizedOperator discretize_operator(const KernelSpec& spec, const std::vector<Window>& boxes,
                                        int grid_n) {
  if (boxes.empty()) throw ValidationError("discretize_operator: no boxes");
  if (grid_n < 2) throw ValidationError("discretize_operator: grid_n must be >= 2");
  const int d = boxes.front().dim();
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      if (box_distance(boxes[i], boxes[j]) <= 0.0)
        throw ValidationError("discretize_operator: boxes must be disjoint");

  DiscretizedOperator op;
  for (const auto& box : boxes) {
    if (box.dim() != d) throw ValidationError("discretize_operator: dimension mismatch");
    double cell = 1.0;
    for (int k = 0; k < d; ++k) cell *= box.side(k) / grid_n;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
      Eigen::VectorXd x(d);
      for (int k = 0; k < d; ++k)
        x[k] = box.lower[k] + (idx[static_cast<std::size_t>(k)] + 0.5) * box.side(k) / grid_n;
      op.points.push_back(std::move(x));
      op.weights.push_back(cell);
      int k = 0;
      for (; k < d; ++k) {
        if (++idx[static_cast<std::size_t>(k)] < grid_n) break;
        idx[static_cast<std::size_t>(k)] = 0;
      }
      if (k == d) break;
    }
  }
  const int n = static_cast<int>(op.points.size());
  if (n > 6000) throw ResourceError("discretize_operator: grid too large (" + std::to_string(n) + " nodes)");
  op.matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const double wi = std::sqrt(op.weights[static_cast<std::size_t>(i)]);
    for (int j = i; j < n; ++j) {
      const double wj = std::sqrt(op.weights[static_cast<std::size_t>(j)]);
      const double v = wi * wj *
                       spec.kernel(op.points[static_cast<std::size_t>(i)].data(),
                                   op.points[static_cast<std::size_t>(j)].data());
      op.matrix(i, j) = v;
      op.matrix(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("discretize_operator: eigensolver failed");
  op.eigenvalues = es.eigenvalues();
  return op;
}

double void_probability(const KernelSpec& spec, const std::vector<Window>& boxes, int grid_n) {
  const DiscretizedOperator op = discretize_operator(spec, boxes, grid_n);
  double log_det = 0.0;
  for (int i = 0; i < op.eigenvalues.size(); ++i) {
    const double lam = op.eigenvalues[i];
    if (lam > 1.0 + 1e-6)
      throw NumericError("void_probability: operator eigenvalue above 1 (" +
                         std::to_string(lam) + "); kernel is not a valid DPP operator here");
    if (lam >= 1.0) return 0.0;
    if (lam < -1e-6)
      throw NumericError("void_probability: negative operator eigenvalue " + std::to_string(lam));
    log_det += std::log1p(-std::max(lam, 0.0));
  }
  const double p = std::exp(log_det);
  return std::min(1.0, std::max(0.0, p));
}

DetSplitGap det_split_gap(const Eigen::MatrixXd& m1, const Eigen::MatrixXd& m2,
                          const Eigen::MatrixXd& n) {
  const int k = static_cast<int>(m1.rows());
  const int l = static_cast<int>(m2.rows());
  if (m1.cols() != k || m2.cols() != l || n.rows() != k || n.cols() != l)
    throw ValidationError("det_split_gap: block shapes inconsistent");
  Eigen::MatrixXd m(k + l, k + l);
  m.topLeftCorner(k, k) = m1;
  m.bottomRightCorner(l, l) = m2;
  m.topRightCorner(k, l) = n;
  m.bottomLeftCorner(l, k) = n.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()[0] < -1e-9 * std::max(1.0, std::abs(es.eigenvalues()[k + l - 1])))
    throw ValidationError("det_split_gap: block matrix is not PSD");
  DetSplitGap g;
  g.gap = m1.determinant() * m2.determinant() - m.determinant();
  const double max_abs = m.cwiseAbs().maxCoeff();
  const int nn = k + l;
  g.bound = static_cast<double>(k) * static_cast<double>(l) * (n.transpose() * n).trace() *
            (nn >= 2 ? std::pow(max_abs, nn - 2) : 1.0);
  return g;
}

DetTraceBound det_trace_lower(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n) {
  if (m.rows() != m.cols() || n.rows() != n.cols() || m.rows() != n.rows())
    throw ValidationError("det_trace_lower: need square matrices of equal size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esm(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esn(n);
  if (esm.eigenvalues()[0] < -1e-9 || esn.eigenvalues()[0] < -1e-9)
    throw ValidationError("det_trace_lower: M and N must be PSD");
  // M <= N^{-1}  <=>  lambda_max(N^{1/2} M N^{1/2}) <= 1.
  const Eigen::MatrixXd nh = esn.operatorSqrt();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esb(nh * m * nh, Eigen::EigenvaluesOnly);
  const double lmax = esb.eigenvalues()[esb.eigenvalues().size() - 1];
  if (lmax > 1.0 + 1e-9)
    throw ValidationError("det_trace_lower: M <= N^{-1} fails (lambda_max=" +
                          std::to_string(lmax) + ")");
  DetTraceBound b;
  const Eigen::MatrixXd mn = m * n;
  b.det_side = (Eigen::MatrixXd::Identity(m.rows(), m.cols()) - mn).determinant();
  b.trace_side = 1.0 - mn.trace();
  return b;
}

double exp_moment_bound(const KernelSpec& spec, const Window& a, int n) {
  if (n < 1) throw ValidationError("exp_moment_bound: n must be >= 1");
  if (n > 40) throw ValidationError("exp_moment_bound: n too large");
  const double factor = std::pow(2.0, n) - 1.0;
  return std::exp(factor * spec.rho_max * a.volume());
}

}  // namespace dppmix
