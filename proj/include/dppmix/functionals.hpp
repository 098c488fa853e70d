// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dppmix/geometry.hpp"
#include "dppmix/kernels.hpp"
#include "dppmix/stats.hpp"

namespace dppmix {

/// Additive local statistic  f(X) = sum over subsets S of X of f0(S),
/// where f0 vanishes on subsets larger than p_max or of diameter above tau
/// (the evaluator enforces both cutoffs, so f0 only ever sees qualifying
/// subsets). f0(empty) = 0 by convention.
struct LocalStatistic {
  std::string name;
  int p_max = 3;
  double tau = 1.0;
  double f0_bound = 1.0;  // sup |f0|, used by covariance/CLT bookkeeping
  /// f0 receives the pattern plus the subset as increasing point indices.
  std::function<double(const PointPattern&, const int*, int)> f0;

  /// f0 with the size and diameter cutoffs applied.
  [[nodiscard]] double apply(const PointPattern& pat, const int* idx, int count) const;
};

LocalStatistic stat_count();
LocalStatistic stat_pair_count(double tau);
LocalStatistic stat_triangle_count(double tau);
/// Bounded pair statistic: sum of pair distances over close pairs.
LocalStatistic stat_pair_dist_sum(double tau);

/// Named lookup used by the CLI ("count", "pair_count", "triangle_count",
/// "pair_dist_sum").
LocalStatistic make_statistic(const std::string& name, double tau);

/// Grid-accelerated evaluation: enumerates every subset of size 1..p_max
/// whose diameter is <= tau (cliques of the tau-closeness graph) exactly
/// once. Throws ResourceError if any tau-ball holds more than 64 points.
double eval_statistic(const LocalStatistic& stat, const PointPattern& pat);

/// Same sum restricted to subsets whose barycentre lies in w; membership is
/// half-open so a partition of the window assigns each subset exactly once.
double eval_statistic_barycentre(const LocalStatistic& stat, const PointPattern& pat,
                                 const Window& w);

/// Reference evaluation by full subset enumeration (2^n); n <= 25 guard.
double eval_statistic_bruteforce(const LocalStatistic& stat, const PointPattern& pat);

/// p-tuple statistic sum_{distinct ordered tuples} f0(x_1..x_p) / p! for
/// symmetric f0, i.e. the subset sum with one evaluation per unordered
/// p-subset of diameter <= tau.
double tuple_statistic(const std::function<double(const PointPattern&, const int*, int)>& f0,
                       int p, double tau, const PointPattern& pat);

/// (1/|W|) int_W f0(x) rho(x) dx  (p = 1 case of the variance lower-bound
/// criterion).
double variance_lowerbound_p1(const KernelSpec& spec, const Window& w,
                              const std::function<double(const double*)>& f0);

/// (1/|W|) int_{W^2} f0(x, y) det K[(x,y)] dx dy for f0 supported on
/// |x - y| <= tau, computed as a polar integral in u = y - x (the determinant
/// factors as rho(x) rho(x+u) (1 - C(u)^2)). Positive values certify the
/// variance lower-bound condition for p = 2 statistics. d = 2 only.
double variance_lowerbound_p2(const KernelSpec& spec, const Window& w, double tau,
                              const std::function<double(const double*, const double*)>& f0);

/// Monte-Carlo check that Var(f) / |W| stays bounded over growing windows:
/// samples the process, evaluates the statistic, and tests the ratio trend
/// (one-sided 95% WLS) for an upward slope.
struct VarianceLinearityReport {
  std::vector<double> volumes;
  std::vector<double> variances;
  std::vector<double> variance_se;
  std::vector<double> ratio;
  std::vector<double> ratio_se;
  SlopeFit ratio_trend;
  bool upward_trend = false;
};

VarianceLinearityReport variance_linear_bound_check(const KernelSpec& spec,
                                                    const LocalStatistic& stat,
                                                    const std::vector<Window>& windows,
                                                    const std::vector<int>& replicates,
                                                    std::uint64_t master_seed);

}  // namespace dppmix
