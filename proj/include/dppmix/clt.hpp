// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dppmix/functionals.hpp"
#include "dppmix/geometry.hpp"
#include "dppmix/kernels.hpp"
#include "dppmix/stats.hpp"

namespace dppmix {

/// Checks of the three sufficient conditions for asymptotic normality of an
/// additive local statistic over growing windows:
///  (1) vanishing boundary effect: |(boundary of W) dilated by r| / |W|
///      decreases along the window sequence (r = max(tau, 1));
///  (2) kernel decay: the log-log slope of omega(r) over r in [5, 100] is
///      below -d/2 - 0.05 (so omega(r) = o(r^{-(d+eps)/2}) for some eps > 0);
///  (3) non-degenerate limiting variance: operator norm < 1 together with a
///      positive mass integral for the statistic (intensity mass for
///      counts, pair-density mass for pair statistics).
struct CltConditionsReport {
  std::vector<double> h1_ratios;
  bool h1_ok = false;

  double h2_slope = 0.0;
  double h2_threshold = 0.0;
  bool h2_ok = false;

  double h3_op_norm = 0.0;
  double h3_mass = 0.0;   // statistic-specific mass integral on the last window
  double h3_value = 0.0;  // (1 - op_norm) * mass
  std::string h3_mass_kind;
  bool h3_ok = false;

  bool all_ok = false;
};

CltConditionsReport check_clt_conditions(const KernelSpec& spec, const LocalStatistic& stat,
                                         const std::vector<Window>& windows);

/// Monte-Carlo distribution of the statistic on each window, standardized by
/// the per-window sample mean and deviation.
struct CltWindowStats {
  Window window;
  int replicates = 0;
  MomentSummary moments;
  double ks_normal = 0.0;
  std::vector<double> values;
  std::vector<double> standardized;
};

struct CltRunResult {
  std::vector<CltWindowStats> windows;
  /// WLS trend of Var(f)/|W| against |W| (flat slope = extensive variance).
  SlopeFit var_ratio_trend;
};

CltRunResult run_clt(const KernelSpec& spec, const LocalStatistic& stat,
                     const std::vector<Window>& windows, const std::vector<int>& replicates,
                     std::uint64_t master_seed);

}  // namespace dppmix
