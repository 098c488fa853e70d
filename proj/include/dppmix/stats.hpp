// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

namespace dppmix {

/// First four sample moments of a replicate vector.
struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;  // moment-based SE of the sample variance
};

MomentSummary summarize(const std::vector<double>& x);

double normal_cdf(double x);

/// One-sample Kolmogorov-Smirnov distance between the sample and N(mu, sd^2).
double ks_distance_normal(std::vector<double> sample, double mu, double sd);

double median(std::vector<double> x);

/// Weighted least squares fit y ~ a + b x with known per-point standard
/// errors; returns the slope and its standard error.
struct SlopeFit {
  double slope = 0.0;
  double se = 0.0;
  double intercept = 0.0;
};
SlopeFit wls_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& se);

/// Ordinary least squares slope (equal weights).
SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dppmix
