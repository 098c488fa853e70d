// SPDX-License-Identifier: MIT
#include "dppmix/stats.hpp"

#include <algorithm>
#include <cmath>

#include "dppmix/errors.hpp"

namespace dppmix {

MomentSummary summarize(const std::vector<double>& x) {
  MomentSummary s;
  s.n = x.size();
  if (s.n < 2) throw ValidationError("summarize: need at least 2 values");
  const double n = static_cast<double>(s.n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.mean = mean;
  s.variance = m2 * n / (n - 1.0);
  s.sd = std::sqrt(s.variance);
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  s.se_mean = s.sd / std::sqrt(n);
  // Var(s^2) = (mu4 - sigma^4 (n-3)/(n-1)) / n, with sample moments plugged in.
  const double var_s2 = std::max(0.0, (m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n);
  s.se_variance = std::sqrt(var_s2);
  return s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double ks_distance_normal(std::vector<double> sample, double mu, double sd) {
  if (sample.size() < 2) throw ValidationError("ks_distance_normal: need at least 2 values");
  if (!(sd > 0.0)) throw ValidationError("ks_distance_normal: sd must be > 0");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf((sample[i] - mu) / sd);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d = std::max({d, lo, hi});
  }
  return d;
}

double median(std::vector<double> x) {
  if (x.empty()) throw ValidationError("median: empty sample");
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
  double hi = x[mid];
  if (x.size() % 2 == 1) return hi;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid) - 1, x.end());
  return 0.5 * (hi + x[mid - 1]);
}

SlopeFit wls_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& se) {
  if (x.size() != y.size() || x.size() != se.size() || x.size() < 2)
    throw ValidationError("wls_slope: need matching x/y/se with >= 2 points");
  double sw = 0.0, swx = 0.0, swy = 0.0;
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(se[i] > 0.0)) throw ValidationError("wls_slope: standard errors must be > 0");
    w[i] = 1.0 / (se[i] * se[i]);
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw ValidationError("wls_slope: degenerate x values");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.se = std::sqrt(1.0 / sxx);  // known-variance weights
  f.intercept = ybar - f.slope * xbar;
  return f;
}

SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> se(x.size(), 1.0);
  SlopeFit f = wls_slope(x, y, se);
  // Rescale the slope SE by the residual standard deviation.
  double rss = 0.0;
  double sxx = 0.0;
  double xbar = 0.0;
  for (double v : x) xbar += v;
  xbar /= static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit = f.intercept + f.slope * x[i];
    rss += (y[i] - fit) * (y[i] - fit);
    sxx += (x[i] - xbar) * (x[i] - xbar);
  }
  const double dof = static_cast<double>(x.size()) - 2.0;
  f.se = dof > 0.0 ? std::sqrt(rss / dof / sxx) : 0.0;
  return f;
}

}  // namespace dppmix
