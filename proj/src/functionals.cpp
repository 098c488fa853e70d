// SPDX-License-Identifier: MIT
#include "dppmix/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "dppmix/errors.hpp"
#include "dppmix/quadrature.hpp"
#include "dppmix/sampler.hpp"

namespace dppmix {

namespace {

double subset_diameter(const PointPattern& pat, const int* idx, int count) {
  double d2 = 0.0;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const double* a = pat.point(static_cast<std::size_t>(idx[i]));
      const double* b = pat.point(static_cast<std::size_t>(idx[j]));
      double s = 0.0;
      for (int k = 0; k < pat.dim; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      d2 = std::max(d2, s);
    }
  return std::sqrt(d2);
}

}  // namespace

double LocalStatistic::apply(const PointPattern& pat, const int* idx, int count) const {
  if (count == 0 || count > p_max) return 0.0;
  if (count > 1 && subset_diameter(pat, idx, count) > tau) return 0.0;
  return f0(pat, idx, count);
}

LocalStatistic stat_count() {
  LocalStatistic s;
  s.name = "count";
  s.p_max = 1;
  s.tau = 0.0;
  s.f0_bound = 1.0;
  s.f0 = [](const PointPattern&, const int*, int count) { return count == 1 ? 1.0 : 0.0; };
  return s;
}

LocalStatistic stat_pair_count(double tau) {
  if (!(tau > 0.0)) throw ValidationError("pair_count: tau must be > 0");
  LocalStatistic s;
  s.name = "pair_count";
  s.p_max = 2;
  s.tau = tau;
  s.f0_bound = 1.0;
  s.f0 = [](const PointPattern&, const int*, int count) { return count == 2 ? 1.0 : 0.0; };
  return s;
}

LocalStatistic stat_triangle_count(double tau) {
  if (!(tau > 0.0)) throw ValidationError("triangle_count: tau must be > 0");
  LocalStatistic s;
  s.name = "triangle_count";
  s.p_max = 3;
  s.tau = tau;
  s.f0_bound = 1.0;
  s.f0 = [](const PointPattern&, const int*, int count) { return count == 3 ? 1.0 : 0.0; };
  return s;
}

LocalStatistic stat_pair_dist_sum(double tau) {
  if (!(tau > 0.0)) throw ValidationError("pair_dist_sum: tau must be > 0");
  LocalStatistic s;
  s.name = "pair_dist_sum";
  s.p_max = 2;
  s.tau = tau;
  s.f0_bound = tau;
  s.f0 = [](const PointPattern& pat, const int* idx, int count) {
    return count == 2 ? pat.distance(static_cast<std::size_t>(idx[0]),
                                     static_cast<std::size_t>(idx[1]))
                      : 0.0;
  };
  return s;
}

LocalStatistic make_statistic(const std::string& name, double tau) {
  if (name == "count") return stat_count();
  if (name == "pair_count") return stat_pair_count(tau);
  if (name == "triangle_count") return stat_triangle_count(tau);
  if (name == "pair_dist_sum") return stat_pair_dist_sum(tau);
  throw ValidationError("unknown statistic: " + name);
}

namespace {

constexpr int kMaxBallOccupancy = 64;

template <typename Visit>
void extend_clique(const CellGrid& grid, const std::vector<int>& cand, std::size_t start,
                   int* idx, int depth, int p_max, double tau2, Visit& visit) {
  if (depth >= 8) return;  // p_max is capped at 8; keeps the subset buffer in bounds
  for (std::size_t c = start; c < cand.size(); ++c) {
    const int j = cand[c];
    bool clique = true;
    // cand members are within tau of the root idx[0]; check the rest.
    for (int q = 1; q < depth; ++q) {
      if (grid.dist2(static_cast<std::size_t>(idx[q]), static_cast<std::size_t>(j)) > tau2) {
        clique = false;
        break;
      }
    }
    if (!clique) continue;
    idx[depth] = j;
    visit(idx, depth + 1);
    if (depth + 1 < p_max) extend_clique(grid, cand, c + 1, idx, depth + 1, p_max, tau2, visit);
  }
}

// Enumerates every subset of size 1..p_max with pairwise distances <= tau
// exactly once (rooted at its least point index) and applies `visit`.
template <typename Visit>
void enumerate_local_subsets(const LocalStatistic& stat, const PointPattern& pat, Visit&& visit) {
  const std::size_t n = pat.size();
  if (n == 0) return;
  if (stat.p_max < 1 || stat.p_max > 8)
    throw ValidationError("eval_statistic: p_max must be in 1..8");
  int idx[8];

  if (stat.p_max == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      idx[0] = static_cast<int>(i);
      visit(idx, 1);
    }
    return;
  }
  if (!(stat.tau > 0.0)) throw ValidationError("eval_statistic: subset statistics need tau > 0");

  const CellGrid grid(pat, stat.tau);
  const double tau2 = stat.tau * stat.tau;
  std::vector<int> nb;
  std::vector<int> cand;
  for (std::size_t i = 0; i < n; ++i) {
    grid.neighbors_within(i, stat.tau, nb);
    if (static_cast<int>(nb.size()) + 1 > kMaxBallOccupancy)
      throw ResourceError("eval_statistic: more than 64 points in a tau-ball");
    idx[0] = static_cast<int>(i);
    visit(idx, 1);
    cand.clear();
    for (int j : nb)
      if (j > static_cast<int>(i)) cand.push_back(j);
    std::sort(cand.begin(), cand.end());
    extend_clique(grid, cand, 0, idx, 1, stat.p_max, tau2, visit);
  }
}

}  // namespace

double eval_statistic(const LocalStatistic& stat, const PointPattern& pat) {
  double sum = 0.0;
  enumerate_local_subsets(stat, pat,
                          [&](const int* idx, int count) { sum += stat.apply(pat, idx, count); });
  return sum;
}

double eval_statistic_barycentre(const LocalStatistic& stat, const PointPattern& pat,
                                 const Window& w) {
  if (w.dim() != pat.dim) throw ValidationError("eval_statistic_barycentre: dimension mismatch");
  double sum = 0.0;
  std::vector<double> bary(static_cast<std::size_t>(pat.dim));
  enumerate_local_subsets(stat, pat, [&](const int* idx, int count) {
    for (int k = 0; k < pat.dim; ++k) bary[static_cast<std::size_t>(k)] = 0.0;
    for (int q = 0; q < count; ++q) {
      const double* p = pat.point(static_cast<std::size_t>(idx[q]));
      for (int k = 0; k < pat.dim; ++k) bary[static_cast<std::size_t>(k)] += p[k];
    }
    for (int k = 0; k < pat.dim; ++k) bary[static_cast<std::size_t>(k)] /= count;
    if (w.contains_half_open(bary.data())) sum += stat.apply(pat, idx, count);
  });
  return sum;
}

double eval_statistic_bruteforce(const LocalStatistic& stat, const PointPattern& pat) {
  const std::size_t n = pat.size();
  if (n > 25) throw ResourceError("eval_statistic_bruteforce: pattern too large for 2^n scan");
  double sum = 0.0;
  int idx[32];
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    int count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) idx[count++] = static_cast<int>(i);
    if (count > stat.p_max) continue;
    sum += stat.apply(pat, idx, count);
  }
  return sum;
}

double tuple_statistic(const std::function<double(const PointPattern&, const int*, int)>& f0,
                       int p, double tau, const PointPattern& pat) {
  if (p < 1 || p > 8) throw ValidationError("tuple_statistic: p must be in 1..8");
  // One evaluation per unordered subset equals the sum over distinct ordered
  // tuples divided by p! when f0 is symmetric.
  LocalStatistic s;
  s.name = "tuple";
  s.p_max = p;
  s.tau = tau;
  s.f0 = [&f0, p](const PointPattern& pat2, const int* idx, int count) {
    return count == p ? f0(pat2, idx, count) : 0.0;
  };
  return eval_statistic(s, pat);
}

double variance_lowerbound_p1(const KernelSpec& spec, const Window& w,
                              const std::function<double(const double*)>& f0) {
  const auto g = [&](const double* x) { return f0(x) * spec.rho_at(x); };
  return integrate_box(g, w, 1e-6, 16, 8).value / w.volume();
}

double variance_lowerbound_p2(const KernelSpec& spec, const Window& w, double tau,
                              const std::function<double(const double*, const double*)>& f0) {
  if (spec.dim() != 2 || w.dim() != 2)
    throw ValidationError("variance_lowerbound_p2: implemented for d = 2");
  if (!(tau > 0.0)) throw ValidationError("variance_lowerbound_p2: tau must be > 0");
  // With u = y - x the determinant factors: det K[(x, x+u)] =
  // rho(x) rho(x+u) (1 - C(u)^2); integrate polar in u, box in x.
  const auto radial = [&](double r) {
    const double c = spec.corr.correlation(r);
    const double gpair = 1.0 - c * c;
    if (r == 0.0 || gpair == 0.0) return 0.0;
    const auto angular = [&](double theta) {
      const double u0 = r * std::cos(theta);
      const double u1 = r * std::sin(theta);
      const double lo0 = std::max(w.lower[0], w.lower[0] - u0);
      const double hi0 = std::min(w.upper[0], w.upper[0] - u0);
      const double lo1 = std::max(w.lower[1], w.lower[1] - u1);
      const double hi1 = std::min(w.upper[1], w.upper[1] - u1);
      if (hi0 <= lo0 || hi1 <= lo1) return 0.0;
      Eigen::Vector2d lo(lo0, lo1), hi(hi0, hi1);
      const Window inner{lo, hi};
      const auto fx = [&](const double* x) {
        const double y[2] = {x[0] + u0, x[1] + u1};
        return f0(x, y) * spec.rho_at(x) * spec.rho_at(y);
      };
      return integrate_box(fx, inner, 1e-5, 4, 8).value;
    };
    return r * gpair * simpson(angular, 0.0, 2.0 * 3.14159265358979323846, 128);
  };
  const double integral = simpson(radial, 0.0, tau, 192);
  return integral / w.volume();
}

VarianceLinearityReport variance_linear_bound_check(const KernelSpec& spec,
                                                    const LocalStatistic& stat,
                                                    const std::vector<Window>& windows,
                                                    const std::vector<int>& replicates,
                                                    std::uint64_t master_seed) {
  if (windows.size() < 3) throw ValidationError("variance_linear_bound_check: need >= 3 windows");
  if (replicates.size() != windows.size())
    throw ValidationError("variance_linear_bound_check: one replicate count per window");
  VarianceLinearityReport rep;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const DppSampler sampler(spec, windows[wi]);
    std::vector<double> vals(static_cast<std::size_t>(replicates[wi]));
    for (int r = 0; r < replicates[wi]; ++r) {
      RngStream rng(master_seed,
                    (static_cast<std::uint64_t>(wi) << 40) | static_cast<std::uint64_t>(r));
      vals[static_cast<std::size_t>(r)] = eval_statistic(stat, sampler.sample(rng));
    }
    const MomentSummary ms = summarize(vals);
    const double vol = windows[wi].volume();
    rep.volumes.push_back(vol);
    rep.variances.push_back(ms.variance);
    rep.variance_se.push_back(ms.se_variance);
    rep.ratio.push_back(ms.variance / vol);
    rep.ratio_se.push_back(std::max(ms.se_variance / vol, 1e-12));
  }
  rep.ratio_trend = wls_slope(rep.volumes, rep.ratio, rep.ratio_se);
  rep.upward_trend = rep.ratio_trend.slope > 1.645 * rep.ratio_trend.se;
  return rep;
}

}  // namespace dppmix
