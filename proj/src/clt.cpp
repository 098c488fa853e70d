// SPDX-License-Identifier: MIT
#include "dppmix/clt.hpp"

#include <algorithm>
#include <cmath>

#include "dppmix/errors.hpp"
#include "dppmix/rng.hpp"
#include "dppmix/sampler.hpp"

namespace dppmix {

CltConditionsReport check_clt_conditions(const KernelSpec& spec, const LocalStatistic& stat,
                                         const std::vector<Window>& windows) {
  if (windows.size() < 2) throw ValidationError("check_clt_conditions: need >= 2 windows");
  CltConditionsReport rep;

  const double r_dil = std::max(stat.tau, 1.0);
  for (const Window& w : windows)
    rep.h1_ratios.push_back(boundary_dilation_volume(w, r_dil) / w.volume());
  rep.h1_ok = true;
  for (std::size_t i = 1; i < rep.h1_ratios.size(); ++i)
    if (!(rep.h1_ratios[i] < rep.h1_ratios[i - 1])) rep.h1_ok = false;

  const int d = spec.dim();
  std::vector<double> logs_r, logs_w;
  for (int i = 0; i < 20; ++i) {
    const double r = 5.0 * std::pow(20.0, i / 19.0);  // log-spaced over [5, 100]
    logs_r.push_back(std::log(r));
    logs_w.push_back(spec.omega_log(r));
  }
  rep.h2_slope = ols_slope(logs_r, logs_w).slope;
  rep.h2_threshold = -0.5 * d - 0.05;
  rep.h2_ok = rep.h2_slope < rep.h2_threshold;

  rep.h3_op_norm = spec.rho_max * spec.corr.spectral_sup();
  const Window& wlast = windows.back();
  if (stat.p_max == 1) {
    rep.h3_mass_kind = "intensity_mass";
    rep.h3_mass = variance_lowerbound_p1(spec, wlast, [](const double*) { return 1.0; });
  } else {
    // Proxy for higher-order statistics: positive close-pair density mass.
    rep.h3_mass_kind = "pair_mass";
    const double tau = stat.tau;
    rep.h3_mass = variance_lowerbound_p2(
        spec, wlast, tau, [](const double*, const double*) { return 1.0; });
  }
  rep.h3_value = (1.0 - rep.h3_op_norm) * rep.h3_mass;
  rep.h3_ok = rep.h3_op_norm < 1.0 && rep.h3_mass > 0.0;

  rep.all_ok = rep.h1_ok && rep.h2_ok && rep.h3_ok;
  return rep;
}

CltRunResult run_clt(const KernelSpec& spec, const LocalStatistic& stat,
                     const std::vector<Window>& windows, const std::vector<int>& replicates,
                     std::uint64_t master_seed) {
  if (windows.empty()) throw ValidationError("run_clt: need at least one window");
  if (replicates.size() != windows.size())
    throw ValidationError("run_clt: one replicate count per window");

  CltRunResult out;
  std::vector<double> volumes, ratios, ratio_se;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    if (replicates[wi] < 8) throw ValidationError("run_clt: need >= 8 replicates per window");
    CltWindowStats ws;
    ws.window = windows[wi];
    ws.replicates = replicates[wi];
    ws.values.resize(static_cast<std::size_t>(replicates[wi]));
    const DppSampler sampler(spec, windows[wi]);
    for (int r = 0; r < replicates[wi]; ++r) {
      RngStream rng(master_seed,
                    (static_cast<std::uint64_t>(wi) << 40) | static_cast<std::uint64_t>(r));
      ws.values[static_cast<std::size_t>(r)] = eval_statistic(stat, sampler.sample(rng));
    }
    ws.moments = summarize(ws.values);
    if (!(ws.moments.sd > 0.0))
      throw NumericError("run_clt: degenerate statistic (zero sample variance)");
    ws.standardized.resize(ws.values.size());
    for (std::size_t i = 0; i < ws.values.size(); ++i)
      ws.standardized[i] = (ws.values[i] - ws.moments.mean) / ws.moments.sd;
    ws.ks_normal = ks_distance_normal(ws.standardized, 0.0, 1.0);

    volumes.push_back(windows[wi].volume());
    ratios.push_back(ws.moments.variance / volumes.back());
    ratio_se.push_back(std::max(ws.moments.se_variance / volumes.back(), 1e-12));
    out.windows.push_back(std::move(ws));
  }
  if (windows.size() >= 3) out.var_ratio_trend = wls_slope(volumes, ratios, ratio_se);
  return out;
}

}  // namespace dppmix
