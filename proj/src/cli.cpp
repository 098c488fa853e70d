// SPDX-License-Identifier: MIT
#include "dppmix/cli.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dppmix/clt.hpp"
#include "dppmix/dpp_core.hpp"
#include "dppmix/errors.hpp"
#include "dppmix/estimator.hpp"
#include "dppmix/functionals.hpp"
#include "dppmix/geometry.hpp"
#include "dppmix/kernels.hpp"
#include "dppmix/mixing.hpp"
#include "dppmix/quadrature.hpp"
#include "dppmix/rng.hpp"
#include "dppmix/sampler.hpp"
#include "dppmix/stats.hpp"

namespace dppmix::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---- config access with strict key checking ------------------------------

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok) throw ValidationError("config: unknown key '" + item.key() + "' in " + where);
  }
}

const json& require_key(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError("config: missing key '" + key + "' in " + where);
  return j.at(key);
}

double num_at(const json& j, const std::string& key, const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_number()) throw ValidationError("config: " + where + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return num_at(j, key, where);
}

long int_at(const json& j, const std::string& key, const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ValidationError("config: " + where + "." + key + " must be an integer");
  return v.get<long>();
}

long int_or(const json& j, const std::string& key, long fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return int_at(j, key, where);
}

std::string str_at(const json& j, const std::string& key, const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_string()) throw ValidationError("config: " + where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> vec_at(const json& j, const std::string& key, const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_array() || v.empty())
    throw ValidationError("config: " + where + "." + key + " must be a non-empty array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ValidationError("config: " + where + "." + key + " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::uint64_t seed_at(const json& j, const std::string& where) {
  const json& v = require_key(j, "master_seed", where);
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)))
    throw ValidationError("config: master_seed must be a non-negative integer");
  return v.get<std::uint64_t>();
}

Window parse_window(const json& j, const std::string& where) {
  check_keys(j, {"lower", "upper"}, where);
  const std::vector<double> lo = vec_at(j, "lower", where);
  const std::vector<double> hi = vec_at(j, "upper", where);
  if (lo.size() != hi.size())
    throw ValidationError("config: " + where + " lower/upper sizes differ");
  Eigen::VectorXd l(lo.size()), u(hi.size());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    l[static_cast<Eigen::Index>(k)] = lo[k];
    u[static_cast<Eigen::Index>(k)] = hi[k];
  }
  return Window(std::move(l), std::move(u));  // validates lower < upper
}

struct NamedCovariate {
  std::string name;
  CovariateMap map;
  std::vector<std::string> labels;
};

NamedCovariate parse_covariate(const std::string& name, const Window& w) {
  NamedCovariate out;
  out.name = name;
  if (name == "intercept") {
    out.map = intercept_only();
    out.labels = {"1"};
    return out;
  }
  if (name == "x1") {
    out.map = [](const double* x) {
      Eigen::VectorXd z(2);
      z << 1.0, x[0];
      return z;
    };
    out.labels = {"1", "x1"};
    return out;
  }
  if (name == "x1_scaled") {
    const double lo = w.lower[0];
    const double side = w.upper[0] - w.lower[0];
    out.map = [lo, side](const double* x) {
      Eigen::VectorXd z(2);
      z << 1.0, (x[0] - lo) / side;
      return z;
    };
    out.labels = {"1", "x1_scaled"};
    return out;
  }
  throw ValidationError("config: unknown covariate '" + name +
                        "' (expected intercept, x1 or x1_scaled)");
}

Family parse_family(const std::string& name, const std::string& where) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "cauchy") return Family::Cauchy;
  if (name == "bessel") return Family::BesselMostRepulsive;
  throw ValidationError("config: " + where + ".family must be gaussian, cauchy or bessel");
}

KernelSpec parse_kernel(const json& cfg, const Window& window, bool allow_inhomogeneous) {
  const json& jk = require_key(cfg, "kernel", "config");
  const std::string fam_name = str_at(jk, "family", "kernel");
  const Family fam = parse_family(fam_name, "kernel");
  const int d = window.dim();

  const bool log_linear = cfg.contains("intensity") &&
                          str_at(cfg.at("intensity"), "type", "intensity") == "log_linear";
  if (cfg.contains("intensity") && !log_linear)
    check_keys(cfg.at("intensity"), {"type"}, "intensity");
  if (log_linear && !allow_inhomogeneous)
    throw ValidationError("config: this command supports homogeneous kernels only");

  if (!log_linear) {
    switch (fam) {
      case Family::Gaussian: {
        check_keys(jk, {"family", "alpha", "rho"}, "kernel");
        return KernelSpec::homogeneous(
            CorrelationFamily::gaussian(d, num_at(jk, "alpha", "kernel")),
            num_at(jk, "rho", "kernel"));
      }
      case Family::Cauchy: {
        check_keys(jk, {"family", "alpha", "nu", "rho"}, "kernel");
        return KernelSpec::homogeneous(
            CorrelationFamily::cauchy(d, num_at(jk, "alpha", "kernel"),
                                      num_at(jk, "nu", "kernel")),
            num_at(jk, "rho", "kernel"));
      }
      case Family::BesselMostRepulsive: {
        check_keys(jk, {"family", "rho"}, "kernel");
        return KernelSpec::bessel(d, num_at(jk, "rho", "kernel"));
      }
    }
    throw ValidationError("config: unknown kernel family");
  }

  const json& ji = cfg.at("intensity");
  check_keys(ji, {"type", "beta", "covariate", "rho_max"}, "intensity");
  if (jk.contains("rho"))
    throw ValidationError("config: kernel.rho conflicts with a log_linear intensity");
  const std::vector<double> bv = vec_at(ji, "beta", "intensity");
  Eigen::VectorXd beta(bv.size());
  for (std::size_t k = 0; k < bv.size(); ++k) beta[static_cast<Eigen::Index>(k)] = bv[k];
  const NamedCovariate cov = parse_covariate(str_at(ji, "covariate", "intensity"), window);
  if (static_cast<std::size_t>(beta.size()) != cov.labels.size())
    throw ValidationError("config: intensity.beta length must match the covariate dimension");
  const double rho_max = num_at(ji, "rho_max", "intensity");

  CorrelationFamily corr = CorrelationFamily::gaussian(d, 1.0);
  switch (fam) {
    case Family::Gaussian:
      check_keys(jk, {"family", "alpha"}, "kernel");
      corr = CorrelationFamily::gaussian(d, num_at(jk, "alpha", "kernel"));
      break;
    case Family::Cauchy:
      check_keys(jk, {"family", "alpha", "nu"}, "kernel");
      corr = CorrelationFamily::cauchy(d, num_at(jk, "alpha", "kernel"),
                                       num_at(jk, "nu", "kernel"));
      break;
    case Family::BesselMostRepulsive:
      check_keys(jk, {"family"}, "kernel");
      corr = CorrelationFamily::bessel_most_repulsive(d, rho_max);
      break;
  }
  return KernelSpec::log_linear(corr, beta, cov.map, cov.labels, rho_max, window);
}

LocalStatistic parse_statistic(const json& cfg) {
  const json& js = require_key(cfg, "statistic", "config");
  check_keys(js, {"name", "tau"}, "statistic");
  const std::string name = str_at(js, "name", "statistic");
  const double tau = name == "count" ? num_or(js, "tau", 0.0, "statistic")
                                     : num_at(js, "tau", "statistic");
  return make_statistic(name, tau);
}

json kernel_echo(const KernelSpec& spec) {
  json j;
  j["family"] = family_name(spec.corr.family);
  j["dim"] = spec.dim();
  j["params"] = spec.corr.params;
  j["rho_max"] = spec.rho_max;
  j["homogeneous"] = spec.intensity.homogeneous;
  if (!spec.intensity.homogeneous) {
    j["beta"] = std::vector<double>(spec.intensity.beta.data(),
                                    spec.intensity.beta.data() + spec.intensity.beta.size());
    j["covariates"] = spec.intensity.covariate_names;
  }
  return j;
}

json window_echo(const Window& w) {
  json j;
  j["lower"] = std::vector<double>(w.lower.data(), w.lower.data() + w.lower.size());
  j["upper"] = std::vector<double>(w.upper.data(), w.upper.data() + w.upper.size());
  return j;
}

// ---- artifact writers -----------------------------------------------------

class ArtifactDir {
 public:
  ArtifactDir(fs::path dir, std::string command, const json& cfg, std::optional<std::uint64_t> seed)
      : dir_(std::move(dir)), command_(std::move(command)), seed_(seed) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ResourceError("cannot create output directory " + dir_.string());
    config_hash_ = hex64(fnv1a(cfg.dump()));
  }

  std::ofstream open(const std::string& name) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ResourceError("cannot write " + (dir_ / name).string());
    outputs_.push_back(name);
    return f;
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream f = open(name);
    f << j.dump(2) << '\n';
  }

  void finish() {
    json m;
    m["command"] = command_;
    m["config_hash"] = config_hash_;
    if (seed_) m["master_seed"] = *seed_;
    m["outputs"] = outputs_;
    m["tool"] = "dppmix 0.1.0";
    write_json("manifest.json", m);
  }

 private:
  fs::path dir_;
  std::string command_;
  std::optional<std::uint64_t> seed_;
  std::string config_hash_;
  std::vector<std::string> outputs_;
};

void write_pattern_csv(std::ofstream& f, const PointPattern& pat) {
  for (int k = 0; k < pat.dim; ++k) f << (k ? "," : "") << "x" << (k + 1);
  f << '\n';
  for (std::size_t i = 0; i < pat.size(); ++i) {
    const double* x = pat.point(i);
    for (int k = 0; k < pat.dim; ++k) f << (k ? "," : "") << fmt17(x[k]);
    f << '\n';
  }
}

PointPattern read_pattern_csv(const fs::path& path, const Window& w) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open pattern file " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw ValidationError("pattern file is empty: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cols;
  std::stringstream hs(line);
  std::string tok;
  while (std::getline(hs, tok, ',')) cols.push_back(tok);
  const int d = static_cast<int>(cols.size());
  for (int k = 0; k < d; ++k)
    if (cols[static_cast<std::size_t>(k)] != "x" + std::to_string(k + 1))
      throw ValidationError("pattern file header must be x1,..,xd: " + path.string());
  if (d != w.dim()) throw ValidationError("pattern dimension does not match the window");

  PointPattern pat(w);
  std::vector<double> x(static_cast<std::size_t>(d));
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    for (int k = 0; k < d; ++k) {
      if (!std::getline(ls, tok, ',') || tok.empty())
        throw ValidationError("pattern file: bad row at line " + std::to_string(lineno));
      std::size_t pos = 0;
      x[static_cast<std::size_t>(k)] = std::stod(tok, &pos);
      if (pos != tok.size())
        throw ValidationError("pattern file: bad number at line " + std::to_string(lineno));
      if (x[static_cast<std::size_t>(k)] < w.lower[k] - 1e-9 ||
          x[static_cast<std::size_t>(k)] > w.upper[k] + 1e-9)
        throw ValidationError("pattern file: point outside the window at line " +
                              std::to_string(lineno));
    }
    pat.push_back(x.data());
  }
  return pat;
}

json moments_echo(const MomentSummary& m) {
  json j;
  j["n"] = m.n;
  j["mean"] = m.mean;
  j["variance"] = m.variance;
  j["sd"] = m.sd;
  j["skewness"] = m.skewness;
  j["excess_kurtosis"] = m.excess_kurtosis;
  j["se_mean"] = m.se_mean;
  j["se_variance"] = m.se_variance;
  return j;
}

// ---- subcommand handlers ---------------------------------------------------

void cmd_simulate(const json& cfg, const fs::path& out, std::optional<std::uint64_t> seed_cli) {
  check_keys(cfg, {"kernel", "intensity", "window", "master_seed", "n_patterns"}, "config");
  const Window w = parse_window(require_key(cfg, "window", "config"), "window");
  const KernelSpec spec = parse_kernel(cfg, w, true);
  const std::uint64_t seed = seed_cli ? *seed_cli : seed_at(cfg, "config");
  const long n_patterns = int_or(cfg, "n_patterns", 1, "config");
  if (n_patterns < 1 || n_patterns > 100000)
    throw ValidationError("config: n_patterns must be in 1..100000");

  ArtifactDir art(out, "simulate", cfg, seed);
  const DppSampler sampler(spec, w);
  std::vector<double> counts;
  for (long i = 0; i < n_patterns; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const PointPattern pat = sampler.sample(rng);
    counts.push_back(static_cast<double>(pat.size()));
    const std::string base = "pattern_" + std::to_string(i);
    {
      std::ofstream f = art.open(base + ".csv");
      write_pattern_csv(f, pat);
    }
    json meta;
    meta["index"] = i;
    meta["stream_id"] = i;
    meta["n_points"] = pat.size();
    meta["window"] = window_echo(w);
    meta["kernel"] = kernel_echo(spec);
    art.write_json(base + ".meta.json", meta);
  }

  json s;
  s["n_patterns"] = n_patterns;
  s["kernel"] = kernel_echo(spec);
  s["window"] = window_echo(w);
  const SpectralBasis& basis = sampler.basis();
  s["basis"] = {{"modes", basis.count()},
                {"truncation", basis.truncation},
                {"mass_captured", basis.mass_captured},
                {"mass_target", basis.mass_target},
                {"low_mass_warning", basis.low_mass_warning}};
  s["counts"] = counts;
  if (counts.size() >= 2) s["count_moments"] = moments_echo(summarize(counts));
  art.write_json("summary.json", s);
  art.finish();
}

void cmd_props(const json& cfg, const fs::path& out) {
  check_keys(cfg,
             {"kernel", "intensity", "window", "void_box", "nodes_per_axis", "r_max", "xi_max"},
             "config");
  const Window w = parse_window(require_key(cfg, "window", "config"), "window");
  const KernelSpec spec = parse_kernel(cfg, w, true);
  const double r_max = num_or(cfg, "r_max", 5.0, "config");
  const double xi_max = num_or(cfg, "xi_max", 2.0, "config");
  if (!(r_max > 0.0) || !(xi_max > 0.0))
    throw ValidationError("config: r_max and xi_max must be > 0");

  ArtifactDir art(out, "props", cfg, std::nullopt);
  {
    std::ofstream f = art.open("correlation_curve.csv");
    f << "r,correlation,omega\n";
    for (int i = 0; i <= 200; ++i) {
      const double r = r_max * i / 200.0;
      f << fmt17(r) << ',' << fmt17(spec.corr.correlation(r)) << ',' << fmt17(spec.omega(r))
        << '\n';
    }
  }
  {
    std::ofstream f = art.open("spectral_curve.csv");
    f << "xi,spectral_density\n";
    for (int i = 0; i <= 200; ++i) {
      const double xi = xi_max * i / 200.0;
      f << fmt17(xi) << ',' << fmt17(spec.spectral_density(xi)) << '\n';
    }
  }

  json s;
  s["kernel"] = kernel_echo(spec);
  s["window"] = window_echo(w);
  s["existence_margin"] = spec.existence_margin();
  s["spectral_sup"] = spec.corr.spectral_sup();
  s["op_norm"] = spec.rho_max * spec.corr.spectral_sup();
  s["square_integrable"] = spec.corr.square_integrable();
  double mean_count = 0.0;
  if (spec.intensity.homogeneous) {
    mean_count = spec.intensity.rho * w.volume();
  } else {
    mean_count =
        integrate_box([&](const double* x) { return spec.rho_at(x); }, w, 1e-6, 16, 8).value;
  }
  s["mean_count"] = mean_count;
  s["count_variance"] = count_variance(spec, w);
  if (cfg.contains("void_box")) {
    const Window vb = parse_window(cfg.at("void_box"), "void_box");
    const int nodes = static_cast<int>(int_or(cfg, "nodes_per_axis", 6, "config"));
    s["void_box"] = window_echo(vb);
    s["void_probability"] = void_probability(spec, {vb}, nodes);
    json em = json::array();
    for (int n = 1; n <= 3; ++n) em.push_back(exp_moment_bound(spec, vb, n));
    s["exp_moment_bounds"] = em;
  }
  art.write_json("summary.json", s);
  art.finish();
}

void cmd_mixing(const json& cfg, const fs::path& out, std::optional<std::uint64_t> seed_cli) {
  check_keys(cfg,
             {"kernel", "p_volume", "q_volume", "r_values", "box_a", "box_b", "nodes_per_axis",
              "covariance_check", "master_seed"},
             "config");
  // Bounds are driven by the stationary kernel; build it on a reference box.
  const json& jk = require_key(cfg, "kernel", "config");
  const long dim = int_or(jk, "dim", 2, "kernel");
  json jk2 = jk;
  jk2.erase("dim");
  json cfg2;
  cfg2["kernel"] = jk2;
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim), hi = Eigen::VectorXd::Ones(dim);
  const KernelSpec spec = parse_kernel(cfg2, Window(lo, hi), false);

  const double p = num_at(cfg, "p_volume", "config");
  const double q = num_at(cfg, "q_volume", "config");
  const std::vector<double> rv = vec_at(cfg, "r_values", "config");
  for (std::size_t i = 0; i < rv.size(); ++i)
    if (!(rv[i] > 0.0) || (i > 0 && rv[i] <= rv[i - 1]))
      throw ValidationError("config: r_values must be positive and increasing");

  ArtifactDir art(out, "mixing-bounds", cfg,
                  seed_cli ? seed_cli
                           : (cfg.contains("master_seed")
                                  ? std::optional<std::uint64_t>(seed_at(cfg, "config"))
                                  : std::nullopt));
  {
    std::ofstream f = art.open("curves.csv");
    f << "r,alpha_upper_pq,alpha_upper_p_inf\n";
    for (double r : rv)
      f << fmt17(r) << ',' << fmt17(alpha_upper_pq(spec, p, q, r)) << ','
        << fmt17(alpha_upper_p_inf(spec, p, r)) << '\n';
  }

  json s;
  s["kernel"] = kernel_echo(spec);
  s["p_volume"] = p;
  s["q_volume"] = q;

  if (cfg.contains("box_a") != cfg.contains("box_b"))
    throw ValidationError("config: box_a and box_b must be given together");
  if (cfg.contains("box_a")) {
    const Window a = parse_window(cfg.at("box_a"), "box_a");
    const Window b = parse_window(cfg.at("box_b"), "box_b");
    const double dist = box_distance(a, b);
    if (!(dist > 0.0)) throw ValidationError("config: box_a and box_b must be disjoint");
    const int nodes = static_cast<int>(int_or(cfg, "nodes_per_axis", 6, "config"));
    const AlphaSandwich sw = alpha_sandwich(spec, a, b);
    const VoidAlphaEstimate va = void_alpha(spec, a, b, nodes);
    s["box_a"] = window_echo(a);
    s["box_b"] = window_echo(b);
    s["box_distance"] = dist;
    s["sandwich"] = {{"lower", sw.lower},
                     {"upper", sw.upper},
                     {"prefactor", sw.prefactor},
                     {"op_norm", sw.op_norm},
                     {"op_norm_is_analytic", sw.op_norm_is_analytic}};
    s["void_alpha"] = {{"p_a", va.p_a}, {"p_b", va.p_b}, {"p_ab", va.p_ab}, {"alpha", va.alpha}};
    const double upper_at_dist = alpha_upper_pq(spec, a.volume(), b.volume(), dist);
    s["alpha_upper_at_distance"] = upper_at_dist;
    s["void_within_upper"] = va.alpha <= upper_at_dist + 1e-12;
  }

  if (cfg.contains("covariance_check")) {
    const json& jc = cfg.at("covariance_check");
    check_keys(jc,
               {"sim_window", "box_a", "box_b", "scale_a", "cap_a", "scale_b", "cap_b",
                "replicates"},
               "covariance_check");
    const std::uint64_t seed = seed_cli ? *seed_cli : seed_at(cfg, "config");
    const Window sw = parse_window(require_key(jc, "sim_window", "covariance_check"),
                                   "covariance_check.sim_window");
    const Window a = parse_window(require_key(jc, "box_a", "covariance_check"),
                                  "covariance_check.box_a");
    const Window b = parse_window(require_key(jc, "box_b", "covariance_check"),
                                  "covariance_check.box_b");
    const CovIneqReport rep = covariance_inequality_check(
        spec, sw, a, b, num_or(jc, "scale_a", 1.0, "covariance_check"),
        static_cast<int>(int_or(jc, "cap_a", 1000000, "covariance_check")),
        num_or(jc, "scale_b", 1.0, "covariance_check"),
        static_cast<int>(int_or(jc, "cap_b", 1000000, "covariance_check")),
        static_cast<int>(int_or(jc, "replicates", 2000, "covariance_check")), seed);
    s["covariance_check"] = {{"cov_fg", rep.cov_fg},       {"cov_fg_se", rep.cov_fg_se},
                             {"bound", rep.bound},         {"count_cov", rep.count_cov},
                             {"holds", rep.holds}};
  }

  art.write_json("summary.json", s);
  art.finish();
}

void cmd_clt(const json& cfg, const fs::path& out, std::optional<std::uint64_t> seed_cli) {
  check_keys(cfg, {"kernel", "intensity", "windows", "replicates", "statistic", "master_seed"},
             "config");
  const json& jw = require_key(cfg, "windows", "config");
  if (!jw.is_array() || jw.size() < 2)
    throw ValidationError("config: windows must be an array of >= 2 windows");
  std::vector<Window> windows;
  for (const auto& e : jw) windows.push_back(parse_window(e, "windows[]"));
  const KernelSpec spec = parse_kernel(cfg, windows.back(), true);
  const std::vector<double> repv = vec_at(cfg, "replicates", "config");
  if (repv.size() != windows.size())
    throw ValidationError("config: replicates must match the number of windows");
  std::vector<int> reps;
  for (double r : repv) reps.push_back(static_cast<int>(r));
  const LocalStatistic stat = parse_statistic(cfg);
  const std::uint64_t seed = seed_cli ? *seed_cli : seed_at(cfg, "config");

  const CltConditionsReport cond = check_clt_conditions(spec, stat, windows);
  const CltRunResult run = run_clt(spec, stat, windows, reps, seed);

  ArtifactDir art(out, "clt", cfg, seed);
  {
    std::ofstream f = art.open("clt_values.csv");
    f << "window_index,volume,replicate,value,standardized\n";
    for (std::size_t wi = 0; wi < run.windows.size(); ++wi) {
      const CltWindowStats& ws = run.windows[wi];
      for (std::size_t r = 0; r < ws.values.size(); ++r)
        f << wi << ',' << fmt17(ws.window.volume()) << ',' << r << ',' << fmt17(ws.values[r])
          << ',' << fmt17(ws.standardized[r]) << '\n';
    }
  }

  json s;
  s["kernel"] = kernel_echo(spec);
  s["statistic"] = {{"name", stat.name}, {"tau", stat.tau}, {"p_max", stat.p_max}};
  s["conditions"] = {{"h1_ratios", cond.h1_ratios},
                     {"h1_ok", cond.h1_ok},
                     {"h2_slope", cond.h2_slope},
                     {"h2_threshold", cond.h2_threshold},
                     {"h2_ok", cond.h2_ok},
                     {"h3_op_norm", cond.h3_op_norm},
                     {"h3_mass", cond.h3_mass},
                     {"h3_mass_kind", cond.h3_mass_kind},
                     {"h3_value", cond.h3_value},
                     {"h3_ok", cond.h3_ok},
                     {"all_ok", cond.all_ok}};
  json jws = json::array();
  for (const CltWindowStats& ws : run.windows) {
    json e = moments_echo(ws.moments);
    e["volume"] = ws.window.volume();
    e["replicates"] = ws.replicates;
    e["ks_normal"] = ws.ks_normal;
    e["var_ratio"] = ws.moments.variance / ws.window.volume();
    jws.push_back(e);
  }
  s["windows"] = jws;
  s["var_ratio_trend"] = {{"slope", run.var_ratio_trend.slope},
                          {"se", run.var_ratio_trend.se},
                          {"intercept", run.var_ratio_trend.intercept}};
  art.write_json("summary.json", s);
  art.finish();
}

void cmd_estimate(const json& cfg, const fs::path& out, std::optional<std::uint64_t> seed_cli) {
  check_keys(cfg, {"window", "covariate", "model", "fit", "pattern_csv", "simulate_from"},
             "config");
  const Window w = parse_window(require_key(cfg, "window", "config"), "window");
  const NamedCovariate cov =
      parse_covariate(cfg.contains("covariate") ? str_at(cfg, "covariate", "config")
                                                : std::string("intercept"),
                      w);

  const json& jm = require_key(cfg, "model", "config");
  check_keys(jm, {"family", "psi_lo", "psi_hi"}, "model");
  const Family family = parse_family(str_at(jm, "family", "model"), "model");
  const std::vector<double> plo = vec_at(jm, "psi_lo", "model");
  const std::vector<double> phi = vec_at(jm, "psi_hi", "model");

  TwoStepOptions opt;
  if (cfg.contains("fit")) {
    const json& jf = cfg.at("fit");
    check_keys(jf, {"r_lower", "r_upper", "t_nodes", "quad_nodes", "contrast_exponent", "beta0"},
               "fit");
    opt.r_lower = num_or(jf, "r_lower", opt.r_lower, "fit");
    opt.r_upper = num_or(jf, "r_upper", opt.r_upper, "fit");
    opt.t_nodes = static_cast<int>(int_or(jf, "t_nodes", opt.t_nodes, "fit"));
    opt.quad_nodes = static_cast<int>(int_or(jf, "quad_nodes", opt.quad_nodes, "fit"));
    opt.contrast_exponent = num_or(jf, "contrast_exponent", opt.contrast_exponent, "fit");
    if (jf.contains("beta0")) {
      const std::vector<double> b0 = vec_at(jf, "beta0", "fit");
      opt.beta0.resize(static_cast<Eigen::Index>(b0.size()));
      for (std::size_t k = 0; k < b0.size(); ++k)
        opt.beta0[static_cast<Eigen::Index>(k)] = b0[k];
    }
  }
  opt.psi_lo.resize(static_cast<Eigen::Index>(plo.size()));
  for (std::size_t k = 0; k < plo.size(); ++k) opt.psi_lo[static_cast<Eigen::Index>(k)] = plo[k];
  opt.psi_hi.resize(static_cast<Eigen::Index>(phi.size()));
  for (std::size_t k = 0; k < phi.size(); ++k) opt.psi_hi[static_cast<Eigen::Index>(k)] = phi[k];

  if (cfg.contains("pattern_csv") == cfg.contains("simulate_from"))
    throw ValidationError("config: give exactly one of pattern_csv or simulate_from");

  std::optional<std::uint64_t> seed_used;
  PointPattern pat;
  json input_echo;
  if (cfg.contains("pattern_csv")) {
    const std::string path = str_at(cfg, "pattern_csv", "config");
    pat = read_pattern_csv(path, w);
    input_echo["pattern_csv"] = path;
  } else {
    const json& js = cfg.at("simulate_from");
    check_keys(js, {"kernel", "intensity", "master_seed"}, "simulate_from");
    const KernelSpec spec = parse_kernel(js, w, true);
    const std::uint64_t seed = seed_cli ? *seed_cli : seed_at(js, "simulate_from");
    seed_used = seed;
    RngStream rng(seed, 0);
    pat = DppSampler(spec, w).sample(rng);
    input_echo["simulate_from"] = kernel_echo(spec);
  }

  const TwoStepFit fit = two_step_fit(pat, w, cov.map, family, opt);

  ArtifactDir art(out, "estimate", cfg, seed_used);
  {
    std::ofstream f = art.open("curves.csv");
    f << "t,k_hat,k_fitted\n";
    for (std::size_t i = 0; i < fit.khat.t.size(); ++i)
      f << fmt17(fit.khat.t[i]) << ',' << fmt17(fit.khat.k[i]) << ',' << fmt17(fit.k_fitted[i])
        << '\n';
  }
  json s;
  s["input"] = input_echo;
  s["window"] = window_echo(w);
  s["covariate"] = cov.name;
  s["n_points"] = pat.size();
  s["beta"] = {{"estimate", std::vector<double>(fit.beta.beta.data(),
                                                fit.beta.beta.data() + fit.beta.beta.size())},
               {"iterations", fit.beta.iterations},
               {"converged", fit.beta.converged},
               {"score_norm", fit.beta.score_norm}};
  s["correlation"] = {
      {"family", family_name(family)},
      {"psi", std::vector<double>(fit.corr.psi.data(), fit.corr.psi.data() + fit.corr.psi.size())},
      {"contrast", fit.corr.contrast},
      {"converged", fit.corr.converged},
      {"at_boundary", fit.corr.at_boundary},
      {"evaluations", fit.corr.evaluations}};
  art.write_json("summary.json", s);
  art.finish();
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("dppmix");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"determinantal point processes: simulation, mixing bounds, CLT checks, fitting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (default .)");
    sub->add_option("--seed", seed, "override master_seed");
    sub->add_option("--threads", threads, "worker threads (linear algebra)");
  };
  CLI::App* c_sim = app.add_subcommand("simulate", "draw point patterns and write them as CSV");
  CLI::App* c_props =
      app.add_subcommand("props", "kernel and first/second moment properties (deterministic)");
  CLI::App* c_mix = app.add_subcommand("mixing-bounds", "distance-decay dependence bounds");
  CLI::App* c_clt = app.add_subcommand("clt", "normality of local statistics on growing windows");
  CLI::App* c_est = app.add_subcommand("estimate", "two-step intensity + correlation fit");
  for (CLI::App* s : {c_sim, c_props, c_mix, c_clt, c_est}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Validation);
  }

  try {
    Eigen::setNbThreads(std::max(1, threads));
    const json cfg = load_config(config_path);
    const fs::path out(out_dir);
    if (c_sim->parsed()) cmd_simulate(cfg, out, seed);
    if (c_props->parsed()) cmd_props(cfg, out);
    if (c_mix->parsed()) cmd_mixing(cfg, out, seed);
    if (c_clt->parsed()) cmd_clt(cfg, out, seed);
    if (c_est->parsed()) cmd_estimate(cfg, out, seed);
    return static_cast<int>(ExitCode::Ok);
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "error: out of memory\n");
    return static_cast<int>(ExitCode::Resource);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(exit_code_for(e));
  }
}

}  // namespace dppmix::cli
