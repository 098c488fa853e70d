// SPDX-License-Identifier: MIT
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dppmix/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("dppmix_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_json(const TempDir& dir, const std::string& name, const json& j) {
  const std::string p = dir.file(name);
  std::ofstream out(p);
  out << j.dump(2);
  return p;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json simulate_config() {
  return json{{"kernel", {{"family", "gaussian"}, {"alpha", 1.0}, {"rho", 0.25}}},
              {"window", {{"lower", {0.0, 0.0}}, {"upper", {8.0, 8.0}}}},
              {"master_seed", 42},
              {"n_patterns", 2}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes patterns, metadata, and a manifest") {
  TempDir dir("sim");
  const std::string cfg = write_json(dir, "sim.json", simulate_config());
  const std::string out = dir.file("out");
  REQUIRE(dppmix::cli::run({"simulate", "--config", cfg, "--out", out}) == 0);
  for (const char* f : {"pattern_0.csv", "pattern_0.meta.json", "pattern_1.csv", "summary.json",
                        "manifest.json"})
    CHECK(fs::exists(fs::path(out) / f));
  const json summary = json::parse(slurp(out + "/summary.json"));
  CHECK(summary.at("n_patterns").get<int>() == 2);
  CHECK(summary.at("kernel").at("family").get<std::string>() == "gaussian");
  const json manifest = json::parse(slurp(out + "/manifest.json"));
  CHECK(manifest.at("master_seed").get<std::uint64_t>() == 42);
  bool lists_pattern = false;
  for (const auto& o : manifest.at("outputs"))
    if (o.get<std::string>() == "pattern_0.csv") lists_pattern = true;
  CHECK(lists_pattern);
  // the header names one column per axis
  CHECK(slurp(out + "/pattern_0.csv").substr(0, 5) == "x1,x2");

  // reruns are byte-identical; a different seed is not
  const std::string out2 = dir.file("out2"), out3 = dir.file("out3");
  REQUIRE(dppmix::cli::run({"simulate", "--config", cfg, "--out", out2}) == 0);
  CHECK(slurp(out + "/pattern_0.csv") == slurp(out2 + "/pattern_0.csv"));
  REQUIRE(dppmix::cli::run({"simulate", "--config", cfg, "--out", out3, "--seed", "43"}) == 0);
  CHECK(slurp(out + "/pattern_0.csv") != slurp(out3 + "/pattern_0.csv"));
}

TEST_CASE("config validation failures exit with code 2") {
  TempDir dir("bad");
  json bad_key = simulate_config();
  bad_key["typo_key"] = 1;
  CHECK(dppmix::cli::run({"simulate", "--config", write_json(dir, "a.json", bad_key),
                          "--out", dir.file("o1")}) == 2);

  json supercritical = simulate_config();
  supercritical["kernel"]["rho"] = 0.5;  // above the existence threshold
  CHECK(dppmix::cli::run({"simulate", "--config", write_json(dir, "b.json", supercritical),
                          "--out", dir.file("o2")}) == 2);

  json no_seed = simulate_config();
  no_seed.erase("master_seed");
  CHECK(dppmix::cli::run({"simulate", "--config", write_json(dir, "c.json", no_seed),
                          "--out", dir.file("o3")}) == 2);

  const std::string garbled = dir.file("garbled.json");
  {
    std::ofstream out(garbled);
    out << "{ not json";
  }
  CHECK(dppmix::cli::run({"simulate", "--config", garbled, "--out", dir.file("o4")}) == 2);
  CHECK(dppmix::cli::run({"simulate", "--config", dir.file("missing.json"),
                          "--out", dir.file("o5")}) == 2);
  CHECK(dppmix::cli::run({"frobnicate", "--config", garbled}) == 2);
  CHECK(dppmix::cli::run({"--help"}) == 0);
}

TEST_CASE("props reports existence diagnostics for a projection kernel") {
  TempDir dir("props");
  const json cfg = {{"kernel", {{"family", "bessel"}, {"rho", 0.3}}},
                    {"window", {{"lower", {0.0, 0.0}}, {"upper", {6.0, 6.0}}}},
                    {"void_box", {{"lower", {1.0, 1.0}}, {"upper", {2.0, 2.0}}}},
                    {"nodes_per_axis", 6}};
  const std::string out = dir.file("out");
  REQUIRE(dppmix::cli::run({"props", "--config", write_json(dir, "p.json", cfg),
                            "--out", out}) == 0);
  const json summary = json::parse(slurp(out + "/summary.json"));
  CHECK(std::abs(summary.at("existence_margin").get<double>()) < 1e-9);
  CHECK(summary.at("op_norm").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(summary.at("mean_count").get<double>() == doctest::Approx(0.3 * 36.0).epsilon(1e-9));
  CHECK(summary.at("void_probability").get<double>() > 0.0);
  CHECK(fs::exists(fs::path(out) / "correlation_curve.csv"));
  CHECK(fs::exists(fs::path(out) / "spectral_curve.csv"));
}

TEST_CASE("estimate consumes a simulated pattern end to end") {
  TempDir dir("est");
  const std::string sim_out = dir.file("sim");
  json sim = simulate_config();
  sim["window"]["upper"] = {14.0, 14.0};
  sim["n_patterns"] = 1;
  REQUIRE(dppmix::cli::run({"simulate", "--config", write_json(dir, "s.json", sim),
                            "--out", sim_out}) == 0);
  const json est = {{"pattern_csv", sim_out + "/pattern_0.csv"},
                    {"window", {{"lower", {0.0, 0.0}}, {"upper", {14.0, 14.0}}}},
                    {"model", {{"family", "gaussian"}, {"psi_lo", {0.2}}, {"psi_hi", {2.5}}}},
                    {"fit", {{"r_upper", 2.0}}}};
  const std::string out = dir.file("out");
  REQUIRE(dppmix::cli::run({"estimate", "--config", write_json(dir, "e.json", est),
                            "--out", out}) == 0);
  const json summary = json::parse(slurp(out + "/summary.json"));
  CHECK(summary.at("beta").at("converged").get<bool>());
  const double rho_hat = std::exp(summary.at("beta").at("estimate")[0].get<double>());
  CHECK(rho_hat > 0.05);
  CHECK(rho_hat < 0.6);
  CHECK(summary.at("correlation").at("psi")[0].get<double>() > 0.2);
  CHECK(fs::exists(fs::path(out) / "curves.csv"));

  // malformed patterns are rejected: wrong header, then out-of-window point
  {
    std::ofstream f(dir.file("badhdr.csv"));
    f << "a,b\n1.0,1.0\n2.0,2.0\n";
  }
  json est_bad = est;
  est_bad["pattern_csv"] = dir.file("badhdr.csv");
  CHECK(dppmix::cli::run({"estimate", "--config", write_json(dir, "eb.json", est_bad),
                          "--out", dir.file("ob1")}) == 2);
  {
    std::ofstream f(dir.file("outside.csv"));
    f << "x1,x2\n1.0,1.0\n15.0,1.0\n";
  }
  est_bad["pattern_csv"] = dir.file("outside.csv");
  CHECK(dppmix::cli::run({"estimate", "--config", write_json(dir, "eo.json", est_bad),
                          "--out", dir.file("ob2")}) == 2);
}

TEST_CASE("clt run validates its shape and writes per-replicate values") {
  TempDir dir("clt");
  json cfg = {{"kernel", {{"family", "gaussian"}, {"alpha", 1.0}, {"rho", 0.2}}},
              {"windows",
               {{{"lower", {0.0, 0.0}}, {"upper", {6.0, 6.0}}},
                {{"lower", {0.0, 0.0}}, {"upper", {9.0, 9.0}}}}},
              {"replicates", {16, 12}},
              {"statistic", {{"name", "count"}}},
              {"master_seed", 5}};
  const std::string out = dir.file("out");
  REQUIRE(dppmix::cli::run({"clt", "--config", write_json(dir, "c.json", cfg),
                            "--out", out}) == 0);
  const json summary = json::parse(slurp(out + "/summary.json"));
  CHECK(summary.at("windows").size() == 2);
  CHECK(summary.at("conditions").contains("all_ok"));
  const std::string values = slurp(out + "/clt_values.csv");
  CHECK(values.find("window_index") == 0);
  // 28 data rows plus header
  CHECK(std::count(values.begin(), values.end(), '\n') == 29);

  cfg["replicates"] = {16};
  CHECK(dppmix::cli::run({"clt", "--config", write_json(dir, "c2.json", cfg),
                          "--out", dir.file("o2")}) == 2);
}

}  // TEST_SUITE
