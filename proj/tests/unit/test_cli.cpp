#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"

using json = nlohmann::ordered_json;

namespace {

struct Result {
  int status = 0;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "metapotts");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int status = metapotts::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("metapotts_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

bool has_violation(const Result& r, const std::string& text) {
  const json e = json::parse(r.err);
  for (const auto& v : e["violations"]) {
    if (v.get<std::string>().find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("thresholds report") {
  const Result r = call({"thresholds", "--q", "3", "--d", "3"});
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"beta_u", "beta_c", "beta_h", "manifest"});
  CHECK(j["beta_u"].get<double>() == doctest::Approx(std::log(1.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(j["beta_c"].get<double>() == doctest::Approx(-std::log(std::cbrt(2.0) - 1.0)).epsilon(1e-12));
  CHECK(j["beta_h"].get<double>() == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(j["manifest"]["tool"] == "metapotts");
  CHECK(j["manifest"]["version"] == metapotts::cli::kVersion);
  CHECK(j["manifest"]["config"]["q"] == 3);
}

TEST_CASE("validation violations are reported together as JSON") {
  Result r = call({"thresholds", "--q", "2"});
  CHECK(r.status == 2);
  CHECK(r.out.empty());
  CHECK(has_violation(r, "q must be >= 3"));

  r = call({"simulate", "--d", "3", "--n", "5", "--eps", "0.05", "--monitor-eps", "0.05"});
  CHECK(r.status == 2);
  CHECK(has_violation(r, "d*n must be even"));
  CHECK(has_violation(r, "monitor eps must exceed start eps"));

  r = call({"simulate", "--phase", "ferro", "--beta", "0.3"});
  CHECK(has_violation(r, "ferro phase needs beta > beta_u"));
  CHECK(call({"simulate", "--phase", "ferro", "--beta", "0.3", "--plant-beta", "1.5", "--n", "30", "--sweeps",
              "2", "--trials", "1"})
            .status == 0);

  r = call({"percolate", "--mode", "exact", "--n", "10", "--m", "16"});
  CHECK(has_violation(r, "m must lie in"));
  r = call({"nishimori", "--n", "6"});
  CHECK(has_violation(r, "half-edges"));
  r = call({"exact", "--graph", "/nonexistent/graph.txt"});
  CHECK(has_violation(r, "cannot open graph file"));

  r = call({"thresholds", "--bogus"});
  CHECK(r.status == 2);
  CHECK(json::parse(r.err)["error"] == "usage");
  CHECK(call({}).status == 2);
}

TEST_CASE("pure validate") {
  metapotts::cli::Settings s;
  s.command = "simulate";
  CHECK(metapotts::cli::validate(s).empty());
  s.q = 2;
  s.n = 5;
  s.monitor_eps = s.eps;
  CHECK(metapotts::cli::validate(s).size() == 3);
}

TEST_CASE("config file fills options, flags win") {
  const auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "# comment\nq = 4\nd=5\nbeta=1.0\n";
  Result r = call({"fixed-points", "--config", cfg.string(), "--d", "3"});
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["manifest"]["config"]["q"] == 4);
  CHECK(j["manifest"]["config"]["d"] == 3);
  CHECK(j["fixed_points"][0]["mu"].size() == 4);

  std::ofstream(cfg) << "depth=4\n";
  r = call({"thresholds", "--config", cfg.string()});
  CHECK(r.status == 2);
  CHECK(has_violation(r, "unknown config key 'depth'"));
  std::ofstream(cfg) << "q=three\n";
  CHECK(call({"thresholds", "--config", cfg.string()}).status == 2);
  CHECK(call({"thresholds", "--config", (dir / "missing").string()}).status == 2);
}

TEST_CASE("outputs do not depend on the worker count") {
  const std::vector<std::vector<std::string>> commands{
      {"simulate", "--n", "100", "--sweeps", "20", "--trials", "5", "--seed", "9", "--chain", "sw"},
      {"simulate", "--n", "100", "--sweeps", "20", "--trials", "5", "--seed", "9"},
      {"percolate", "--n", "2000", "--p", "0.7", "--trials", "5", "--seed", "3"},
      {"broadcast", "--depth", "5", "--samples", "300", "--seed", "4"}};
  for (const auto& base : commands) {
    std::string first;
    for (const char* w : {"1", "4", "16"}) {
      auto args = base;
      args.insert(args.end(), {"--workers", w});
      const Result r = call(args);
      REQUIRE(r.status == 0);
      if (first.empty()) first = r.out;
      CHECK(r.out == first);
    }
  }
}

TEST_CASE("csv reports") {
  const Result p = call({"percolate", "--n", "100", "--p", "0.6", "--trials", "2"});
  REQUIRE(p.status == 0);
  CHECK(p.out.rfind("trial,c1,edges_c1,sum_sq_rest\n0,", 0) == 0);
  const Result b = call({"broadcast", "--depth", "2", "--samples", "100"});
  REQUIRE(b.status == 0);
  std::istringstream lines(b.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "depth,distance,stderr");
  std::getline(lines, line);
  // 17 significant digits.
  const std::string value = line.substr(2, line.find(',', 2) - 2);
  CHECK(value.find('.') != std::string::npos);
  CHECK(std::abs(std::stod(value) - 4.0 / 3.0) < 1e-12);
}

TEST_CASE("output directory gets a manifest next to the data") {
  const auto dir = scratch("out");
  Result r = call({"percolate", "--n", "100", "--p", "0.6", "--trials", "2", "--output", dir.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  CHECK(std::filesystem::exists(dir / "percolation.csv"));
  std::ifstream in(dir / "manifest.json");
  const json m = json::parse(in);
  CHECK(m["command"] == "percolate");
  CHECK(m["config"]["p"] == 0.6);

  const auto sim = scratch("sim");
  r = call({"simulate", "--n", "60", "--sweeps", "3", "--trials", "2", "--trace-stride", "1", "--output",
            sim.string()});
  REQUIRE(r.status == 0);
  CHECK(std::filesystem::exists(sim / "report.json"));
  CHECK(std::filesystem::exists(sim / "manifest.json"));
  std::ifstream trace(sim / "trace_1.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header == "step,count_1,count_2,count_3,hamiltonian,member,escape");
}

TEST_CASE("exact subcommand") {
  const std::string k4 = oracle::data_path("k4.txt");
  Result r = call({"exact", "--graph", k4, "--q", "3", "--beta", "2", "--check", "nishimori"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["tv"].get<double>() < 1e-10);

  r = call({"exact", "--graph", oracle::data_path("five_vertex.txt"), "--q", "3", "--beta", "0"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["log_z"].get<double>() == doctest::Approx(5.0 * std::log(3.0)).epsilon(1e-14));

  r = call({"exact", "--graph", k4, "--beta", "2", "--check", "escape-bound", "--phase", "ferro", "--steps", "50"});
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["bound_holds"] == true);
  CHECK(j["tv"].size() == 51);

  r = call({"exact", "--graph", k4, "--q", "3", "--check", "marginals"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["marginals"][2][1].get<double>() == doctest::Approx(1.0 / 3.0));

  r = call({"nishimori", "--n", "2", "--eps", "0.9", "--beta", "0.7"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["tv"].get<double>() < 1e-10);
}

TEST_CASE("identity-check subcommand") {
  const Result r = call({"identity-check", "--beta", "1.38"});
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["giant_identity_residual"].get<double>() < 1e-8);
  for (const auto& f : j["fixed_points"]) {
    CHECK(f["bijection_residual"].get<double>() < 1e-11);
    CHECK(f["second_moment_residual"].get<double>() < 1e-10);
  }
  CHECK(json::parse(call({"identity-check", "--beta", "1.0"}).out)["giant_identity_residual"].is_null());
}
