#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace metapotts::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Parameters of every subcommand; each command reads the subset it needs.
struct Settings {
  std::string command;
  int q = 3;
  int d = 3;
  double beta = 1.0;
  int n = 1000;
  double eps = 0.02;
  double monitor_eps = 0.05;
  long long sweeps = 10000;
  int trials = 20;
  int depth = 12;
  int samples = 10000;
  double p = 0.5;
  long long m = -1;  // exact percolation edge count; -1 = unset
  std::string mode = "binomial";
  std::string chain = "glauber";
  std::string phase = "para";
  std::string fixed_point = "para";
  double plant_beta = std::numeric_limits<double>::quiet_NaN();
  bool permutations = true;
  long long trace_stride = 0;
  std::string graph;
  std::string check = "partition";
  int steps = 200;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output;
};

// Every violated precondition of `s` for s.command, as readable messages.
std::vector<std::string> validate(const Settings& s);

// Parses argv (argv[0] is the program name), runs the subcommand and writes
// its report to `out`. Errors go to `err` as a JSON object. Returns the exit
// status: 0 success, 1 runtime failure, 2 invalid usage or configuration.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metapotts::cli
