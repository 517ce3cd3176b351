#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "metapotts/phase.hpp"
#include "metapotts/rgraph.hpp"
#include "metapotts/rng.hpp"
#include "metapotts/types.hpp"

namespace metapotts {

struct ChainState {
  Configuration sigma;
  std::vector<int> counts;
  long long hamiltonian = 0;
  long long step = 0;

  static ChainState from(const MultiGraph& g, Configuration sigma, int q);
  // Recomputes counts and the Hamiltonian and compares.
  bool consistent(const MultiGraph& g, int q) const;
};

/// Heat-bath single-site dynamics.
class Glauber {
 public:
  Glauber(const MultiGraph& g, const PottsParams& p);

  // Resamples one uniformly chosen vertex; returns it.
  int step(ChainState& state, Rng& rng);
  // Resamples vertex v from its conditional law.
  void update(ChainState& state, int v, Rng& rng);

 private:
  const MultiGraph* g_;
  PottsParams p_;
  std::vector<double> boltzmann_;  // e^{beta k}, k = 0..max degree
  std::vector<int> same_;
  std::vector<double> weights_;
};

/// Swendsen-Wang: keep each monochromatic edge with probability 1 - e^{-beta},
/// then give every component of the kept edges a uniform colour.
class SwendsenWang {
 public:
  SwendsenWang(const MultiGraph& g, const PottsParams& p);

  void step(ChainState& state, Rng& rng);

  // Percolation half of a step. Draws one uniform per monochromatic edge in
  // canonical order (self-loops included) and returns the kept edges.
  const EdgeMask& percolate(std::span<const Colour> sigma, Rng& rng);
  long long kept_edges() const { return kept_count_; }

 private:
  const MultiGraph* g_;
  PottsParams p_;
  double keep_;
  EdgeMask kept_;
  long long kept_count_ = 0;
  UnionFind uf_;
  std::vector<int> colour_of_root_;
};

enum class ChainKind { glauber, sw };

const char* to_string(ChainKind kind);

struct TraceRecord {
  long long step = 0;
  std::vector<int> counts;
  long long hamiltonian = 0;
  bool member = false;
  bool escaped = false;
};

/// Chain history sampled every `stride` steps, plus the exit step from the
/// monitored set. Glauber steps are single-site updates.
struct Trace {
  std::vector<TraceRecord> records;
  std::optional<long long> escape_step;
};

// CSV with header step,count_1..count_q,hamiltonian,member,escape; escape is 1
// from the first step outside the monitored set onwards.
void write_trace_csv(std::ostream& out, const Trace& trace, int q);

struct EscapeConfig {
  PottsParams params;
  // Temperature whose fixed point provides the planted statistics; NaN means
  // params.beta.
  double plant_beta = std::numeric_limits<double>::quiet_NaN();
  int n = 1000;
  PhaseKind start = PhaseKind::para;
  double start_eps = 0.02;
  double monitor_eps = 0.05;
  bool monitor_permutations = true;  // ferro only
  ChainKind chain = ChainKind::glauber;
  long long sweeps = 10000;
  int trials = 20;
  std::uint64_t seed = 1;
  int workers = 1;
  bool stop_on_escape = true;
  // Trace stride in sweeps (Glauber) or iterations (SW); 0 disables traces.
  long long trace_stride = 0;
};

struct TrialOutcome {
  int trial = 0;
  bool started_inside = false;
  std::optional<long long> escape_step;  // in steps; sweeps for SW
  double max_deviation = 0.0;            // largest l1 deviation / n seen
  Trace trace;
};

struct EscapeReport {
  EscapeConfig config;
  PhaseSpec start;
  PhaseSpec monitor;
  IntegerStatistics planted;
  std::vector<TrialOutcome> trials;

  int escaped() const;
};

// Throws std::invalid_argument on invalid configurations (including a ferro
// start at a plant temperature without a ferromagnetic fixed point).
void validate(const EscapeConfig& config);

// Each trial plants (G, sigma) from the start phase's fixed-point statistics
// and runs the chain for `sweeps` sweeps (n Glauber steps each) or SW
// iterations, checking monitor membership after every step.
EscapeReport escape_experiment(const EscapeConfig& config);

}  // namespace metapotts
