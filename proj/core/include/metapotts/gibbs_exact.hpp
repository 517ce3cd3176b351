#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "metapotts/phase.hpp"
#include "metapotts/rgraph.hpp"
#include "metapotts/types.hpp"

namespace metapotts {

// Number of monochromatic edges counted with multiplicity; a self-loop counts
// once.
long long hamiltonian(const MultiGraph& g, std::span<const Colour> sigma);

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 24;

/// All q^n configurations of a small graph with their Boltzmann weights.
///
/// State index i encodes sigma with vertex 0 as the fastest digit:
/// i = sum_v sigma_v q^v. Weights are kept as log-weights beta * H.
class ExactContext {
 public:
  ExactContext(MultiGraph g, PottsParams p, std::uint64_t state_cap = kDefaultStateCap);

  const MultiGraph& graph() const { return g_; }
  const PottsParams& params() const { return p_; }
  std::size_t num_states() const { return energy_.size(); }

  void decode(std::size_t index, Configuration& sigma) const;
  std::size_t encode(std::span<const Colour> sigma) const;
  std::vector<int> counts(std::size_t index) const;

  long long energy(std::size_t index) const { return energy_[index]; }
  double log_weight(std::size_t index) const { return p_.beta * static_cast<double>(energy_[index]); }

  // log Z over all states.
  double log_z() const { return log_z_; }
  // Boltzmann probabilities of all states.
  const std::vector<double>& probabilities() const { return prob_; }

 private:
  MultiGraph g_;
  PottsParams p_;
  std::vector<long long> energy_;
  std::vector<double> prob_;
  double log_z_ = 0.0;
};

// Indicator of a phase over the states of ctx.
std::vector<bool> phase_states(const ExactContext& ctx, const PhaseSpec& spec);

// log sum_{sigma in S} e^{beta H(sigma)}; an empty mask means all states.
// Returns -inf for an empty restriction.
double log_partition_function(const ExactContext& ctx, const std::vector<bool>& restriction = {});
double log_partition_function(const ExactContext& ctx, const PhaseSpec& spec);

// Free vertices carry kFree in a partial configuration.
inline constexpr int kFree = -1;
using PartialConfiguration = std::vector<int>;

// Law of sigma_v given the boundary and the restriction. Throws if the
// conditioning event has zero mass.
ColourDistribution marginal(const ExactContext& ctx, int v, const PartialConfiguration& boundary,
                            const std::vector<bool>& restriction = {});

/// Row-compressed transition matrix over states.
struct SparseKernel {
  std::vector<std::size_t> row_start;  // num_states + 1
  std::vector<std::uint32_t> column;
  std::vector<double> value;

  std::size_t num_states() const { return row_start.size() - 1; }
  // x P for a row vector x.
  std::vector<double> left_multiply(std::span<const double> x) const;
};

// Glauber heat-bath kernel: pick a uniform vertex and resample it from its
// conditional law. Columns in each row are sorted.
SparseKernel glauber_kernel(const ExactContext& ctx);

// Phi(S) = sum_{sigma in S, tau not in S} mu(sigma) P(sigma, tau) / mu(S).
double bottleneck(const ExactContext& ctx, const SparseKernel& kernel, const std::vector<bool>& set);

// || mu_S P^t - mu_S ||_TV for t = 0..t_max, where mu_S = mu( . | S).
std::vector<double> tv_evolution(const ExactContext& ctx, const SparseKernel& kernel,
                                 const std::vector<bool>& set, int t_max);

struct NishimoriResult {
  double tv = 0.0;
  std::size_t pairings = 0;
  std::size_t configurations = 0;
};

// Exact total variation between the two joint laws of (pairing, sigma):
//   (i)  pairing drawn proportionally to Z_S, then sigma ~ mu(. | S);
//   (ii) sigma drawn proportionally to 1{sigma in S} E[e^{beta H}], then the
//        pairing from the graph law tilted by e^{beta H(sigma)}.
// Enumerates all (nd-1)!! pairings; refuses n*d > max_half_edges.
NishimoriResult nishimori_check(int n, int d, const PottsParams& p, const PhaseSpec& phase,
                                int max_half_edges = 16);

}  // namespace metapotts
