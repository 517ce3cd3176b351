#include "metapotts/gibbs_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metapotts {

long long hamiltonian(const MultiGraph& g, std::span<const Colour> sigma) {
  if (sigma.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("configuration length must equal n");
  }
  long long h = 0;
  for (const Edge& e : g.edges()) h += sigma[e.u] == sigma[e.v] ? 1 : 0;
  return h;
}

ExactContext::ExactContext(MultiGraph g, PottsParams p, std::uint64_t state_cap)
    : g_(std::move(g)), p_(p) {
  if (p_.q < 1 || p_.q > kMaxColours) throw std::invalid_argument("q out of range");
  if (!(p_.beta >= 0.0) || !std::isfinite(p_.beta)) {
    throw std::invalid_argument("beta must be finite and nonnegative");
  }
  std::uint64_t states = 1;
  for (int v = 0; v < g_.num_vertices(); ++v) {
    if (states > state_cap / static_cast<std::uint64_t>(p_.q)) {
      throw std::invalid_argument("q^n exceeds the state cap");
    }
    states *= static_cast<std::uint64_t>(p_.q);
  }
  energy_.resize(states);
  Configuration sigma(static_cast<std::size_t>(g_.num_vertices()), 0);
  for (std::size_t i = 0; i < states; ++i) {
    energy_[i] = hamiltonian(g_, sigma);
    // Mixed-radix increment, vertex 0 fastest.
    for (auto& c : sigma) {
      if (++c < p_.q) break;
      c = 0;
    }
  }
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states; ++i) max_log = std::max(max_log, log_weight(i));
  prob_.resize(states);
  double total = 0.0;
  for (std::size_t i = 0; i < states; ++i) {
    prob_[i] = std::exp(log_weight(i) - max_log);
    total += prob_[i];
  }
  for (double& x : prob_) x /= total;
  log_z_ = max_log + std::log(total);
}

void ExactContext::decode(std::size_t index, Configuration& sigma) const {
  sigma.resize(static_cast<std::size_t>(g_.num_vertices()));
  for (auto& c : sigma) {
    c = static_cast<Colour>(index % static_cast<std::size_t>(p_.q));
    index /= static_cast<std::size_t>(p_.q);
  }
}

std::size_t ExactContext::encode(std::span<const Colour> sigma) const {
  std::size_t index = 0;
  for (std::size_t v = sigma.size(); v-- > 0;) index = index * static_cast<std::size_t>(p_.q) + sigma[v];
  return index;
}

std::vector<int> ExactContext::counts(std::size_t index) const {
  std::vector<int> out(static_cast<std::size_t>(p_.q), 0);
  for (int v = 0; v < g_.num_vertices(); ++v) {
    ++out[index % static_cast<std::size_t>(p_.q)];
    index /= static_cast<std::size_t>(p_.q);
  }
  return out;
}

std::vector<bool> phase_states(const ExactContext& ctx, const PhaseSpec& spec) {
  if (spec.q() != ctx.params().q) throw std::invalid_argument("phase has the wrong q");
  std::vector<bool> in(ctx.num_states());
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = phase_membership(ctx.counts(i), spec).member;
  return in;
}

namespace {

void check_mask(const ExactContext& ctx, const std::vector<bool>& mask) {
  if (!mask.empty() && mask.size() != ctx.num_states()) {
    throw std::invalid_argument("state mask has the wrong size");
  }
}

}  // namespace

double log_partition_function(const ExactContext& ctx, const std::vector<bool>& restriction) {
  check_mask(ctx, restriction);
  if (restriction.empty()) return ctx.log_z();
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ctx.num_states(); ++i) {
    if (restriction[i]) max_log = std::max(max_log, ctx.log_weight(i));
  }
  if (!std::isfinite(max_log)) return max_log;
  double total = 0.0;
  for (std::size_t i = 0; i < ctx.num_states(); ++i) {
    if (restriction[i]) total += std::exp(ctx.log_weight(i) - max_log);
  }
  return max_log + std::log(total);
}

double log_partition_function(const ExactContext& ctx, const PhaseSpec& spec) {
  return log_partition_function(ctx, phase_states(ctx, spec));
}

ColourDistribution marginal(const ExactContext& ctx, int v, const PartialConfiguration& boundary,
                            const std::vector<bool>& restriction) {
  const MultiGraph& g = ctx.graph();
  const int q = ctx.params().q;
  if (v < 0 || v >= g.num_vertices()) throw std::invalid_argument("vertex out of range");
  if (boundary.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("boundary must have one entry per vertex");
  }
  for (int c : boundary) {
    if (c != kFree && (c < 0 || c >= q)) throw std::invalid_argument("boundary colour out of range");
  }
  check_mask(ctx, restriction);
  std::vector<double> weights(static_cast<std::size_t>(q), 0.0);
  Configuration sigma;
  const auto& prob = ctx.probabilities();
  for (std::size_t i = 0; i < ctx.num_states(); ++i) {
    if (!restriction.empty() && !restriction[i]) continue;
    ctx.decode(i, sigma);
    bool agrees = true;
    for (int u = 0; u < g.num_vertices() && agrees; ++u) {
      agrees = boundary[u] == kFree || boundary[u] == sigma[u];
    }
    if (agrees) weights[sigma[v]] += prob[i];
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("conditioning event has zero mass");
  return ColourDistribution::from_weights(std::move(weights));
}

std::vector<double> SparseKernel::left_multiply(std::span<const double> x) const {
  std::vector<double> y(num_states(), 0.0);
  for (std::size_t i = 0; i < num_states(); ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) y[column[k]] += x[i] * value[k];
  }
  return y;
}

SparseKernel glauber_kernel(const ExactContext& ctx) {
  const MultiGraph& g = ctx.graph();
  const int q = ctx.params().q;
  const int n = g.num_vertices();
  if (ctx.num_states() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("too many states for a sparse kernel");
  }
  std::vector<double> boltzmann(64, 0.0);
  SparseKernel kernel;
  kernel.row_start.reserve(ctx.num_states() + 1);
  kernel.row_start.push_back(0);
  Configuration sigma;
  std::vector<std::size_t> radix(static_cast<std::size_t>(n), 1);
  for (int v = 1; v < n; ++v) radix[v] = radix[v - 1] * static_cast<std::size_t>(q);
  std::vector<int> same(static_cast<std::size_t>(q));
  std::vector<double> weights(static_cast<std::size_t>(q));
  std::vector<std::pair<std::uint32_t, double>> row;

  for (std::size_t i = 0; i < ctx.num_states(); ++i) {
    ctx.decode(i, sigma);
    row.clear();
    for (int v = 0; v < n; ++v) {
      std::fill(same.begin(), same.end(), 0);
      // Self-loops add the same factor to every colour and cancel.
      for (int w : g.neighbours(v)) {
        if (w != v) ++same[sigma[w]];
      }
      double total = 0.0;
      for (int c = 0; c < q; ++c) {
        weights[c] = std::exp(ctx.params().beta * same[c]);
        total += weights[c];
      }
      for (int c = 0; c < q; ++c) {
        const std::size_t j = i - sigma[v] * radix[v] + static_cast<std::size_t>(c) * radix[v];
        row.emplace_back(static_cast<std::uint32_t>(j), weights[c] / (total * n));
      }
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size();) {
      const std::uint32_t col = row[k].first;
      double sum = 0.0;
      while (k < row.size() && row[k].first == col) sum += row[k++].second;
      kernel.column.push_back(col);
      kernel.value.push_back(sum);
    }
    kernel.row_start.push_back(kernel.column.size());
  }
  return kernel;
}

namespace {

void check_set(const ExactContext& ctx, const SparseKernel& kernel, const std::vector<bool>& set) {
  if (set.size() != ctx.num_states() || kernel.num_states() != ctx.num_states()) {
    throw std::invalid_argument("state set or kernel has the wrong size");
  }
}

std::vector<double> conditioned(const ExactContext& ctx, const std::vector<bool>& set) {
  const auto& prob = ctx.probabilities();
  std::vector<double> out(prob.size(), 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (set[i]) {
      out[i] = prob[i];
      mass += prob[i];
    }
  }
  if (!(mass > 0.0)) throw std::invalid_argument("state set has zero mass");
  for (double& x : out) x /= mass;
  return out;
}

}  // namespace

double bottleneck(const ExactContext& ctx, const SparseKernel& kernel, const std::vector<bool>& set) {
  check_set(ctx, kernel, set);
  const auto& prob = ctx.probabilities();
  double flow = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (!set[i]) continue;
    mass += prob[i];
    for (std::size_t k = kernel.row_start[i]; k < kernel.row_start[i + 1]; ++k) {
      if (!set[kernel.column[k]]) flow += prob[i] * kernel.value[k];
    }
  }
  if (!(mass > 0.0)) throw std::invalid_argument("state set has zero mass");
  return flow / mass;
}

std::vector<double> tv_evolution(const ExactContext& ctx, const SparseKernel& kernel,
                                 const std::vector<bool>& set, int t_max) {
  check_set(ctx, kernel, set);
  if (t_max < 0) throw std::invalid_argument("t_max must be nonnegative");
  const auto start = conditioned(ctx, set);
  std::vector<double> x = start;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(t_max) + 1);
  for (int t = 0; t <= t_max; ++t) {
    if (t > 0) x = kernel.left_multiply(x);
    double tv = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) tv += std::abs(x[i] - start[i]);
    out.push_back(0.5 * tv);
  }
  return out;
}

NishimoriResult nishimori_check(int n, int d, const PottsParams& p, const PhaseSpec& phase,
                                int max_half_edges) {
  if (n < 1 || d < 1 || (n * d) % 2 != 0) throw std::invalid_argument("need n, d >= 1 and n*d even");
  if (n * d > max_half_edges) throw std::invalid_argument("too many pairings to enumerate");
  if (phase.q() != p.q) throw std::invalid_argument("phase has the wrong q");

  // Configurations and their membership; the pairing changes only the edges.
  std::vector<HalfEdge> identity(static_cast<std::size_t>(n * d));
  for (std::size_t h = 0; h < identity.size(); ++h) identity[h] = static_cast<HalfEdge>(h ^ 1U);
  const ExactContext space(MultiGraph::from_pairing(n, d, identity), PottsParams{p.q, d, 0.0});
  const std::size_t states = space.num_states();
  std::vector<Configuration> configs(states);
  const std::vector<bool> in_set = phase_states(space, phase);
  for (std::size_t i = 0; i < states; ++i) space.decode(i, configs[i]);

  // Weights e^{beta (H - H_max)} with H_max = nd/2 keep everything <= 1.
  const double h_max = 0.5 * n * d;
  auto weights_of = [&](std::span<const HalfEdge> pairing, std::vector<double>& w) {
    w.assign(states, 0.0);
    for (std::size_t i = 0; i < states; ++i) {
      if (!in_set[i]) continue;
      long long h = 0;
      for (std::size_t a = 0; a < pairing.size(); ++a) {
        if (a < pairing[a] && configs[i][a / d] == configs[i][pairing[a] / d]) ++h;
      }
      w[i] = std::exp(p.beta * (static_cast<double>(h) - h_max));
    }
  };

  std::vector<double> z_set;              // Z_S per pairing
  std::vector<double> mean_weight(states, 0.0);  // sum over pairings, divided later
  std::vector<double> w;
  for_each_pairing(n * d, [&](std::span<const HalfEdge> pairing) {
    weights_of(pairing, w);
    double z = 0.0;
    for (std::size_t i = 0; i < states; ++i) {
      z += w[i];
      mean_weight[i] += w[i];
    }
    z_set.push_back(z);
  });
  const double num_pairings = static_cast<double>(z_set.size());
  for (double& m : mean_weight) m /= num_pairings;

  double z_total = 0.0;
  for (double z : z_set) z_total += z;
  double mean_total = 0.0;
  for (std::size_t i = 0; i < states; ++i) mean_total += mean_weight[i];
  if (!(z_total > 0.0)) throw std::invalid_argument("phase is empty");

  double tv = 0.0;
  std::size_t index = 0;
  for_each_pairing(n * d, [&](std::span<const HalfEdge> pairing) {
    weights_of(pairing, w);
    const double z = z_set[index++];
    for (std::size_t i = 0; i < states; ++i) {
      if (!in_set[i]) continue;
      const double first = (z / z_total) * (w[i] / z);
      const double second = (mean_weight[i] / mean_total) * (w[i] / (num_pairings * mean_weight[i]));
      tv += std::abs(first - second);
    }
  });

  NishimoriResult result;
  result.tv = 0.5 * tv;
  result.pairings = z_set.size();
  result.configurations = states;
  return result;
}

}  // namespace metapotts
