#include "metapotts/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "metapotts/gibbs_exact.hpp"
#include "metapotts/meanfield.hpp"
#include "metapotts/parallel.hpp"

namespace metapotts {

ChainState ChainState::from(const MultiGraph& g, Configuration sigma, int q) {
  check_configuration(sigma, q);
  ChainState s;
  s.counts = colour_counts(sigma, q);
  s.hamiltonian = metapotts::hamiltonian(g, sigma);
  s.sigma = std::move(sigma);
  return s;
}

bool ChainState::consistent(const MultiGraph& g, int q) const {
  return counts == colour_counts(sigma, q) && hamiltonian == metapotts::hamiltonian(g, sigma);
}

Glauber::Glauber(const MultiGraph& g, const PottsParams& p)
    : g_(&g), p_(p), same_(static_cast<std::size_t>(p.q)), weights_(static_cast<std::size_t>(p.q)) {
  int max_degree = 0;
  for (int v = 0; v < g.num_vertices(); ++v) max_degree = std::max(max_degree, g.vertex_degree(v));
  boltzmann_.resize(static_cast<std::size_t>(max_degree) + 1);
  for (int k = 0; k <= max_degree; ++k) boltzmann_[k] = std::exp(p.beta * k);
}

int Glauber::step(ChainState& state, Rng& rng) {
  const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(g_->num_vertices())));
  update(state, v, rng);
  return v;
}

void Glauber::update(ChainState& state, int v, Rng& rng) {
  std::fill(same_.begin(), same_.end(), 0);
  for (int w : g_->neighbours(v)) {
    if (w != v) ++same_[state.sigma[w]];
  }
  double total = 0.0;
  for (int c = 0; c < p_.q; ++c) {
    weights_[c] = boltzmann_[same_[c]];
    total += weights_[c];
  }
  const int fresh = rng.categorical(weights_, total);
  const int old = state.sigma[v];
  if (fresh != old) {
    state.sigma[v] = static_cast<Colour>(fresh);
    --state.counts[old];
    ++state.counts[fresh];
    state.hamiltonian += same_[fresh] - same_[old];
  }
  ++state.step;
}

SwendsenWang::SwendsenWang(const MultiGraph& g, const PottsParams& p)
    : g_(&g),
      p_(p),
      keep_(-std::expm1(-p.beta)),
      kept_(g.num_edges(), false),
      uf_(static_cast<std::size_t>(g.num_vertices())),
      colour_of_root_(static_cast<std::size_t>(g.num_vertices()), -1) {}

const EdgeMask& SwendsenWang::percolate(std::span<const Colour> sigma, Rng& rng) {
  const auto& edges = g_->edges();
  kept_count_ = 0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const bool keep = sigma[edges[e].u] == sigma[edges[e].v] && rng.uniform() < keep_;
    kept_[e] = keep;
    kept_count_ += keep ? 1 : 0;
  }
  return kept_;
}

void SwendsenWang::step(ChainState& state, Rng& rng) {
  percolate(state.sigma, rng);
  const int n = g_->num_vertices();
  uf_.reset(static_cast<std::size_t>(n));
  const auto& edges = g_->edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (kept_[e]) uf_.unite(static_cast<std::uint32_t>(edges[e].u), static_cast<std::uint32_t>(edges[e].v));
  }
  std::fill(colour_of_root_.begin(), colour_of_root_.end(), -1);
  std::fill(state.counts.begin(), state.counts.end(), 0);
  for (int v = 0; v < n; ++v) {
    const auto r = uf_.find(static_cast<std::uint32_t>(v));
    if (colour_of_root_[r] < 0) {
      colour_of_root_[r] = static_cast<int>(rng.below(static_cast<std::uint64_t>(p_.q)));
    }
    state.sigma[v] = static_cast<Colour>(colour_of_root_[r]);
    ++state.counts[colour_of_root_[r]];
  }
  state.hamiltonian = hamiltonian(*g_, state.sigma);
  ++state.step;
}

const char* to_string(ChainKind kind) { return kind == ChainKind::glauber ? "glauber" : "sw"; }

void write_trace_csv(std::ostream& out, const Trace& trace, int q) {
  out << "step";
  for (int c = 1; c <= q; ++c) out << ",count_" << c;
  out << ",hamiltonian,member,escape\n";
  for (const auto& r : trace.records) {
    out << r.step;
    for (int c : r.counts) out << ',' << c;
    out << ',' << r.hamiltonian << ',' << (r.member ? 1 : 0) << ',' << (r.escaped ? 1 : 0) << '\n';
  }
}

int EscapeReport::escaped() const {
  return static_cast<int>(std::count_if(trials.begin(), trials.end(),
                                        [](const TrialOutcome& t) { return t.escape_step.has_value(); }));
}

namespace {

double plant_beta_of(const EscapeConfig& c) {
  return std::isnan(c.plant_beta) ? c.params.beta : c.plant_beta;
}

// Fixed point whose (nu, rho) seed the planted start.
ColourDistribution start_mu(const EscapeConfig& c) {
  const PottsParams plant{c.params.q, c.params.d, plant_beta_of(c)};
  if (c.start == PhaseKind::para) return ColourDistribution::uniform(plant.q);
  auto ferro = ferro_fixed_point(plant);
  if (!ferro) {
    throw std::invalid_argument("no ferromagnetic fixed point at the plant temperature");
  }
  return ferro->mu;
}

}  // namespace

void validate(const EscapeConfig& c) {
  if (c.params.q < 3 || c.params.q > kMaxColours) throw std::invalid_argument("q must be >= 3");
  if (c.params.d < 3) throw std::invalid_argument("d must be >= 3");
  if (!(c.params.beta >= 0.0) || !std::isfinite(c.params.beta)) {
    throw std::invalid_argument("beta must be finite and nonnegative");
  }
  const double pb = plant_beta_of(c);
  if (!(pb >= 0.0) || !std::isfinite(pb)) throw std::invalid_argument("plant beta must be finite and nonnegative");
  if (c.n < 1) throw std::invalid_argument("n must be positive");
  if ((static_cast<long long>(c.n) * c.params.d) % 2 != 0) throw std::invalid_argument("d*n must be even");
  if (!(c.start_eps > 0.0 && c.start_eps < 1.0)) throw std::invalid_argument("start eps must lie in (0,1)");
  if (!(c.monitor_eps > c.start_eps && c.monitor_eps < 1.0)) {
    throw std::invalid_argument("monitor eps must exceed start eps and be below 1");
  }
  if (c.sweeps < 0) throw std::invalid_argument("sweeps must be nonnegative");
  if (c.trials < 1) throw std::invalid_argument("trials must be positive");
  if (c.workers < 1) throw std::invalid_argument("workers must be positive");
  if (c.trace_stride < 0) throw std::invalid_argument("trace stride must be nonnegative");
  if (c.start == PhaseKind::ferro) {
    const PottsParams plant{c.params.q, c.params.d, pb};
    if (!ferro_fixed_point(plant)) {
      throw std::invalid_argument("no ferromagnetic fixed point at the plant temperature");
    }
  }
}

namespace {

TrialOutcome run_trial(const EscapeConfig& c, const IntegerStatistics& stats, const PhaseSpec& start,
                       const PhaseSpec& monitor, int trial) {
  Rng rng(derive_seed(c.seed, static_cast<std::uint64_t>(trial)));
  PlantedSample planted = sample_planted(stats, rng);
  const MultiGraph& g = planted.graph;
  const int n = g.num_vertices();
  ChainState state = ChainState::from(g, std::move(planted.sigma), c.params.q);

  TrialOutcome out;
  out.trial = trial;
  out.started_inside = phase_membership(state.counts, start).member;

  const bool glauber = c.chain == ChainKind::glauber;
  const long long unit = glauber ? n : 1;
  const long long total = c.sweeps * unit;
  const long long stride = c.trace_stride * unit;

  auto observe = [&](bool force_record) {
    const Membership m = phase_membership(state.counts, monitor);
    out.max_deviation = std::max(out.max_deviation, m.deviation / n);
    if (!m.member && !out.escape_step) out.escape_step = state.step;
    if (stride > 0 && (force_record || state.step % stride == 0)) {
      out.trace.records.push_back(
          {state.step, state.counts, state.hamiltonian, m.member, out.escape_step.has_value()});
    }
    return m.member;
  };

  bool inside = observe(true);
  if (glauber) {
    Glauber chain(g, c.params);
    while (state.step < total && (inside || !c.stop_on_escape)) {
      chain.step(state, rng);
      const bool was_escaped = out.escape_step.has_value();
      inside = observe(false);
      if (!was_escaped && out.escape_step && stride > 0 && state.step % stride != 0) {
        out.trace.records.push_back(
            {state.step, state.counts, state.hamiltonian, inside, true});
      }
    }
  } else {
    SwendsenWang chain(g, c.params);
    while (state.step < total && (inside || !c.stop_on_escape)) {
      chain.step(state, rng);
      const bool was_escaped = out.escape_step.has_value();
      inside = observe(false);
      if (!was_escaped && out.escape_step && stride > 0 && state.step % stride != 0) {
        out.trace.records.push_back(
            {state.step, state.counts, state.hamiltonian, inside, true});
      }
    }
  }
  out.trace.escape_step = out.escape_step;
  return out;
}

}  // namespace

EscapeReport escape_experiment(const EscapeConfig& c) {
  validate(c);
  const PottsParams plant{c.params.q, c.params.d, plant_beta_of(c)};
  const auto [nu, rho] = marginal_map(start_mu(c), plant);
  EscapeReport report{c,
                      PhaseSpec{c.start, c.start_eps, nu, false},
                      PhaseSpec{c.start, c.monitor_eps, nu,
                                c.start == PhaseKind::ferro && c.monitor_permutations},
                      round_statistics(nu, rho, c.n, c.params.d),
                      {}};
  report.trials.resize(static_cast<std::size_t>(c.trials));
  parallel_for(report.trials.size(), c.workers, [&](std::size_t t) {
    report.trials[t] = run_trial(c, report.planted, report.start, report.monitor, static_cast<int>(t));
  });
  return report;
}

}  // namespace metapotts
