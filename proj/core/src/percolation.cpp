#include "metapotts/percolation.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "metapotts/meanfield.hpp"
#include "metapotts/parallel.hpp"

namespace metapotts {

BranchingQuantities branching_quantities(int d, double p) {
  if (d < 3) throw std::invalid_argument("branching quantities need d >= 3");
  if (!(p > 1.0 / (d - 1) && p <= 1.0)) {
    throw std::invalid_argument("branching quantities need 1/(d-1) < p <= 1");
  }
  // With u = p (1 - phi) the fixed point reads u = p (1 - (1 - u)^{d-1}); the
  // right side minus u is positive on (0, u*) and negative after.
  auto excess = [&](double u) { return -p * std::expm1((d - 1) * std::log1p(-u)) - u; };
  double lo = 0.0;
  double hi = p;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  BranchingQuantities b;
  b.p = p;
  b.d = d;
  const double log_z = std::log1p(-u);  // z = p phi + 1 - p = 1 - u
  b.phi = std::exp((d - 1) * log_z);
  b.chi = -std::expm1(d * log_z);
  b.psi = 0.5 * d * p * (1.0 - b.phi * b.phi);
  return b;
}

double subcritical_inequality(int d, double p) {
  // d p / 2 - psi = (d p / 2) phi^2 and 1 - chi = z^d with phi = z^{d-1}, so
  // the ratio is p z^{d-2}; this form stays finite as p -> 1.
  const BranchingQuantities b = branching_quantities(d, p);
  const double z = std::pow(b.phi, 1.0 / (d - 1));
  return 1.0 / (d - 1) - p * std::pow(z, d - 2);
}

const char* to_string(PercolationMode mode) {
  return mode == PercolationMode::binomial ? "binomial" : "exact";
}

EdgeMask percolation_edges(const MultiGraph& g, const PercolationSpec& spec, Rng& rng,
                           const std::vector<bool>* vertex_mask) {
  const auto& edges = g.edges();
  auto eligible = [&](std::size_t e) {
    return vertex_mask == nullptr || ((*vertex_mask)[edges[e].u] && (*vertex_mask)[edges[e].v]);
  };
  EdgeMask kept(edges.size(), false);
  if (spec.mode == PercolationMode::binomial) {
    if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (eligible(e)) kept[e] = rng.uniform() < spec.p;
    }
    return kept;
  }
  std::vector<std::uint32_t> pool;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (eligible(e)) pool.push_back(static_cast<std::uint32_t>(e));
  }
  if (spec.m > pool.size()) throw std::invalid_argument("m exceeds the number of edges");
  // Partial Fisher-Yates: the first m entries are a uniform m-subset.
  for (std::size_t i = 0; i < spec.m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    kept[pool[i]] = true;
  }
  return kept;
}

ComponentStats percolate(const MultiGraph& g, const PercolationSpec& spec, Rng& rng) {
  return components(g, percolation_edges(g, spec, rng));
}

ComponentStats percolate(const MultiGraph& g, const PercolationSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return percolate(g, spec, rng);
}

ComponentStats percolate(const MultiGraph& g, const std::vector<bool>& vertex_mask,
                         const PercolationSpec& spec, Rng& rng) {
  if (vertex_mask.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("vertex mask size mismatch");
  }
  return components(g, percolation_edges(g, spec, rng, &vertex_mask), vertex_mask);
}

ComponentStats percolate_coupled(const MultiGraph& g, std::span<const double> uniforms, double p) {
  if (uniforms.size() != g.num_edges()) throw std::invalid_argument("need one uniform per edge");
  EdgeMask kept(g.num_edges(), false);
  for (std::size_t e = 0; e < kept.size(); ++e) kept[e] = uniforms[e] < p;
  return components(g, kept);
}

const char* to_string(ClassRegime regime) {
  switch (regime) {
    case ClassRegime::sub:
      return "sub";
    case ClassRegime::critical:
      return "critical";
    case ClassRegime::super:
      break;
  }
  return "super";
}

ColourClass colour_class_parameter(const ColourDistribution& nu, const EdgeDistribution& rho, int s,
                                   const PottsParams& p) {
  if (s < 0 || s >= nu.q() || rho.q() != nu.q()) throw std::invalid_argument("colour out of range");
  if (!(nu[s] > 0.0)) throw std::invalid_argument("colour class is empty");
  ColourClass out;
  out.r = -std::expm1(-p.beta) * rho(s, s) / nu[s];
  const double threshold = 1.0 / (p.d - 1);
  if (std::abs(out.r - threshold) < 1e-12) {
    out.regime = ClassRegime::critical;
  } else {
    out.regime = out.r < threshold ? ClassRegime::sub : ClassRegime::super;
  }
  return out;
}

double giant_identity_residual(int q, int d, double beta) {
  const PottsParams p{q, d, beta};
  const auto ferro = ferro_fixed_point(p);
  if (!ferro) throw std::invalid_argument("no ferromagnetic fixed point: beta <= beta_u");
  const double x = ferro->x;
  const double w = std::expm1(beta);
  const double nu1 = 1.0 / (1.0 + (q - 1) * std::exp(-d * std::log(ferro->t)));
  const double r = w * x / (1.0 + w * x);
  const BranchingQuantities b = branching_quantities(d, r);
  return std::abs(b.chi - (q * nu1 - 1.0) / ((q - 1) * nu1)) +
         std::abs(b.phi - (1.0 - x) / ((q - 1) * x));
}

std::vector<PercolationTrial> run_percolation(const PercolationExperiment& e) {
  if (e.trials < 1 || e.workers < 1) throw std::invalid_argument("trials and workers must be positive");
  std::vector<PercolationTrial> out(static_cast<std::size_t>(e.trials));
  parallel_for(out.size(), e.workers, [&](std::size_t t) {
    Rng rng(derive_seed(e.seed, t));
    const MultiGraph g = sample_regular(e.n, e.d, rng);
    const ComponentStats stats = percolate(g, e.spec, rng);
    out[t] = {static_cast<int>(t), stats.sizes.empty() ? 0 : stats.sizes[0],
              stats.edges.empty() ? 0 : stats.edges[0], stats.sum_squares_rest};
  });
  return out;
}

void write_percolation_csv(std::ostream& out, std::span<const PercolationTrial> trials) {
  out << "trial,c1,edges_c1,sum_sq_rest\n";
  for (const auto& t : trials) {
    out << t.trial << ',' << t.c1 << ',' << t.edges_c1 << ',' << t.sum_sq_rest << '\n';
  }
}

}  // namespace metapotts
