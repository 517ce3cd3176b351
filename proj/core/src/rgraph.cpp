#include "metapotts/rgraph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace metapotts {

namespace {

void check_pairing(std::span<const HalfEdge> pairing) {
  for (std::size_t h = 0; h < pairing.size(); ++h) {
    const HalfEdge p = pairing[h];
    if (p >= pairing.size() || p == h || pairing[p] != h) {
      throw std::invalid_argument("pairing must be a fixed-point-free involution");
    }
  }
}

}  // namespace

MultiGraph MultiGraph::from_pairing(int n, int d, std::vector<HalfEdge> pairing) {
  if (n < 1 || d < 0) throw std::invalid_argument("need n >= 1 and d >= 0");
  if (pairing.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d)) {
    throw std::invalid_argument("pairing size must be n*d");
  }
  check_pairing(pairing);
  MultiGraph g;
  g.n_ = n;
  g.partner_ = std::move(pairing);
  g.offset_.resize(static_cast<std::size_t>(n) + 1);
  for (int v = 0; v <= n; ++v) g.offset_[v] = static_cast<HalfEdge>(v) * static_cast<HalfEdge>(d);
  g.finalize();
  return g;
}

MultiGraph MultiGraph::from_edges(int n, std::span<const Edge> edges) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  std::vector<HalfEdge> deg(static_cast<std::size_t>(n), 0);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    ++deg[e.u];
    ++deg[e.v];
  }
  MultiGraph g;
  g.n_ = n;
  g.offset_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int v = 0; v < n; ++v) g.offset_[v + 1] = g.offset_[v] + deg[v];
  g.partner_.assign(g.offset_[n], 0);
  std::vector<HalfEdge> cursor(g.offset_.begin(), g.offset_.end() - 1);
  for (const Edge& e : edges) {
    const HalfEdge a = cursor[e.u]++;
    const HalfEdge b = cursor[e.v]++;
    g.partner_[a] = b;
    g.partner_[b] = a;
  }
  g.finalize();
  return g;
}

void MultiGraph::finalize() {
  const std::size_t halves = partner_.size();
  owner_.resize(halves);
  neighbour_.resize(halves);
  edge_of_.resize(halves);
  for (int v = 0; v < n_; ++v) {
    for (HalfEdge h = offset_[v]; h < offset_[v + 1]; ++h) owner_[h] = v;
  }
  edges_.clear();
  edges_.reserve(halves / 2);
  for (HalfEdge h = 0; h < halves; ++h) {
    neighbour_[h] = owner_[partner_[h]];
    if (h < partner_[h]) {
      edge_of_[h] = edge_of_[partner_[h]] = static_cast<std::uint32_t>(edges_.size());
      edges_.push_back({owner_[h], owner_[partner_[h]]});
    }
  }
  degree_ = n_ > 0 ? vertex_degree(0) : 0;
  for (int v = 1; v < n_; ++v) {
    if (vertex_degree(v) != degree_) {
      degree_ = -1;
      break;
    }
  }
}

void write_graph(std::ostream& out, const MultiGraph& g) {
  out << g.num_vertices() << ' ' << (g.is_regular() ? g.degree() : 0) << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

MultiGraph read_graph(std::istream& in) {
  std::string line;
  int n = -1;
  int d = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    int a = 0;
    int b = 0;
    if (!(fields >> a >> b)) throw std::invalid_argument("malformed graph line: " + line);
    if (n < 0) {
      n = a;
      d = b;
    } else {
      edges.push_back({a, b});
    }
  }
  if (n < 1) throw std::invalid_argument("graph header missing");
  MultiGraph g = MultiGraph::from_edges(n, edges);
  if (d > 0 && g.degree() != d) {
    throw std::invalid_argument("graph is not " + std::to_string(d) + "-regular");
  }
  return g;
}

MultiGraph sample_regular(int n, int d, Rng& rng) {
  if (n < 1 || d < 3) throw std::invalid_argument("sample_regular needs n >= 1 and d >= 3");
  if ((static_cast<long long>(n) * d) % 2 != 0) {
    throw std::invalid_argument("d*n must be even");
  }
  const std::size_t halves = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
  std::vector<HalfEdge> order(halves);
  std::iota(order.begin(), order.end(), HalfEdge{0});
  rng.shuffle(std::span<HalfEdge>(order));
  std::vector<HalfEdge> pairing(halves);
  for (std::size_t i = 0; i < halves; i += 2) {
    pairing[order[i]] = order[i + 1];
    pairing[order[i + 1]] = order[i];
  }
  return MultiGraph::from_pairing(n, d, std::move(pairing));
}

MultiGraph sample_regular(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  return sample_regular(n, d, rng);
}

void for_each_pairing(int half_edges,
                      const std::function<void(std::span<const HalfEdge>)>& fn) {
  if (half_edges < 0 || half_edges % 2 != 0) {
    throw std::invalid_argument("need an even number of half-edges");
  }
  const auto m = static_cast<std::size_t>(half_edges);
  std::vector<HalfEdge> pairing(m, 0);
  std::vector<bool> used(m, false);
  std::function<void()> recurse = [&] {
    std::size_t first = 0;
    while (first < m && used[first]) ++first;
    if (first == m) {
      fn(pairing);
      return;
    }
    used[first] = true;
    for (std::size_t other = first + 1; other < m; ++other) {
      if (used[other]) continue;
      used[other] = true;
      pairing[first] = static_cast<HalfEdge>(other);
      pairing[other] = static_cast<HalfEdge>(first);
      recurse();
      used[other] = false;
    }
    used[first] = false;
  };
  recurse();
}

long long IntegerStatistics::n() const {
  return std::accumulate(vertex_counts.begin(), vertex_counts.end(), 0LL);
}

void IntegerStatistics::check_feasible() const {
  if (q < 1 || d < 1) throw std::invalid_argument("statistics need q >= 1 and d >= 1");
  if (vertex_counts.size() != static_cast<std::size_t>(q) ||
      edge_counts.size() != static_cast<std::size_t>(q * q)) {
    throw std::invalid_argument("statistics have the wrong shape");
  }
  for (int s = 0; s < q; ++s) {
    if (vertex_counts[s] < 0) throw std::invalid_argument("negative vertex count");
    long long incident = 2 * edges(s, s);
    for (int t = 0; t < q; ++t) {
      if (edges(s, t) < 0) throw std::invalid_argument("negative edge count");
      if (edges(s, t) != edges(t, s)) throw std::invalid_argument("edge counts not symmetric");
      if (t != s) incident += edges(s, t);
    }
    if (incident != static_cast<long long>(d) * vertex_counts[s]) {
      throw std::invalid_argument("degree identity fails for colour " + std::to_string(s));
    }
  }
  if (n() < 1) throw std::invalid_argument("statistics describe an empty graph");
}

namespace {

// Rounds nonnegative targets to integers with the given total, giving the
// leftover units to the largest fractional parts (lowest index on ties).
std::vector<long long> largest_remainder(std::span<const double> targets, long long total) {
  std::vector<long long> out(targets.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  long long assigned = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double f = std::floor(targets[i]);
    out[i] = static_cast<long long>(f);
    assigned += out[i];
    remainders.emplace_back(targets[i] - f, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) {
    ++out[remainders[k].second];
  }
  for (std::size_t k = remainders.size(); assigned > total && k-- > 0;) {
    auto& slot = out[remainders[k].second];
    if (slot > 0) {
      --slot;
      --assigned;
    }
  }
  return out;
}

}  // namespace

IntegerStatistics round_statistics(const ColourDistribution& nu, const EdgeDistribution& rho,
                                   int n, int d) {
  const int q = nu.q();
  if (rho.q() != q) throw std::invalid_argument("nu and rho disagree on q");
  if (n < 1 || d < 1) throw std::invalid_argument("need n >= 1 and d >= 1");
  if ((static_cast<long long>(n) * d) % 2 != 0) {
    throw std::invalid_argument("infeasible statistics: d*n must be even");
  }
  if (rho.row_sum_defect(nu) > 1e-9) {
    throw std::invalid_argument("rho row sums must equal nu");
  }

  IntegerStatistics stats;
  stats.q = q;
  stats.d = d;
  std::vector<double> vertex_targets(static_cast<std::size_t>(q));
  for (int s = 0; s < q; ++s) vertex_targets[s] = n * nu[s];
  stats.vertex_counts = largest_remainder(vertex_targets, n);

  // Unordered cells (s <= t): target edge counts d*n*rho(s,t) off the
  // diagonal and d*n*rho(s,s)/2 on it; both sum to d*n/2.
  const double dn = static_cast<double>(n) * d;
  std::vector<std::pair<int, int>> cells;
  std::vector<double> edge_targets;
  for (int s = 0; s < q; ++s) {
    for (int t = s; t < q; ++t) {
      cells.emplace_back(s, t);
      edge_targets.push_back(s == t ? dn * rho(s, s) / 2.0 : dn * rho(s, t));
    }
  }
  const auto rounded = largest_remainder(edge_targets, static_cast<long long>(n) * d / 2);
  stats.edge_counts.assign(static_cast<std::size_t>(q * q), 0);
  std::vector<double> target_matrix(static_cast<std::size_t>(q * q), 0.0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto [s, t] = cells[k];
    target_matrix[s * q + t] = target_matrix[t * q + s] = edge_targets[k];
    if (s != t) stats.edges(s, t) = stats.edges(t, s) = rounded[k];
  }

  // Half-edges of colour s left for monochromatic edges.
  auto residual = [&](int s) {
    long long r = static_cast<long long>(d) * stats.vertex_counts[s];
    for (int t = 0; t < q; ++t) {
      if (t != s) r -= stats.edges(s, t);
    }
    return r;
  };
  auto bump = [&](int s, int t, long long delta) {
    stats.edges(s, t) += delta;
    stats.edges(t, s) += delta;
  };

  // Too many cross edges at s: drop the most over-rounded ones.
  for (int s = 0; s < q; ++s) {
    while (residual(s) < 0) {
      int worst = -1;
      double excess = -1e300;
      for (int t = 0; t < q; ++t) {
        if (t == s || stats.edges(s, t) == 0) continue;
        const double e = static_cast<double>(stats.edges(s, t)) - target_matrix[s * q + t];
        if (e > excess) {
          excess = e;
          worst = t;
        }
      }
      bump(s, worst, -1);
    }
  }

  // Odd residuals come in pairs (the residual total is d*n minus an even
  // number); fix each pair with one cross edge.
  std::vector<int> odd;
  for (int s = 0; s < q; ++s) {
    if (residual(s) % 2 != 0) odd.push_back(s);
  }
  for (std::size_t k = 0; k + 1 < odd.size(); k += 2) {
    const int s = odd[k];
    const int t = odd[k + 1];
    const bool over = static_cast<double>(stats.edges(s, t)) > target_matrix[s * q + t];
    bump(s, t, (over && stats.edges(s, t) > 0) ? -1 : +1);
  }

  for (int s = 0; s < q; ++s) stats.edges(s, s) = residual(s) / 2;
  stats.check_feasible();
  return stats;
}

PlantedSample sample_planted(const IntegerStatistics& stats, Rng& rng) {
  stats.check_feasible();
  const int q = stats.q;
  const int d = stats.d;
  const auto n = static_cast<int>(stats.n());

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<int>(perm));
  Configuration sigma(static_cast<std::size_t>(n));
  {
    int position = 0;
    for (int s = 0; s < q; ++s) {
      for (long long k = 0; k < stats.vertex_counts[s]; ++k) {
        sigma[perm[position++]] = static_cast<Colour>(s);
      }
    }
  }

  std::vector<std::vector<HalfEdge>> pool(static_cast<std::size_t>(q));
  for (int v = 0; v < n; ++v) {
    for (int k = 0; k < d; ++k) {
      pool[sigma[v]].push_back(static_cast<HalfEdge>(v * d + k));
    }
  }
  for (auto& list : pool) rng.shuffle(std::span<HalfEdge>(list));

  std::vector<HalfEdge> pairing(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  std::vector<std::size_t> cursor(static_cast<std::size_t>(q), 0);
  auto join = [&](HalfEdge a, HalfEdge b) {
    pairing[a] = b;
    pairing[b] = a;
  };
  for (int s = 0; s < q; ++s) {
    for (int t = s + 1; t < q; ++t) {
      for (long long k = 0; k < stats.edges(s, t); ++k) {
        join(pool[s][cursor[s]++], pool[t][cursor[t]++]);
      }
    }
  }
  for (int s = 0; s < q; ++s) {
    for (long long k = 0; k < stats.edges(s, s); ++k) {
      const HalfEdge a = pool[s][cursor[s]++];
      join(a, pool[s][cursor[s]++]);
    }
  }
  return {MultiGraph::from_pairing(n, d, std::move(pairing)), std::move(sigma)};
}

PlantedSample sample_planted(const IntegerStatistics& stats, std::uint64_t seed) {
  Rng rng(seed);
  return sample_planted(stats, rng);
}

IntegerStatistics realized_statistics(const MultiGraph& g, std::span<const Colour> sigma, int q) {
  if (sigma.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("configuration length must equal n");
  }
  check_configuration(sigma, q);
  IntegerStatistics stats;
  stats.q = q;
  stats.d = g.is_regular() ? g.degree() : 0;
  stats.vertex_counts.assign(static_cast<std::size_t>(q), 0);
  stats.edge_counts.assign(static_cast<std::size_t>(q * q), 0);
  for (Colour c : sigma) ++stats.vertex_counts[c];
  for (const Edge& e : g.edges()) {
    const int s = sigma[e.u];
    const int t = sigma[e.v];
    ++stats.edges(s, t);
    if (s != t) ++stats.edges(t, s);
  }
  return stats;
}

std::pair<ColourDistribution, EdgeDistribution> empirical_stats(const MultiGraph& g,
                                                                 std::span<const Colour> sigma,
                                                                 int q) {
  if (sigma.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("configuration length must equal n");
  }
  check_configuration(sigma, q);
  const auto counts = colour_counts(sigma, q);
  std::vector<double> nu(static_cast<std::size_t>(q));
  for (int s = 0; s < q; ++s) nu[s] = static_cast<double>(counts[s]) / g.num_vertices();

  std::vector<long long> oriented(static_cast<std::size_t>(q * q), 0);
  for (HalfEdge h = 0; h < g.num_half_edges(); ++h) {
    ++oriented[sigma[g.owner(h)] * q + sigma[g.owner(g.partner(h))]];
  }
  std::vector<double> rho(oriented.size(), 0.0);
  const auto total = static_cast<double>(g.num_half_edges());
  if (total > 0) {
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = static_cast<double>(oriented[k]) / total;
  }
  return {ColourDistribution(std::move(nu)), EdgeDistribution(q, std::move(rho))};
}

std::vector<double> overlap(std::span<const Colour> sigma, std::span<const Colour> sigma2, int q) {
  if (sigma.size() != sigma2.size()) throw std::invalid_argument("configuration lengths differ");
  if (sigma.empty()) throw std::invalid_argument("empty configurations");
  check_configuration(sigma, q);
  check_configuration(sigma2, q);
  std::vector<long long> counts(static_cast<std::size_t>(q * q), 0);
  for (std::size_t v = 0; v < sigma.size(); ++v) ++counts[sigma[v] * q + sigma2[v]];
  std::vector<double> out(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out[k] = static_cast<double>(counts[k]) / static_cast<double>(sigma.size());
  }
  return out;
}

void UnionFind::reset(std::size_t n) {
  parent_.resize(n);
  size_.assign(n, 1);
  std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
}

bool UnionFind::unite(std::uint32_t a, std::uint32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

namespace {

ComponentStats collect_components(const MultiGraph& g, const EdgeMask& active,
                                  const std::vector<bool>* vertex_mask) {
  const int n = g.num_vertices();
  if (active.size() != g.num_edges()) throw std::invalid_argument("edge mask size mismatch");
  auto included = [&](int v) { return vertex_mask == nullptr || (*vertex_mask)[v]; };

  UnionFind uf(static_cast<std::size_t>(n));
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (active[e] && included(edges[e].u) && included(edges[e].v)) {
      uf.unite(static_cast<std::uint32_t>(edges[e].u), static_cast<std::uint32_t>(edges[e].v));
    }
  }

  // Component ids in order of smallest member vertex.
  std::vector<int> id_of_root(static_cast<std::size_t>(n), -1);
  std::vector<int> sizes;
  std::vector<long long> edge_counts;
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    if (!included(v)) continue;
    const auto r = uf.find(static_cast<std::uint32_t>(v));
    if (id_of_root[r] < 0) {
      id_of_root[r] = static_cast<int>(sizes.size());
      sizes.push_back(0);
      edge_counts.push_back(0);
    }
    comp[v] = id_of_root[r];
    ++sizes[comp[v]];
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (active[e] && included(edges[e].u) && included(edges[e].v)) ++edge_counts[comp[edges[e].u]];
  }

  std::vector<int> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sizes[a] > sizes[b]; });
  ComponentStats stats;
  stats.sizes.reserve(order.size());
  stats.edges.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    stats.sizes.push_back(sizes[order[k]]);
    stats.edges.push_back(edge_counts[order[k]]);
    if (k >= 1) stats.sum_squares_rest += static_cast<long long>(sizes[order[k]]) * sizes[order[k]];
  }
  return stats;
}

}  // namespace

ComponentStats components(const MultiGraph& g, const EdgeMask& active) {
  return collect_components(g, active, nullptr);
}

ComponentStats components(const MultiGraph& g, const EdgeMask& active,
                          const std::vector<bool>& vertex_mask) {
  if (vertex_mask.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("vertex mask size mismatch");
  }
  return collect_components(g, active, &vertex_mask);
}

double log_pairing_rate(const ColourDistribution& nu, const EdgeDistribution& rho, int d) {
  const int q = nu.q();
  if (rho.q() != q) throw std::invalid_argument("nu and rho disagree on q");
  double sum = 0.0;
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) {
      const double r = rho(s, t);
      if (r > 0.0) sum += r * std::log(nu[s] * nu[t] / r);
    }
  }
  return 0.5 * d * sum;
}

}  // namespace metapotts
