#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "metapotts/rng.hpp"
#include "metapotts/types.hpp"

namespace metapotts {

using HalfEdge = std::uint32_t;

struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Bitset over the canonical edge order of a MultiGraph.
using EdgeMask = std::vector<bool>;

/// Multigraph stored as a perfect matching on half-edges.
///
/// Vertex v owns the contiguous half-edge block [offset(v), offset(v+1)); for
/// a d-regular graph built from a pairing that block is [v*d, v*d + d). Self
/// loops pair two half-edges of the same vertex and add 2 to its degree.
///
/// Edges are numbered canonically: edge e joins half-edge h and partner(h)
/// with h < partner(h), ordered by h. Immutable after construction.
class MultiGraph {
 public:
  MultiGraph() = default;

  // d-regular multigraph on n vertices from a perfect matching of the n*d
  // half-edges (pairing[h] is h's partner).
  static MultiGraph from_pairing(int n, int d, std::vector<HalfEdge> pairing);
  // Arbitrary multigraph; half-edges are handed out to each vertex in edge
  // order. d is allowed to be anything, including irregular degrees.
  static MultiGraph from_edges(int n, std::span<const Edge> edges);

  int num_vertices() const { return n_; }
  std::size_t num_half_edges() const { return partner_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  bool is_regular() const { return degree_ >= 0; }
  // Common degree of a regular graph, -1 otherwise.
  int degree() const { return degree_; }
  int vertex_degree(int v) const { return static_cast<int>(offset_[v + 1] - offset_[v]); }

  HalfEdge first_half_edge(int v) const { return offset_[v]; }
  HalfEdge partner(HalfEdge h) const { return partner_[h]; }
  int owner(HalfEdge h) const { return owner_[h]; }
  // Canonical index of the edge that h belongs to.
  std::uint32_t edge_of(HalfEdge h) const { return edge_of_[h]; }

  // Neighbour across each half-edge of v, in half-edge order. A self-loop
  // lists v twice.
  std::span<const int> neighbours(int v) const {
    return {neighbour_.data() + offset_[v], neighbour_.data() + offset_[v + 1]};
  }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<HalfEdge>& pairing() const { return partner_; }

 private:
  void finalize();

  int n_ = 0;
  int degree_ = -1;
  std::vector<HalfEdge> offset_;
  std::vector<HalfEdge> partner_;
  std::vector<int> owner_;
  std::vector<int> neighbour_;
  std::vector<std::uint32_t> edge_of_;
  std::vector<Edge> edges_;
};

// Text format: header "n d" (d = 0 for irregular graphs), then one "u v" line
// per edge in canonical order, 0-indexed, self-loops listed once.
void write_graph(std::ostream& out, const MultiGraph& g);
MultiGraph read_graph(std::istream& in);

/// Uniformly random d-regular multigraph from the pairing model.
/// Throws std::invalid_argument unless n >= 1, d >= 3 and n*d is even.
MultiGraph sample_regular(int n, int d, Rng& rng);
MultiGraph sample_regular(int n, int d, std::uint64_t seed);

// Calls fn(pairing) once for every perfect matching of `half_edges` points
// ((half_edges - 1)!! of them) in lexicographic order.
void for_each_pairing(int half_edges, const std::function<void(std::span<const HalfEdge>)>& fn);

/// Integer colour/edge counts of a graph/configuration pair.
///
/// edge_counts(s, t) for s != t is the number of edges joining colour classes
/// s and t (symmetric); edge_counts(s, s) is the number of monochromatic
/// edges of colour s. Feasible iff
///   2 * edge_counts(s,s) + sum_{t != s} edge_counts(s,t) = d * vertex_counts(s).
/// The ordered-pair count d*n*rho(s,s) = 2 * edge_counts(s,s) is even by
/// construction.
struct IntegerStatistics {
  int q = 0;
  int d = 0;
  std::vector<long long> vertex_counts;
  std::vector<long long> edge_counts;  // q x q row-major

  long long n() const;
  long long edges(int s, int t) const { return edge_counts[static_cast<std::size_t>(s * q + t)]; }
  long long& edges(int s, int t) { return edge_counts[static_cast<std::size_t>(s * q + t)]; }
  // Throws std::invalid_argument describing the first violated condition.
  void check_feasible() const;

  friend bool operator==(const IntegerStatistics&, const IntegerStatistics&) = default;
};

// Largest-remainder rounding of (n*nu, d*n*rho) followed by a repair pass that
// enforces the degree identities. Throws if n*d is odd or rho is not
// consistent with nu.
IntegerStatistics round_statistics(const ColourDistribution& nu, const EdgeDistribution& rho,
                                   int n, int d);

struct PlantedSample {
  MultiGraph graph;
  Configuration sigma;
};

// Configuration with the prescribed colour counts on a uniformly random vertex
// set, and a pairing uniform among those realising edge_counts exactly.
PlantedSample sample_planted(const IntegerStatistics& stats, Rng& rng);
PlantedSample sample_planted(const IntegerStatistics& stats, std::uint64_t seed);

IntegerStatistics realized_statistics(const MultiGraph& g, std::span<const Colour> sigma, int q);

// (nu^sigma, rho^{G,sigma}); every half-edge contributes one ordered pair, so a
// self-loop adds 2 to the (s, s) count. Normalised by 2|E|.
std::pair<ColourDistribution, EdgeDistribution> empirical_stats(const MultiGraph& g,
                                                                 std::span<const Colour> sigma,
                                                                 int q);

// q x q row-major overlap: entry (c, c') is the fraction of vertices with
// sigma = c and sigma2 = c'.
std::vector<double> overlap(std::span<const Colour> sigma, std::span<const Colour> sigma2, int q);

struct ComponentStats {
  std::vector<int> sizes;        // descending
  std::vector<long long> edges;  // active edges inside each component, aligned with sizes
  long long sum_squares_rest = 0;  // sum_{i >= 2} sizes[i]^2
};

// Components of (V, active edges); isolated vertices are components of size 1.
// Ties in size are broken by smallest vertex index.
ComponentStats components(const MultiGraph& g, const EdgeMask& active);
// Same, counting only vertices with vertex_mask[v] set.
ComponentStats components(const MultiGraph& g, const EdgeMask& active,
                          const std::vector<bool>& vertex_mask);

// Per-vertex leading exponent of Pr[rho^{G,sigma} = rho]:
// (d/2) sum_{s,t} rho(s,t) log(nu(s) nu(t) / rho(s,t)).
double log_pairing_rate(const ColourDistribution& nu, const EdgeDistribution& rho, int d);

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }
  void reset(std::size_t n);
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b);
  std::uint32_t size_of_root(std::uint32_t root) const { return size_[root]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

}  // namespace metapotts
