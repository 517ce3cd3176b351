#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "metapotts/rgraph.hpp"
#include "metapotts/rng.hpp"
#include "metapotts/types.hpp"

namespace metapotts {

/// Potts broadcasting on the d-regular tree: the root (d children) takes a
/// colour from nu^mu, every other vertex has d-1 children, and a child of a
/// vertex coloured y takes colour x with probability proportional to
/// mu(x) e^{beta 1{x=y}}.
struct BroadcastSpec {
  PottsParams params;
  ColourDistribution mu;
  int depth = 0;
  int samples = 1000;
};

struct BroadcastKernel {
  int q = 0;
  std::vector<double> prior;   // nu^mu
  std::vector<double> matrix;  // q x q, row y is the child law given parent y

  double operator()(int y, int x) const { return matrix[static_cast<std::size_t>(y * q + x)]; }
};

BroadcastKernel broadcast_kernel(const PottsParams& p, const ColourDistribution& mu);

// Number of vertices at distance `depth` from the root.
std::uint64_t boundary_size(int d, int depth);

struct BroadcastSample {
  Colour root = 0;
  // Colours at distance `depth`, in level order: the children of a vertex are
  // consecutive and siblings keep the order of their parents.
  Configuration leaves;
};

BroadcastSample broadcast_sample(const BroadcastSpec& spec, Rng& rng);

// Exact law of the root colour given the boundary colours at spec.depth.
ColourDistribution root_posterior(std::span<const Colour> leaves, const BroadcastSpec& spec);

/// Mean over samples of sum_c |Pr(root = c | boundary at depth l) - nu^mu(c)|
/// for l = 0..depth, with standard errors.
struct DecayCurve {
  std::vector<double> distance;
  std::vector<double> stderr_;
};

// Sample i uses the stream derive_seed(seed, i); the tree is generated
// depth-first and the posterior for every boundary depth is computed on the
// way back up, so memory stays O(depth^2 q).
DecayCurve nonrec_curve(const BroadcastSpec& spec, std::uint64_t seed, int workers = 1);

void write_curve_csv(std::ostream& out, const DecayCurve& curve);

/// Colour pattern of the depth-2 neighbourhood of a vertex: its colour, the
/// number of its d neighbours sharing it, and the number of the d(d-1)
/// second-generation vertices (reached without backtracking) sharing the
/// colour of the neighbour they hang from.
struct LocalPatternLaw {
  int q = 0;
  int d = 0;
  std::vector<double> probs;

  std::size_t index(int colour, int same_children, int same_grandchildren) const;
  std::size_t size() const { return probs.size(); }
};

LocalPatternLaw broadcast_local_law(const PottsParams& p, const ColourDistribution& mu);

// Empirical law of the pattern at `samples` uniformly drawn vertices.
LocalPatternLaw graph_local_law(const MultiGraph& g, std::span<const Colour> sigma, int q,
                                int samples, Rng& rng);

double total_variation(const LocalPatternLaw& a, const LocalPatternLaw& b);

}  // namespace metapotts
