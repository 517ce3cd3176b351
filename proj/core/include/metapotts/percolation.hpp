#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "metapotts/rgraph.hpp"
#include "metapotts/rng.hpp"
#include "metapotts/types.hpp"

namespace metapotts {

/// Branching-process quantities of bond percolation with retention p on a
/// d-regular graph: extinction probability phi = (p phi + 1 - p)^{d-1}, giant
/// vertex fraction chi = 1 - (p phi + 1 - p)^d and giant edge density
/// psi = (d p / 2)(1 - phi^2).
struct BranchingQuantities {
  double phi = 1.0;
  double chi = 0.0;
  double psi = 0.0;
  double p = 0.0;
  int d = 0;
};

// Requires d >= 3 and 1/(d-1) < p < 1 (p = 1 is accepted and gives phi = 0).
BranchingQuantities branching_quantities(int d, double p);

// 1/(d-1) - 2 (d p / 2 - psi) / (d (1 - chi)); positive throughout the
// supercritical range.
double subcritical_inequality(int d, double p);

enum class PercolationMode { binomial, exact };

const char* to_string(PercolationMode mode);

struct PercolationSpec {
  PercolationMode mode = PercolationMode::binomial;
  double p = 0.5;       // binomial
  std::uint64_t m = 0;  // exact: number of kept edges
};

// Kept edges: each independently with probability p, or a uniform m-subset.
// With a vertex mask only edges inside the mask are eligible.
EdgeMask percolation_edges(const MultiGraph& g, const PercolationSpec& spec, Rng& rng,
                           const std::vector<bool>* vertex_mask = nullptr);

ComponentStats percolate(const MultiGraph& g, const PercolationSpec& spec, Rng& rng);
ComponentStats percolate(const MultiGraph& g, const PercolationSpec& spec, std::uint64_t seed);
// Percolation of the subgraph induced by vertex_mask; edge indices are those
// of g.
ComponentStats percolate(const MultiGraph& g, const std::vector<bool>& vertex_mask,
                         const PercolationSpec& spec, Rng& rng);

// Monotone coupling: edge e is kept iff uniforms[e] < p.
ComponentStats percolate_coupled(const MultiGraph& g, std::span<const double> uniforms, double p);

enum class ClassRegime { sub, critical, super };

const char* to_string(ClassRegime regime);

struct ColourClass {
  double r = 0.0;
  ClassRegime regime = ClassRegime::sub;
};

// Effective retention r = (1 - e^{-beta}) rho(s,s) / nu(s) of SW percolation
// inside colour class s, compared with 1/(d-1) (critical within 1e-12).
ColourClass colour_class_parameter(const ColourDistribution& nu, const EdgeDistribution& rho, int s,
                                   const PottsParams& p);

// |chi(r_f) - (q nu_f(1) - 1)/((q - 1) nu_f(1))| + |phi(r_f) - (1 - x)/((q - 1) x)|
// with x = mu_ferro(1) and r_f = (e^beta - 1) x / (1 + (e^beta - 1) x).
double giant_identity_residual(int q, int d, double beta);

struct PercolationTrial {
  int trial = 0;
  long long c1 = 0;
  long long edges_c1 = 0;
  long long sum_sq_rest = 0;
};

struct PercolationExperiment {
  int n = 1000;
  int d = 3;
  PercolationSpec spec;
  int trials = 10;
  std::uint64_t seed = 1;
  int workers = 1;
};

// Trial t samples a fresh d-regular graph and percolates it, both from the
// stream derive_seed(seed, t).
std::vector<PercolationTrial> run_percolation(const PercolationExperiment& e);

void write_percolation_csv(std::ostream& out, std::span<const PercolationTrial> trials);

}  // namespace metapotts
