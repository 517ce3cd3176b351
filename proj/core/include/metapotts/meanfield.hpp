#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "metapotts/rgraph.hpp"
#include "metapotts/rng.hpp"
#include "metapotts/types.hpp"

namespace metapotts {

struct Thresholds {
  double beta_u = 0.0;  // uniqueness
  double beta_c = 0.0;  // ordered/disordered
  double beta_h = 0.0;  // paramagnetic stability (tree broadcasting)
};

// g(y) = (y-1)(y^{d-1}+q-1)/(y^{d-1}-y) for y > 1; e^beta - 1 = g(t) is the
// equation of the symmetric ferromagnetic fixed points.
double ferro_curve(int q, int d, double y);

// Minimiser of ferro_curve over y > 1 (golden-section search).
double ferro_curve_argmin(int q, int d);

// Requires q >= 3 and d >= 3.
Thresholds thresholds(int q, int d);

// One application of the constant BP map
//   mu(c) -> (1+(e^beta-1)mu(c))^{d-1} / sum_chi (1+(e^beta-1)mu(chi))^{d-1}.
ColourDistribution bp_map(const ColourDistribution& mu, const PottsParams& p);

// Max-norm distance between mu and bp_map(mu).
double bp_residual(const ColourDistribution& mu, const PottsParams& p);

// Spectral radius of the Jacobian of bp_map at mu.
double bp_jacobian_radius(const ColourDistribution& mu, const PottsParams& p);

enum class FixedPointKind { para, ferro, other };

const char* to_string(FixedPointKind kind);

struct FixedPointReport {
  ColourDistribution mu;
  double residual = 0.0;
  bool stable = false;
  double jacobian_radius = 0.0;
  double bethe_value = 0.0;
  FixedPointKind kind = FixedPointKind::other;
};

/// Symmetric ferromagnetic solution with dominant colour 0.
struct FerroSolution {
  double t = 0.0;  // (1+w x)/(1+w (1-x)/(q-1)), w = e^beta - 1
  double x = 0.0;  // mu(0)
  ColourDistribution mu;
};

// Largest-x ferromagnetic fixed point, or nullopt when beta <= beta_u.
std::optional<FerroSolution> ferro_fixed_point(const PottsParams& p);

// Paramagnetic report first, then the ferromagnetic one if it exists. The
// smaller, unstable ferromagnetic root is not reported.
std::vector<FixedPointReport> solve_fixed_points(const PottsParams& p);

// Bethe free energy of a constant message mu:
//   log sum_c (1+w mu(c))^d - (d/2) log(1 + w sum_c mu(c)^2).
double bethe(const ColourDistribution& mu, const PottsParams& p);

// (nu^mu, rho^mu): expected vertex and edge colour statistics of the pure
// state described by mu. The row sums of rho^mu equal nu^mu when mu is a
// fixed point, not in general.
std::pair<ColourDistribution, EdgeDistribution> marginal_map(const ColourDistribution& mu,
                                                             const PottsParams& p);

// First moment exponent
//   (d-1) sum nu log nu - (d/2) sum_{s,t} rho log rho + (d beta/2) sum_s rho(s,s),
// the second sum running over ordered pairs. Throws if the row sums of rho
// differ from nu by more than 1e-9.
double first_moment_rate(const ColourDistribution& nu, const EdgeDistribution& rho,
                         const PottsParams& p);

/// Joint law r(s, s', t, t') of the colours of an edge (s,t) under two
/// configurations (s', t'). Stored row-major in (s, s', t, t').
class OverlapTensor {
 public:
  OverlapTensor() = default;
  OverlapTensor(int q, std::vector<double> values);

  // r = rho (x) rho, i.e. r(s,s',t,t') = rho(s,t) rho(s',t').
  static OverlapTensor product(const EdgeDistribution& rho);

  int q() const { return q_; }
  double operator()(int s, int s2, int t, int t2) const {
    return values_[static_cast<std::size_t>(((s * q_ + s2) * q_ + t) * q_ + t2)];
  }
  std::span<const double> values() const { return values_; }

  // Largest violation of symmetry and of the two pair-marginal constraints
  // sum_{s',t'} r(s,s',t,t') = rho(s,t) = sum_{s,t} r(s',s,t',t).
  double constraint_defect(const EdgeDistribution& rho) const;

 private:
  int q_ = 0;
  std::vector<double> values_;
};

// Second moment exponent
//   (d-1) sum omega log omega - (d/2) sum r log r
//     + (d beta/2) sum (1{s=t} + 1{s'=t'}) r(s,s',t,t'),
// omega(s,s') = sum_{t,t'} r(s,s',t,t'). Throws if r violates its constraints
// by more than 1e-9.
double second_moment_rate(const EdgeDistribution& rho, const OverlapTensor& r,
                          const PottsParams& p);

/// Messages on the directed edges of a graph, indexed by half-edge: entry h is
/// the message from owner(h) to the vertex across h.
struct MessageSet {
  int q = 0;
  std::vector<double> values;  // num_half_edges x q

  static MessageSet uniform(const MultiGraph& g, int q);
  static MessageSet random(const MultiGraph& g, int q, Rng& rng);

  std::span<const double> at(HalfEdge h) const {
    return {values.data() + static_cast<std::size_t>(h) * q, static_cast<std::size_t>(q)};
  }
};

struct GraphBpResult {
  MessageSet messages;
  double bethe_value = 0.0;
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0;
};

// Damped synchronous BP: new = damping * old + (1 - damping) * update, until
// the max-norm change drops below tol. The Bethe value of the final messages
// is always filled in.
GraphBpResult graph_bp(const MultiGraph& g, const PottsParams& p, MessageSet init,
                       double damping = 0.5, int max_iters = 10000, double tol = 1e-12);

// Graph Bethe functional, normalised by 1/n.
double bethe_graph(const MultiGraph& g, const PottsParams& p, const MessageSet& messages);

}  // namespace metapotts
