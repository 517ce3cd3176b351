#include "metapotts/broadcast.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "metapotts/meanfield.hpp"
#include "metapotts/parallel.hpp"

namespace metapotts {

BroadcastKernel broadcast_kernel(const PottsParams& p, const ColourDistribution& mu) {
  if (mu.q() != p.q) throw std::invalid_argument("mu has the wrong number of colours");
  const int q = p.q;
  BroadcastKernel k;
  k.q = q;
  const auto nu = marginal_map(mu, p).first;
  k.prior.assign(nu.probs().begin(), nu.probs().end());
  k.matrix.resize(static_cast<std::size_t>(q * q));
  const double eb = std::exp(p.beta);
  for (int y = 0; y < q; ++y) {
    // Normaliser computed once per parent colour.
    const double norm = 1.0 + (eb - 1.0) * mu[y];
    for (int x = 0; x < q; ++x) k.matrix[y * q + x] = mu[x] * (x == y ? eb : 1.0) / norm;
  }
  return k;
}

std::uint64_t boundary_size(int d, int depth) {
  if (depth == 0) return 1;
  std::uint64_t size = static_cast<std::uint64_t>(d);
  for (int k = 1; k < depth; ++k) size *= static_cast<std::uint64_t>(d - 1);
  return size;
}

namespace {

void check_spec(const BroadcastSpec& spec) {
  if (spec.params.d < 2) throw std::invalid_argument("broadcast needs d >= 2");
  if (spec.depth < 0) throw std::invalid_argument("depth must be nonnegative");
  if (spec.mu.q() != spec.params.q) throw std::invalid_argument("mu has the wrong number of colours");
}

int children_at(int d, int level) { return level == 0 ? d : d - 1; }

}  // namespace

BroadcastSample broadcast_sample(const BroadcastSpec& spec, Rng& rng) {
  check_spec(spec);
  const BroadcastKernel k = broadcast_kernel(spec.params, spec.mu);
  const int q = k.q;
  BroadcastSample s;
  s.root = static_cast<Colour>(rng.categorical(k.prior, 1.0));
  Configuration level{s.root};
  for (int l = 0; l < spec.depth; ++l) {
    const int kids = children_at(spec.params.d, l);
    Configuration next;
    next.reserve(level.size() * static_cast<std::size_t>(kids));
    for (Colour y : level) {
      const std::span<const double> row(k.matrix.data() + y * q, static_cast<std::size_t>(q));
      for (int c = 0; c < kids; ++c) next.push_back(static_cast<Colour>(rng.categorical(row, 1.0)));
    }
    level = std::move(next);
  }
  s.leaves = std::move(level);
  return s;
}

ColourDistribution root_posterior(std::span<const Colour> leaves, const BroadcastSpec& spec) {
  check_spec(spec);
  const int q = spec.params.q;
  const int d = spec.params.d;
  if (leaves.size() != boundary_size(d, spec.depth)) {
    throw std::invalid_argument("boundary does not match the tree shape");
  }
  check_configuration(leaves, q);
  const BroadcastKernel k = broadcast_kernel(spec.params, spec.mu);

  // Upward messages, level by level, each normalised to sum 1.
  std::vector<double> msgs(leaves.size() * static_cast<std::size_t>(q), 0.0);
  for (std::size_t i = 0; i < leaves.size(); ++i) msgs[i * q + leaves[i]] = 1.0;
  for (int l = spec.depth - 1; l >= 0; --l) {
    const int kids = children_at(d, l);
    const std::size_t parents = msgs.size() / static_cast<std::size_t>(q * kids);
    std::vector<double> up(parents * static_cast<std::size_t>(q), 1.0);
    for (std::size_t a = 0; a < parents; ++a) {
      double* m = up.data() + a * q;
      for (int c = 0; c < kids; ++c) {
        const double* child = msgs.data() + (a * kids + c) * q;
        for (int y = 0; y < q; ++y) {
          double s = 0.0;
          for (int x = 0; x < q; ++x) s += k(y, x) * child[x];
          m[y] *= s;
        }
      }
      double total = 0.0;
      for (int y = 0; y < q; ++y) total += m[y];
      for (int y = 0; y < q; ++y) m[y] /= total;
    }
    msgs = std::move(up);
  }
  std::vector<double> post(static_cast<std::size_t>(q));
  if (spec.depth == 0) {
    post[leaves[0]] = 1.0;
  } else {
    for (int y = 0; y < q; ++y) post[y] = k.prior[y] * msgs[y];
  }
  return ColourDistribution::from_weights(std::move(post));
}

namespace {

/// Depth-first generator computing, for every boundary depth l >= level, the
/// normalised likelihood of the boundary at depth l given the colour of the
/// current vertex.
class StreamingTree {
 public:
  StreamingTree(const BroadcastKernel& k, int d, int depth)
      : k_(k), d_(d), depth_(depth), q_(k.q), buffers_(static_cast<std::size_t>(depth) + 1) {
    for (int l = 0; l <= depth; ++l) {
      buffers_[l].assign(static_cast<std::size_t>(depth - l + 1) * q_, 0.0);
    }
  }

  // Fills buffers_[level]: slot j holds the message for boundary depth level+j.
  void visit(int colour, int level, Rng& rng) {
    std::vector<double>& out = buffers_[level];
    std::fill(out.begin(), out.end(), 0.0);
    out[colour] = 1.0;
    if (level == depth_) return;
    for (std::size_t i = static_cast<std::size_t>(q_); i < out.size(); ++i) out[i] = 1.0;
    const std::span<const double> row(k_.matrix.data() + colour * q_, static_cast<std::size_t>(q_));
    const int kids = children_at(d_, level);
    for (int c = 0; c < kids; ++c) {
      visit(rng.categorical(row, 1.0), level + 1, rng);
      const std::vector<double>& child = buffers_[level + 1];
      for (int j = 1; j <= depth_ - level; ++j) {
        const double* cm = child.data() + (j - 1) * q_;
        double* m = out.data() + j * q_;
        double total = 0.0;
        for (int y = 0; y < q_; ++y) {
          double s = 0.0;
          for (int x = 0; x < q_; ++x) s += k_(y, x) * cm[x];
          m[y] *= s;
          total += m[y];
        }
        for (int y = 0; y < q_; ++y) m[y] /= total;
      }
    }
  }

  const std::vector<double>& root_messages() const { return buffers_[0]; }

 private:
  const BroadcastKernel& k_;
  int d_;
  int depth_;
  int q_;
  std::vector<std::vector<double>> buffers_;
};

}  // namespace

DecayCurve nonrec_curve(const BroadcastSpec& spec, std::uint64_t seed, int workers) {
  check_spec(spec);
  if (spec.samples < 2) throw std::invalid_argument("need at least 2 samples");
  const BroadcastKernel k = broadcast_kernel(spec.params, spec.mu);
  const int q = k.q;
  const int depth = spec.depth;
  const std::size_t width = static_cast<std::size_t>(depth) + 1;
  const auto samples = static_cast<std::size_t>(spec.samples);
  std::vector<double> dist(samples * width, 0.0);

  parallel_for(samples, workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    StreamingTree tree(k, spec.params.d, depth);
    const int root = rng.categorical(k.prior, 1.0);
    tree.visit(root, 0, rng);
    const auto& msgs = tree.root_messages();
    std::vector<double> post(static_cast<std::size_t>(q));
    for (std::size_t l = 0; l < width; ++l) {
      double total = 0.0;
      for (int c = 0; c < q; ++c) {
        post[c] = (l == 0 ? 1.0 : k.prior[c]) * msgs[l * q + c];
        total += post[c];
      }
      double s = 0.0;
      for (int c = 0; c < q; ++c) s += std::abs(post[c] / total - k.prior[c]);
      dist[i * width + l] = s;
    }
  });

  DecayCurve curve;
  curve.distance.assign(width, 0.0);
  curve.stderr_.assign(width, 0.0);
  const double n = static_cast<double>(samples);
  for (std::size_t l = 0; l < width; ++l) {
    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i) sum += dist[i * width + l];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double e = dist[i * width + l] - mean;
      ss += e * e;
    }
    // The jackknife standard error of a mean reduces to s / sqrt(n).
    curve.distance[l] = mean;
    curve.stderr_[l] = std::sqrt(ss / (n - 1.0) / n);
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const DecayCurve& curve) {
  out << "depth,distance,stderr\n";
  char buf[64];
  for (std::size_t l = 0; l < curve.distance.size(); ++l) {
    out << l;
    std::snprintf(buf, sizeof buf, ",%.17g", curve.distance[l]);
    out << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", curve.stderr_[l]);
    out << buf << '\n';
  }
}

std::size_t LocalPatternLaw::index(int colour, int same_children, int same_grandchildren) const {
  const int b_range = d * (d - 1) + 1;
  return static_cast<std::size_t>((colour * (d + 1) + same_children) * b_range + same_grandchildren);
}

namespace {

LocalPatternLaw empty_law(int q, int d) {
  LocalPatternLaw law{q, d, {}};
  law.probs.assign(static_cast<std::size_t>(q * (d + 1) * (d * (d - 1) + 1)), 0.0);
  return law;
}

}  // namespace

LocalPatternLaw broadcast_local_law(const PottsParams& p, const ColourDistribution& mu) {
  const int q = p.q;
  const int d = p.d;
  if (d < 2) throw std::invalid_argument("need d >= 2");
  const BroadcastKernel k = broadcast_kernel(p, mu);
  const int b_range = d * (d - 1) + 1;

  // Binomial(d-1, k(c,c)) laws of the matching grandchildren under a child c.
  std::vector<std::vector<double>> binom(static_cast<std::size_t>(q));
  for (int c = 0; c < q; ++c) {
    const double s = k(c, c);
    binom[c].assign(static_cast<std::size_t>(d), 0.0);
    double choose = 1.0;
    for (int j = 0; j < d; ++j) {
      binom[c][j] = choose * std::pow(s, j) * std::pow(1.0 - s, d - 1 - j);
      choose = choose * (d - 1 - j) / (j + 1);
    }
  }

  LocalPatternLaw law = empty_law(q, d);
  for (int r = 0; r < q; ++r) {
    // Joint law of (matching children, matching grandchildren) after adding
    // the children one at a time.
    std::vector<double> joint(static_cast<std::size_t>((d + 1) * b_range), 0.0);
    joint[0] = 1.0;
    for (int child = 0; child < d; ++child) {
      std::vector<double> next(joint.size(), 0.0);
      for (int a = 0; a <= child; ++a) {
        for (int b = 0; b <= child * (d - 1); ++b) {
          const double w = joint[a * b_range + b];
          if (w == 0.0) continue;
          for (int c = 0; c < q; ++c) {
            const double pc = w * k(r, c);
            const int a2 = a + (c == r ? 1 : 0);
            for (int j = 0; j < d; ++j) next[a2 * b_range + b + j] += pc * binom[c][j];
          }
        }
      }
      joint = std::move(next);
    }
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; b < b_range; ++b) law.probs[law.index(r, a, b)] = k.prior[r] * joint[a * b_range + b];
    }
  }
  return law;
}

LocalPatternLaw graph_local_law(const MultiGraph& g, std::span<const Colour> sigma, int q,
                                int samples, Rng& rng) {
  if (!g.is_regular()) throw std::invalid_argument("graph must be regular");
  if (sigma.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("configuration length must equal n");
  }
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  check_configuration(sigma, q);
  const int d = g.degree();
  LocalPatternLaw law = empty_law(q, d);
  for (int i = 0; i < samples; ++i) {
    const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.num_vertices())));
    int a = 0;
    int b = 0;
    const HalfEdge first = g.first_half_edge(v);
    for (HalfEdge h = first; h < first + static_cast<HalfEdge>(d); ++h) {
      const HalfEdge arrival = g.partner(h);
      const int u = g.owner(arrival);
      a += sigma[u] == sigma[v] ? 1 : 0;
      const HalfEdge ufirst = g.first_half_edge(u);
      for (HalfEdge h2 = ufirst; h2 < ufirst + static_cast<HalfEdge>(d); ++h2) {
        if (h2 == arrival) continue;
        b += sigma[g.owner(g.partner(h2))] == sigma[u] ? 1 : 0;
      }
    }
    law.probs[law.index(sigma[v], a, b)] += 1.0;
  }
  for (double& x : law.probs) x /= samples;
  return law;
}

double total_variation(const LocalPatternLaw& a, const LocalPatternLaw& b) {
  if (a.q != b.q || a.d != b.d) throw std::invalid_argument("pattern laws differ in shape");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * s;
}

}  // namespace metapotts
