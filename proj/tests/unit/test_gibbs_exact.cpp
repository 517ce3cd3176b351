#include <doctest.h>

#include <cmath>
#include <fstream>

#include "metapotts/gibbs_exact.hpp"
#include "oracles.hpp"

using namespace metapotts;

namespace {

MultiGraph load(const std::string& name) {
  std::ifstream in(oracle::data_path(name));
  return read_graph(in);
}

MultiGraph triangle() {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}};
  return MultiGraph::from_edges(3, e);
}

std::vector<std::pair<int, int>> edge_pairs(const MultiGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

// Dense P(i, j).
double entry(const SparseKernel& k, std::size_t i, std::size_t j) {
  for (std::size_t a = k.row_start[i]; a < k.row_start[i + 1]; ++a) {
    if (k.column[a] == j) return k.value[a];
  }
  return 0.0;
}

}  // namespace

TEST_CASE("hamiltonian counts monochromatic edges with multiplicity") {
  const MultiGraph tri = triangle();
  CHECK(hamiltonian(tri, Configuration{2, 2, 2}) == 3);
  CHECK(hamiltonian(tri, Configuration{0, 0, 1}) == 1);
  const std::vector<Edge> dbl{{0, 1}, {0, 1}};
  CHECK(hamiltonian(MultiGraph::from_edges(2, dbl), Configuration{1, 1}) == 2);
  const std::vector<Edge> loop{{0, 0}, {0, 1}};
  CHECK(hamiltonian(MultiGraph::from_edges(2, loop), Configuration{0, 1}) == 1);
}

TEST_CASE("partition functions by hand") {
  const double ln2 = std::log(2.0);
  const std::vector<Edge> single{{0, 1}};
  const ExactContext edge(MultiGraph::from_edges(2, single), {3, 1, ln2});
  CHECK(std::exp(edge.log_z()) == doctest::Approx(12.0).epsilon(1e-14));
  const ExactContext tri(triangle(), {3, 2, ln2});
  CHECK(std::exp(tri.log_z()) == doctest::Approx(66.0).epsilon(1e-14));
  for (const char* name : {"k4.txt", "prism.txt", "five_vertex.txt"}) {
    const ExactContext free(load(name), {4, 3, 0.0});
    CHECK(free.log_z() == doctest::Approx(free.graph().num_vertices() * std::log(4.0)).epsilon(1e-14));
  }
}

TEST_CASE("partition functions match plain recursion") {
  for (const char* name : {"k4.txt", "prism.txt", "five_vertex.txt", "triangle_pendant.txt"}) {
    const MultiGraph g = load(name);
    for (double beta : {0.3, 1.0, 2.5}) {
      const ExactContext ctx(g, {3, 3, beta});
      const double z = oracle::partition_function(g.num_vertices(), edge_pairs(g), 3, beta);
      CHECK(ctx.log_z() == doctest::Approx(std::log(z)).epsilon(1e-13));
    }
  }
}

TEST_CASE("restricted partition functions add up") {
  const MultiGraph g = load("prism.txt");
  const ExactContext ctx(g, {3, 3, 1.2});
  const PhaseSpec para = PhaseSpec::para(3, 0.4);
  std::vector<std::vector<bool>> pieces{phase_states(ctx, para)};
  for (int k = 0; k < 3; ++k) {
    std::vector<double> target(3, 0.1);
    target[k] = 0.8;
    pieces.push_back(phase_states(ctx, PhaseSpec::ferro(ColourDistribution(target), 0.4, false)));
  }
  std::vector<bool> rest(ctx.num_states(), true);
  for (const auto& piece : pieces) {
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (piece[i]) {
        REQUIRE(rest[i]);  // pieces are disjoint at these eps
        rest[i] = false;
      }
    }
  }
  pieces.push_back(rest);
  double total = 0.0;
  for (const auto& piece : pieces) {
    const double lz = log_partition_function(ctx, piece);
    if (std::isfinite(lz)) total += std::exp(lz - ctx.log_z());
  }
  CHECK(std::abs(std::log(total)) < 1e-12);

  // Restricted value against plain recursion with the same predicate.
  const double z_para = oracle::partition_function(6, edge_pairs(g), 3, 1.2, [](const std::vector<int>& c) {
    double dev = 0.0;
    for (int k = 0; k < 3; ++k) dev += std::abs(std::count(c.begin(), c.end(), k) - 2.0);
    return dev < 0.4 * 6;
  });
  CHECK(log_partition_function(ctx, para) == doctest::Approx(std::log(z_para)).epsilon(1e-13));
}

TEST_CASE("conditional marginals") {
  const ExactContext k4(load("k4.txt"), {3, 3, 1.3});
  const PartialConfiguration free(4, kFree);
  for (int v = 0; v < 4; ++v) {
    const auto m = marginal(k4, v, free);
    for (int c = 0; c < 3; ++c) CHECK(m[c] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  const std::vector<Edge> single{{0, 1}};
  const ExactContext edge(MultiGraph::from_edges(2, single), {3, 1, std::log(2.0)});
  const auto m = marginal(edge, 1, PartialConfiguration{0, kFree});
  CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m[2] == doctest::Approx(0.25).epsilon(1e-14));

  const ExactContext cold(load("prism.txt"), {3, 3, 0.0});
  const auto flat = marginal(cold, 0, PartialConfiguration{kFree, 1, 2, 0, 1, kFree});
  for (int c = 0; c < 3; ++c) CHECK(flat[c] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(marginal(edge, 1, PartialConfiguration{0, kFree}, std::vector<bool>(9, false)),
                  std::invalid_argument);
}

TEST_CASE("marginals are equivariant under colour permutations") {
  const ExactContext ctx(load("five_vertex.txt"), {3, 0, 0.9});
  const int perm[3] = {2, 0, 1};
  const PartialConfiguration boundary{1, kFree, kFree, 2, kFree};
  PartialConfiguration moved = boundary;
  for (int& c : moved) {
    if (c != kFree) c = perm[c];
  }
  for (int v : {1, 2, 4}) {
    const auto a = marginal(ctx, v, boundary);
    const auto b = marginal(ctx, v, moved);
    for (int c = 0; c < 3; ++c) CHECK(a[c] == doctest::Approx(b[perm[c]]).epsilon(1e-13));
  }
}

TEST_CASE("glauber kernel: update law, rows, detailed balance, stationarity") {
  // Centre of a star whose leaves carry (0, 0, 1).
  const std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}};
  const ExactContext sctx(MultiGraph::from_edges(4, star), {3, 0, std::log(2.0)});
  const SparseKernel sk = glauber_kernel(sctx);
  const std::size_t base = sctx.encode(Configuration{2, 0, 0, 1});
  const double law[3] = {4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0};
  for (int c = 0; c < 2; ++c) {
    const std::size_t to = sctx.encode(Configuration{static_cast<Colour>(c), 0, 0, 1});
    CHECK(4.0 * entry(sk, base, to) == doctest::Approx(law[c]).epsilon(1e-14));
  }

  for (const char* name : {"k4.txt", "prism.txt", "five_vertex.txt"}) {
    const ExactContext ctx(load(name), {3, 3, 1.7});
    const SparseKernel k = glauber_kernel(ctx);
    const auto& mu = ctx.probabilities();
    double worst_row = 0.0;
    double worst_balance = 0.0;
    for (std::size_t i = 0; i < ctx.num_states(); ++i) {
      double row = 0.0;
      for (std::size_t a = k.row_start[i]; a < k.row_start[i + 1]; ++a) {
        row += k.value[a];
        const std::size_t j = k.column[a];
        worst_balance = std::max(worst_balance, std::abs(mu[i] * k.value[a] - mu[j] * entry(k, j, i)));
      }
      worst_row = std::max(worst_row, std::abs(row - 1.0));
    }
    CHECK(worst_row < 1e-12);
    CHECK(worst_balance < 1e-12);
    const auto moved = k.left_multiply(mu);
    double worst_stat = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) worst_stat = std::max(worst_stat, std::abs(moved[i] - mu[i]));
    CHECK(worst_stat < 1e-12);
  }
}

TEST_CASE("bottleneck ratio") {
  const ExactContext ctx(load("k4.txt"), {3, 3, 2.0});
  const SparseKernel k = glauber_kernel(ctx);
  CHECK(bottleneck(ctx, k, std::vector<bool>(ctx.num_states(), true)) == 0.0);

  const std::vector<double> target{0.8, 0.1, 0.1};
  const auto s = phase_states(ctx, PhaseSpec::ferro(ColourDistribution(target), 0.5, true));
  std::vector<bool> complement(s.size());
  double ms = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    complement[i] = !s[i];
    if (s[i]) ms += ctx.probabilities()[i];
  }
  const double phi = bottleneck(ctx, k, s);
  CHECK(phi > 0.0);
  CHECK(phi * ms == doctest::Approx(bottleneck(ctx, k, complement) * (1.0 - ms)).epsilon(1e-12));
  CHECK_THROWS_AS(bottleneck(ctx, k, std::vector<bool>(ctx.num_states(), false)), std::invalid_argument);
}

TEST_CASE("escape bound ||mu_S P^t - mu_S|| <= t Phi(S)") {
  struct Case {
    const char* graph;
    double beta;
    bool ferro;
    double eps;
  };
  for (const Case& c : {Case{"k4.txt", 2.0, true, 0.5}, Case{"k4.txt", 0.8, false, 0.6},
                        Case{"prism.txt", 1.5, true, 0.3}, Case{"prism.txt", 0.5, false, 0.5}}) {
    const ExactContext ctx(load(c.graph), {3, 3, c.beta});
    const SparseKernel k = glauber_kernel(ctx);
    const PhaseSpec spec = c.ferro ? PhaseSpec::ferro(ColourDistribution({0.8, 0.1, 0.1}), c.eps, true)
                                   : PhaseSpec::para(3, c.eps);
    const auto s = phase_states(ctx, spec);
    const double phi = bottleneck(ctx, k, s);
    const auto tv = tv_evolution(ctx, k, s, 200);
    CHECK(tv[0] == 0.0);
    for (int t = 0; t <= 200; ++t) CHECK(tv[t] <= t * phi + 1e-12);
    for (int t = 1; t <= 200; ++t) CHECK(tv[t] >= tv[t - 1] - 1e-12);
  }
}

TEST_CASE("state cap") {
  CHECK_THROWS_AS(ExactContext(load("prism.txt"), {3, 3, 1.0}, 700), std::invalid_argument);
  CHECK_NOTHROW(ExactContext(load("prism.txt"), {3, 3, 1.0}, 729));
}

TEST_CASE("Nishimori identity holds exactly on tiny instances") {
  CHECK(nishimori_check(2, 3, {3, 3, std::log(2.0)}, PhaseSpec::para(3, 0.9)).tv < 1e-12);
  const auto r = nishimori_check(4, 3, {3, 3, 1.0}, PhaseSpec::ferro(ColourDistribution({0.5, 0.25, 0.25}), 0.5, false));
  CHECK(r.tv < 1e-12);
  CHECK(r.pairings == 10395);
  CHECK(r.configurations == 81);
  CHECK(nishimori_check(4, 3, {3, 3, 0.0}, PhaseSpec::para(3, 0.5)).tv < 1e-12);
  CHECK_THROWS_AS(nishimori_check(6, 3, {3, 3, 1.0}, PhaseSpec::para(3, 0.5)), std::invalid_argument);
}
