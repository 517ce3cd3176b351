#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "metapotts/meanfield.hpp"
#include "metapotts/rgraph.hpp"
#include "oracles.hpp"

using namespace metapotts;

namespace {

std::vector<int> degrees(const MultiGraph& g) {
  std::vector<int> deg(static_cast<std::size_t>(g.num_vertices()), 0);
  for (const Edge& e : g.edges()) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

// Random symmetric rho with row sums nu, from random positive weights.
std::pair<ColourDistribution, EdgeDistribution> random_stats(int q, Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(q * q));
  double total = 0.0;
  for (int s = 0; s < q; ++s) {
    for (int t = s; t < q; ++t) {
      const double x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
      w[s * q + t] = w[t * q + s] = x;
      total += s == t ? x : 2 * x;
    }
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  for (double& x : w) x /= total;
  std::vector<double> nu(static_cast<std::size_t>(q), 0.0);
  for (int s = 0; s < q; ++s)
    for (int t = 0; t < q; ++t) nu[s] += w[s * q + t];
  return {ColourDistribution::from_weights(nu), EdgeDistribution(q, w)};
}

}  // namespace

TEST_CASE("sample_regular builds d-regular multigraphs") {
  const MultiGraph two = sample_regular(2, 3, 11);
  CHECK(two.num_edges() == 3);
  CHECK(degrees(two) == std::vector<int>{3, 3});
  const MultiGraph four = sample_regular(4, 3, 12);
  CHECK(four.num_edges() == 6);
  CHECK(degrees(four) == std::vector<int>{3, 3, 3, 3});
  CHECK(four.is_regular());
  CHECK(four.degree() == 3);
  for (HalfEdge h = 0; h < four.num_half_edges(); ++h) {
    CHECK(four.partner(h) != h);
    CHECK(four.partner(four.partner(h)) == h);
    CHECK(four.owner(h) == static_cast<int>(h / 3));
  }
}

TEST_CASE("sample_regular rejects invalid sizes") {
  CHECK_THROWS_AS(sample_regular(5, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_regular(4, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_regular(0, 3, 1), std::invalid_argument);
}

TEST_CASE("sample_regular is deterministic in the seed") {
  CHECK(sample_regular(100, 3, 5).pairing() == sample_regular(100, 3, 5).pairing());
  CHECK(sample_regular(100, 3, 5).pairing() != sample_regular(100, 3, 6).pairing());
}

TEST_CASE("for_each_pairing enumerates (m-1)!! distinct matchings") {
  std::map<std::vector<HalfEdge>, int> seen;
  for_each_pairing(12, [&](std::span<const HalfEdge> p) {
    std::vector<HalfEdge> v(p.begin(), p.end());
    for (std::size_t h = 0; h < v.size(); ++h) REQUIRE(v[v[h]] == h);
    seen[v]++;
  });
  CHECK(seen.size() == 10395);
  int count = 0;
  for_each_pairing(0, [&](std::span<const HalfEdge>) { ++count; });
  CHECK(count == 1);
}

TEST_CASE("pairing model is uniform over all 10395 matchings at n=4, d=3") {
  std::map<std::vector<HalfEdge>, std::size_t> index;
  for_each_pairing(12, [&](std::span<const HalfEdge> p) {
    index.emplace(std::vector<HalfEdge>(p.begin(), p.end()), index.size());
  });
  REQUIRE(index.size() == 10395);
  const int samples = 1000000;
  std::vector<double> observed(index.size(), 0.0);
  Rng rng(2024);
  for (int i = 0; i < samples; ++i) {
    const MultiGraph g = sample_regular(4, 3, rng);
    observed[index.at(g.pairing())] += 1.0;
  }
  const std::vector<double> expected(index.size(), static_cast<double>(samples) / index.size());
  CHECK(oracle::chi_square_pvalue(observed, expected) > 0.001);
}

TEST_CASE("graph text format round-trips") {
  const MultiGraph g = sample_regular(10, 3, 3);
  std::stringstream buffer;
  write_graph(buffer, g);
  const MultiGraph back = read_graph(buffer);
  CHECK(back.num_vertices() == 10);
  CHECK(back.edges() == g.edges());
  std::ifstream five(oracle::data_path("five_vertex.txt"));
  const MultiGraph multi = read_graph(five);
  CHECK(multi.num_vertices() == 5);
  CHECK_FALSE(multi.is_regular());
  CHECK(multi.vertex_degree(4) == 4);  // parallel edge plus a self-loop
  std::stringstream bad("3 3\n0 1\n");
  CHECK_THROWS_AS(read_graph(bad), std::invalid_argument);
}

TEST_CASE("round_statistics on the paramagnetic statistics at beta = ln 2") {
  const PottsParams p{3, 3, std::log(2.0)};
  const auto [nu, rho] = marginal_map(ColourDistribution::uniform(3), p);
  const IntegerStatistics s = round_statistics(nu, rho, 12, 3);
  CHECK(s.vertex_counts == std::vector<long long>{4, 4, 4});
  // d n rho = 36 rho: 6 oriented monochromatic pairs per colour (3 edges) and
  // 3 edges between each pair of colours.
  for (int a = 0; a < 3; ++a) {
    CHECK(s.edges(a, a) == 3);
    CHECK((2 * s.edges(a, a)) % 2 == 0);
    for (int b = 0; b < 3; ++b) {
      if (a != b) CHECK(s.edges(a, b) == 3);
    }
  }
}

TEST_CASE("round_statistics degenerate one-colour case") {
  const ColourDistribution nu({1.0, 0.0, 0.0});
  std::vector<double> r(9, 0.0);
  r[0] = 1.0;
  const IntegerStatistics s = round_statistics(nu, EdgeDistribution(3, r), 4, 3);
  CHECK(s.vertex_counts == std::vector<long long>{4, 0, 0});
  CHECK(s.edges(0, 0) == 6);
  CHECK(std::accumulate(s.edge_counts.begin(), s.edge_counts.end(), 0LL) == 6);
}

TEST_CASE("round_statistics rejects infeasible input") {
  const ColourDistribution nu = ColourDistribution::uniform(3);
  const EdgeDistribution rho = EdgeDistribution::product(nu);
  CHECK_THROWS_AS(round_statistics(nu, rho, 5, 3), std::invalid_argument);
  const ColourDistribution other({0.5, 0.25, 0.25});
  CHECK_THROWS_AS(round_statistics(other, rho, 6, 3), std::invalid_argument);
}

TEST_CASE("round_statistics property: feasible, close to targets, planted round trip") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int q = 2 + static_cast<int>(rng.below(5));
    const int d = 3 + static_cast<int>(rng.below(4));
    int n = 1 + static_cast<int>(rng.below(400));
    if ((n * d) % 2 != 0) ++n;
    const auto [nu, rho] = random_stats(q, rng);
    const IntegerStatistics s = round_statistics(nu, rho, n, d);
    CHECK_NOTHROW(s.check_feasible());
    CHECK(s.n() == n);
    for (int a = 0; a < q; ++a) {
      CHECK(std::abs(s.vertex_counts[a] - n * nu[a]) <= q);
      CHECK(std::abs(2.0 * s.edges(a, a) - static_cast<double>(n) * d * rho(a, a)) <= 2.0 * q * q);
      for (int b = 0; b < q; ++b) {
        if (a != b) CHECK(std::abs(s.edges(a, b) - static_cast<double>(n) * d * rho(a, b)) <= q * q);
      }
    }
    const PlantedSample planted = sample_planted(s, rng);
    CHECK(realized_statistics(planted.graph, planted.sigma, q) == s);
    const auto [enu, erho] = empirical_stats(planted.graph, planted.sigma, q);
    for (int a = 0; a < q; ++a) {
      CHECK(std::abs(enu[a] - nu[a]) <= static_cast<double>(q * q) / n);
      for (int b = 0; b < q; ++b) CHECK(std::abs(erho(a, b) - rho(a, b)) <= static_cast<double>(q * q) / n);
    }
  }
}

TEST_CASE("sample_planted is uniform over the (pairing, sigma) pairs realising the counts") {
  IntegerStatistics s;
  s.q = 2;
  s.d = 3;
  s.vertex_counts = {2, 2};
  s.edge_counts = {1, 4, 4, 1};
  s.check_feasible();

  // Support from enumeration: every pairing and every sigma with the counts.
  std::map<std::pair<std::vector<HalfEdge>, Configuration>, std::size_t> index;
  for_each_pairing(12, [&](std::span<const HalfEdge> p) {
    const MultiGraph g = MultiGraph::from_pairing(4, 3, std::vector<HalfEdge>(p.begin(), p.end()));
    for (int mask = 0; mask < 16; ++mask) {
      Configuration sigma(4);
      for (int v = 0; v < 4; ++v) sigma[v] = static_cast<Colour>((mask >> v) & 1);
      if (realized_statistics(g, sigma, 2) == s) {
        index.emplace(std::make_pair(g.pairing(), sigma), index.size());
      }
    }
  });
  REQUIRE(index.size() > 100);
  const int samples = 400000;
  std::vector<double> observed(index.size(), 0.0);
  Rng rng(99);
  for (int i = 0; i < samples; ++i) {
    const PlantedSample ps = sample_planted(s, rng);
    const auto it = index.find({ps.graph.pairing(), ps.sigma});
    REQUIRE(it != index.end());
    observed[it->second] += 1.0;
  }
  const std::vector<double> expected(index.size(), static_cast<double>(samples) / index.size());
  CHECK(oracle::chi_square_pvalue(observed, expected) > 0.001);
}

TEST_CASE("empirical_stats examples") {
  const MultiGraph g = sample_regular(6, 3, 1);
  const Configuration mono(6, 1);
  const auto [nu, rho] = empirical_stats(g, mono, 3);
  CHECK(nu[1] == 1.0);
  CHECK(rho(1, 1) == 1.0);

  const std::vector<Edge> single{{0, 1}};
  const MultiGraph edge = MultiGraph::from_edges(2, single);
  const auto [nu2, rho2] = empirical_stats(edge, Configuration{0, 1}, 2);
  CHECK(rho2(0, 1) == 0.5);
  CHECK(rho2(1, 0) == 0.5);
  CHECK(rho2(0, 0) == 0.0);

  const std::vector<Edge> tri{{0, 1}, {1, 2}, {2, 0}};
  const MultiGraph triangle = MultiGraph::from_edges(3, tri);
  const auto [nu3, rho3] = empirical_stats(triangle, Configuration{0, 0, 1}, 3);
  CHECK(nu3[0] == doctest::Approx(2.0 / 3.0));
  CHECK(nu3[1] == doctest::Approx(1.0 / 3.0));
  CHECK(nu3[2] == 0.0);
  CHECK(rho3(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(rho3(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(rho3(1, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(rho3(1, 1) == 0.0);

  // A self-loop contributes both of its ends to (s, s).
  const std::vector<Edge> loop{{0, 0}, {0, 1}};
  const MultiGraph looped = MultiGraph::from_edges(2, loop);
  const auto [nu4, rho4] = empirical_stats(looped, Configuration{0, 1}, 2);
  CHECK(rho4(0, 0) == doctest::Approx(0.5));
  CHECK(rho4(0, 1) == doctest::Approx(0.25));
}

TEST_CASE("row sums of rho^{G,sigma} equal nu^sigma") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const MultiGraph g = sample_regular(20 + 2 * trial, 3, rng);
    Configuration sigma(static_cast<std::size_t>(g.num_vertices()));
    for (auto& c : sigma) c = static_cast<Colour>(rng.below(4));
    const auto [nu, rho] = empirical_stats(g, sigma, 4);
    CHECK(rho.row_sum_defect(nu) < 1e-15);
  }
}

TEST_CASE("overlap matrices") {
  const Configuration a{0, 1, 2, 2, 1, 0, 0, 0};
  const auto same = overlap(a, a, 3);
  CHECK(same[0] == 0.5);
  CHECK(same[4] == 0.25);
  CHECK(same[8] == 0.25);
  CHECK(same[1] == 0.0);

  Configuration b = a;
  for (auto& c : b) c = static_cast<Colour>((c + 1) % 3);
  const auto shifted = overlap(a, b, 3);
  CHECK(shifted[0 * 3 + 1] == 0.5);
  CHECK(shifted[1 * 3 + 2] == 0.25);
  CHECK(shifted[2 * 3 + 0] == 0.25);

  Rng rng(8);
  Configuration x(1000000);
  Configuration y(1000000);
  for (auto& c : x) c = static_cast<Colour>(rng.below(3));
  for (auto& c : y) c = static_cast<Colour>(rng.below(3));
  for (double v : overlap(x, y, 3)) CHECK(std::abs(v - 1.0 / 9.0) < 0.003);

  CHECK_THROWS_AS(overlap(a, Configuration{0}, 3), std::invalid_argument);
}

TEST_CASE("components") {
  const MultiGraph g = sample_regular(30, 3, 4);
  const auto none = components(g, EdgeMask(g.num_edges(), false));
  CHECK(none.sizes.size() == 30);
  CHECK(none.sum_squares_rest == 29);

  const std::vector<Edge> path{{0, 1}, {1, 2}};
  const MultiGraph p = MultiGraph::from_edges(3, path);
  const auto all = components(p, EdgeMask{true, true});
  CHECK(all.sizes == std::vector<int>{3});
  CHECK(all.edges == std::vector<long long>{2});
  const auto first = components(p, EdgeMask{true, false});
  CHECK(first.sizes == std::vector<int>{2, 1});
  CHECK(first.sum_squares_rest == 1);

  // Sizes partition the vertex set for random masks.
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    EdgeMask mask(g.num_edges());
    for (std::size_t e = 0; e < mask.size(); ++e) mask[e] = rng.uniform() < 0.5;
    const auto c = components(g, mask);
    CHECK(std::accumulate(c.sizes.begin(), c.sizes.end(), 0) == 30);
    CHECK(std::is_sorted(c.sizes.rbegin(), c.sizes.rend()));
    long long kept = std::count(mask.begin(), mask.end(), true);
    CHECK(std::accumulate(c.edges.begin(), c.edges.end(), 0LL) == kept);
  }
}

TEST_CASE("log_pairing_rate") {
  const ColourDistribution nu({0.2, 0.3, 0.5});
  CHECK(log_pairing_rate(nu, EdgeDistribution::product(nu), 3) == doctest::Approx(0.0).epsilon(1e-15));
  const ColourDistribution half = ColourDistribution::uniform(2);
  const EdgeDistribution diag(2, {0.5, 0.0, 0.0, 0.5});
  CHECK(log_pairing_rate(half, diag, 3) == doctest::Approx(-1.5 * std::log(2.0)).epsilon(1e-14));
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto [n2, r2] = random_stats(2 + static_cast<int>(rng.below(4)), rng);
    CHECK(log_pairing_rate(n2, r2, 3) <= 1e-14);
  }
}
