#include <gtest/gtest.h>

#include <random>

#include "dcolor/linial.hpp"
#include "oracles.hpp"

using namespace dcolor;

namespace {

Graph make(const char* spec) { return generate_graph(parse_generator_spec(spec), 1); }

}  // namespace

TEST(Primes, SmallValues) {
  for (std::uint64_t x = 0; x < 2000; ++x) EXPECT_EQ(is_prime(x), oracle::prime(x)) << x;
}

TEST(Params, Examples) {
  const PolyParams p = linial_params(16, 3);
  EXPECT_EQ(p.q, 5u);
  EXPECT_EQ(p.d, 1);
  EXPECT_EQ(p.classes(), 25u);

  const PolyParams big = linial_params(std::uint64_t{1} << 20, 4);
  EXPECT_GT(big.q, static_cast<std::uint64_t>(big.d) * 4);
  EXPECT_TRUE(oracle::pow_at_least(big.q, big.d + 1, std::uint64_t{1} << 20));
  EXPECT_LT(big.classes(), std::uint64_t{1} << 20);

  const PolyParams free = linial_params(30, 0);
  EXPECT_EQ(free.d, 1);
  EXPECT_EQ(free.q, 7u);
}

TEST(Params, AgreeWithScan) {
  for (std::uint64_t K = 2; K < 3000; K += 7)
    for (std::uint64_t delta : {0u, 1u, 2u, 3u, 5u, 9u}) {
      const PolyParams p = linial_params(K, delta);
      const auto [q, d] = oracle::linial_q(K, delta);
      EXPECT_EQ(p.q, q) << K << " " << delta;
      EXPECT_EQ(p.d, d) << K << " " << delta;
    }
}

TEST(Params, FixpointAndLogStar) {
  for (std::uint64_t K : {2u, 17u, 64u, 1000u, 1u << 20})
    for (std::uint64_t delta : {1u, 2u, 3u, 8u}) EXPECT_EQ(linial_fixpoint(K, delta), oracle::linial_fixpoint(K, delta));
  for (std::uint64_t n : {1u, 2u, 3u, 4u, 5u, 16u, 17u, 65536u, 65537u}) EXPECT_EQ(log_star2(n), oracle::log_star2(n)) << n;
}

TEST(Step, EdgelessGraph) {
  const Graph g(5, std::vector<Edge>{});
  const std::vector<Color> c{0, 1, 2, 3, 4};
  const ColoringResult r = linial_step(g, c, 5, 0);
  EXPECT_EQ(r.stats.messages_sent, 0u);
  EXPECT_EQ(r.colors.size(), 5u);
  for (Color x : r.colors) EXPECT_LT(x, r.classes);
}

TEST(Step, SingleEdgeOverSmallField) {
  const Graph g = make("path,2");
  const std::vector<Color> c{0, 1};
  const ColoringResult r = linial_step(g, c, 2, 1);
  EXPECT_NE(r.colors[0], r.colors[1]);
  // p_0 = 0 and p_1 = 1 differ at a = 0, giving colors 0 and 1.
  EXPECT_EQ(r.colors[0], 0u);
  EXPECT_EQ(r.colors[1], 1u);
}

TEST(Step, ImproperInputRejected) {
  const Graph g = make("path,2");
  const std::vector<Color> c{1, 1};
  EXPECT_THROW(linial_step(g, c, 2, 1), Error);
}

TEST(Step, ProperOnAllTinyGraphs) {
  // every labelled graph on 5 nodes, ids as input
  const std::uint32_t pairs = 10;
  for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
    std::vector<Edge> edges;
    std::uint32_t bit = 0;
    for (NodeId u = 0; u < 5; ++u)
      for (NodeId v = u + 1; v < 5; ++v, ++bit)
        if (mask >> bit & 1) edges.push_back({u, v});
    const Graph g(5, edges);
    const std::vector<Color> c{0, 1, 2, 3, 4};
    const ColoringResult r = linial_step(g, c, 5, g.max_degree());
    ASSERT_TRUE(oracle::proper(g, r.colors)) << mask;
  }
}

TEST(Reduce, CliqueNeedsFourClasses) {
  const ColoringResult r = linial_reduce(make("clique,4"));
  EXPECT_TRUE(oracle::proper(make("clique,4"), r.colors));
  EXPECT_GE(r.classes, 4u);
}

TEST(Reduce, LongPath) {
  const Graph g = make("path,64");
  const ColoringResult r = linial_reduce(g);
  EXPECT_TRUE(oracle::proper(g, r.colors));
  EXPECT_LE(r.classes, 49u);
  EXPECT_LE(r.iterations, 5);
  EXPECT_EQ(r.stats.rounds, static_cast<std::uint64_t>(r.iterations));
}

TEST(Reduce, FixpointIsStable) {
  const Graph g = make("gnp,80,0.06");
  const ColoringResult r = linial_reduce(g);
  const ColoringResult again = linial_reduce(g, r.colors, r.classes, g.max_degree());
  EXPECT_EQ(again.iterations, 0);
  EXPECT_EQ(again.colors, r.colors);
  EXPECT_EQ(again.classes, r.classes);
}

TEST(Reduce, RandomGraphsStayWithinBounds) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const NodeId n = 2 + static_cast<NodeId>(rng() % 300);
    const Graph g = oracle::random_bounded_graph(n, 1 + static_cast<std::uint32_t>(rng() % 6), 0.05, rng);
    const ColoringResult r = linial_reduce(g);
    ASSERT_TRUE(oracle::proper(g, r.colors));
    EXPECT_LE(r.classes, oracle::linial_fixpoint(n, g.max_degree()));
    EXPECT_LE(r.iterations, oracle::log_star2(n) + 4);
    for (Color c : r.colors) EXPECT_LT(c, r.classes);
  }
}

TEST(Mis, EdgelessTakesEverything) {
  const Graph g(4, std::vector<Edge>{});
  const std::vector<Color> c{0, 0, 0, 0};
  EXPECT_EQ(mis_by_colors(g, c, 1).size(), 4u);
}

TEST(Mis, PathEndpoints) {
  const Graph g = make("path,3");
  const std::vector<Color> c{0, 1, 0};
  const MisResult r = mis_by_colors(g, c, 2);
  EXPECT_EQ(r.in_set, (std::vector<bool>{true, false, true}));
}

TEST(Mis, CliqueHasOneNode) {
  const Graph g = make("clique,4");
  const std::vector<Color> c{2, 0, 3, 1};
  const MisResult r = mis_by_colors(g, c, 4);
  EXPECT_EQ(r.size(), 1u);
  EXPECT_TRUE(r.in_set[1]);
}

TEST(Mis, RandomGraphsIndependentAndMaximal) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const NodeId n = 1 + static_cast<NodeId>(rng() % 60);
    const Graph g = oracle::random_bounded_graph(n, 1 + static_cast<std::uint32_t>(rng() % 5), 0.2, rng);
    const ColoringResult c = linial_reduce(g);
    const MisResult r = mis_by_colors(g, c.colors, c.classes);
    ASSERT_TRUE(oracle::independent(g, r.in_set));
    ASSERT_TRUE(oracle::maximal(g, r.in_set));
    if (g.max_degree() <= 3) EXPECT_GE(4 * r.size(), n);
  }
}
