#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dcolor/congest.hpp"
#include "dcolor/rational.hpp"

using namespace dcolor;

namespace {

Graph make(const char* spec) { return generate_graph(parse_generator_spec(spec), 1); }

struct ExchangeOnce {
  std::uint64_t got = 0;
  StepStatus step(const StepContext& ctx, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (ctx.round == 1) {
      for (NodeId u : ctx.neighbors) out.push_back({u, BitWriter().put(ctx.self + 40, 8).finish()});
      return StepStatus::running;
    }
    for (const Envelope& e : inbox) got = BitReader(e.msg).get(8);
    return StepStatus::halted;
  }
};

struct Chatty {
  std::size_t bits = 0;
  StepStatus step(const StepContext& ctx, std::span<const Envelope>, std::vector<Envelope>& out) {
    BitWriter w;
    for (std::size_t i = 0; i < bits; ++i) w.put(1, 1);
    for (NodeId u : ctx.neighbors) out.push_back({u, w.finish()});
    return StepStatus::halted;
  }
};

/// Node 0 floods; a node echoes once all its other neighbors have echoed.
struct FloodEcho {
  bool root = false;
  std::optional<NodeId> parent;
  bool flooded = false;
  std::size_t pending = 0;
  bool done = false;
  StepStatus step(const StepContext& ctx, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (root && ctx.round == 1) {
      flooded = true;
      pending = ctx.neighbors.size();
      for (NodeId u : ctx.neighbors) out.push_back({u, BitWriter().put(0, 1).finish()});
      return StepStatus::running;
    }
    for (const Envelope& e : inbox) {
      const auto kind = BitReader(e.msg).get(1);
      if (kind == 0 && !flooded) {
        flooded = true;
        parent = e.peer;
        pending = ctx.neighbors.size() - 1;
        for (NodeId u : ctx.neighbors)
          if (u != e.peer) out.push_back({u, BitWriter().put(0, 1).finish()});
      } else if (kind == 1) {
        --pending;
      }
    }
    if (flooded && pending == 0 && !done) {
      done = true;
      if (parent) out.push_back({*parent, BitWriter().put(1, 1).finish()});
      return StepStatus::halted;
    }
    return StepStatus::running;
  }
};

}  // namespace

TEST(Bits, WriterReaderRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    BitWriter w;
    std::vector<std::pair<std::uint64_t, int>> fields;
    std::size_t total = 0;
    for (int i = 0; i < 6; ++i) {
      const int width = static_cast<int>(rng() % 64) + 1;
      const std::uint64_t v = width == 64 ? rng() : rng() & ((std::uint64_t{1} << width) - 1);
      fields.emplace_back(v, width);
      w.put(v, width);
      total += static_cast<std::size_t>(width);
    }
    const Message m = w.finish();
    EXPECT_EQ(m.bit_len, total);
    BitReader r(m);
    for (const auto& [v, width] : fields) EXPECT_EQ(r.get(width), v);
  }
}

TEST(Bits, RationalMessageRoundTrip) {
  const std::vector<Rational> values{make_rational(-7, 3), make_rational(0), ratio(UInt128{1} << 100, 3)};
  std::uint32_t tag = 0;
  const Message m = make_rational_message(values, 5, 4);
  EXPECT_EQ(m.category, Category::aggregation);
  EXPECT_EQ(read_rational_message(m, values.size(), 4, &tag), values);
  EXPECT_EQ(tag, 5u);
}

TEST(Engine, TwoNodeExchange) {
  const Graph g = make("path,2");
  std::vector<ExchangeOnce> p(2);
  const RunStats s = run_protocol(g, std::span(p));
  EXPECT_EQ(s.rounds, 1u);
  EXPECT_EQ(s.messages_sent, 2u);
  EXPECT_EQ(p[0].got, 41u);
  EXPECT_EQ(p[1].got, 40u);
}

TEST(Engine, StrictBandwidthNamesRoundAndEdge) {
  const Graph g = make("path,16");
  std::vector<Chatty> p(16, Chatty{10 * 4});
  RunOptions o;
  o.policy = BandwidthPolicy::strict_with(4);
  try {
    run_protocol(g, std::span(p), o);
    FAIL() << "expected BandwidthViolation";
  } catch (const BandwidthViolation& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("round 1"), std::string::npos) << what;
    EXPECT_NE(what.find("0->1"), std::string::npos) << what;
  }
  std::vector<Chatty> q(16, Chatty{16});
  EXPECT_NO_THROW(run_protocol(g, std::span(q), o));
}

TEST(Engine, MeasurePolicyRecordsLargeMessages) {
  const Graph g = make("path,16");
  std::vector<Chatty> p(16, Chatty{100});
  const RunStats s = run_protocol(g, std::span(p));
  EXPECT_EQ(s.max_msg_bits[0], 100u);
}

TEST(Engine, FloodEchoOnPath) {
  const Graph g = make("path,5");
  std::vector<FloodEcho> p(5);
  p[0].root = true;
  const RunStats s = run_protocol(g, std::span(p));
  EXPECT_EQ(s.rounds, 8u);
}

TEST(Engine, RoundCapIsEnforced) {
  struct Forever {
    StepStatus step(const StepContext&, std::span<const Envelope>, std::vector<Envelope>&) {
      return StepStatus::running;
    }
  };
  const Graph g = make("path,3");
  std::vector<Forever> p(3);
  RunOptions o;
  o.round_cap = 20;
  EXPECT_THROW(run_protocol(g, std::span(p), o), RoundCapExceeded);
}

TEST(Bfs, PathFromEnd) {
  const Graph g = make("path,5");
  const BfsResult r = build_bfs_tree(g, 0);
  EXPECT_EQ(r.tree.depth, 4u);
  for (NodeId v = 1; v < 5; ++v) EXPECT_EQ(r.tree.parent[v], std::optional<NodeId>(v - 1));
  EXPECT_LE(r.stats.rounds, 2u * g.diameter() + 2);
}

TEST(Bfs, CliqueAndStar) {
  EXPECT_EQ(build_bfs_tree(make("clique,4"), 2).tree.depth, 1u);
  EXPECT_EQ(build_bfs_tree(make("star,6"), 3).tree.depth, 2u);
}

TEST(Bfs, LevelsMatchDistances) {
  for (const char* spec : {"gnp,60,0.08", "regular,40,3", "cycle,17"}) {
    const Graph g = make(spec);
    const BfsResult r = build_bfs_tree(g, 0);
    const auto dist = bfs_distances(g, 0);
    for (NodeId v = 0; v < g.size(); ++v) {
      EXPECT_EQ(r.tree.contains(v), dist[v] != UINT32_MAX);
      if (r.tree.contains(v)) EXPECT_EQ(r.tree.level[v], dist[v]);
    }
  }
}

TEST(Aggregate, ZeroContributions) {
  const Graph g = make("path,4");
  const BfsTree t = build_bfs_tree(g, 0).tree;
  const std::vector<RationalPair> c(4, {Rational(0), Rational(0)});
  const AggregateResult r = aggregate_sum(g, t, c);
  EXPECT_EQ(r.sum.first, 0);
  EXPECT_EQ(r.sum.second, 0);
}

TEST(Aggregate, ExactFractionsOnPath) {
  const Graph g = make("path,3");
  const BfsTree t = build_bfs_tree(g, 0).tree;
  std::vector<RationalPair> c{{make_rational(1, 2), make_rational(1, 3)},
                              {make_rational(1, 6), make_rational(1, 3)},
                              {make_rational(1, 3), make_rational(1, 3)}};
  const AggregateResult r = aggregate_sum(g, t, c);
  EXPECT_EQ(r.sum.first, 1);
  EXPECT_EQ(r.sum.second, 1);
  EXPECT_LE(r.stats.rounds, t.depth);
  std::reverse(c.begin(), c.end());
  EXPECT_EQ(aggregate_sum(g, t, c).sum, r.sum);
}

TEST(Broadcast, BitReachesPath) {
  const Graph g = make("path,5");
  const BfsTree t = build_bfs_tree(g, 0).tree;
  const BroadcastResult r = broadcast(g, t, 1, 1);
  EXPECT_EQ(r.stats.rounds, 4u);
  for (const auto& x : r.received) EXPECT_EQ(x, std::optional<std::uint64_t>(1));
}

TEST(Broadcast, SingleNodeTakesNoRounds) {
  const Graph g(1, std::vector<Edge>{});
  const BfsTree t = build_bfs_tree(g, 0).tree;
  EXPECT_EQ(broadcast(g, t, 1, 1).stats.rounds, 0u);
}

TEST(Broadcast, ThenAggregateGivesNTimesValue) {
  const Graph g = make("gnp,30,0.2");
  const BfsTree t = build_bfs_tree(g, 0).tree;
  const BroadcastResult b = broadcast(g, t, 13, 8);
  std::vector<RationalPair> c(g.size(), {Rational(0), Rational(0)});
  std::size_t members = 0;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!t.contains(v)) continue;
    ++members;
    c[v] = {make_rational(static_cast<std::int64_t>(*b.received[v])), make_rational(1)};
  }
  const AggregateResult r = aggregate_sum(g, t, c);
  EXPECT_EQ(r.sum.first, make_rational(static_cast<std::int64_t>(13 * members)));
  EXPECT_EQ(r.sum.second, make_rational(static_cast<std::int64_t>(members)));
}

TEST(Policy, Parse) {
  EXPECT_FALSE(BandwidthPolicy::parse("measure").strict);
  const BandwidthPolicy p = BandwidthPolicy::parse("strict:8");
  EXPECT_TRUE(p.strict);
  EXPECT_EQ(p.beta, 8u);
  EXPECT_EQ(p.limit_bits(200), 64u);
  EXPECT_THROW(BandwidthPolicy::parse("loose"), ParseError);
}
