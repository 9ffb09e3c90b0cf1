#pragma once

#include <cstdint>
#include <vector>

#include "dcolor/congest.hpp"
#include "dcolor/derand.hpp"
#include "dcolor/graph.hpp"
#include "dcolor/potential.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace dcolor;

/// One BFS tree per component, rooted at its smallest node, and one
/// seed-fixing group per tree.
struct LevelHarness {
  const Graph* graph = nullptr;
  std::vector<NodeId> identity;
  std::vector<BfsTree> trees;
  std::vector<LevelGroup> groups;

  explicit LevelHarness(const Graph& g) : graph(&g), identity(g.size()) {
    std::vector<NodeId> roots;
    std::vector<bool> seen(g.component_count(), false);
    for (NodeId v = 0; v < g.size(); ++v) {
      identity[v] = v;
      if (!seen[g.component()[v]]) {
        seen[g.component()[v]] = true;
        roots.push_back(v);
      }
    }
    trees = build_bfs_forest(g, roots).trees;
    for (const BfsTree& t : trees) groups.push_back(LevelGroup{&t, t.nodes()});
  }

  LevelResult fix(const LevelContext& ctx, Strategy strategy = Strategy::conditional,
                  std::uint64_t cap = std::uint64_t{1} << 24) const {
    LevelSetup setup;
    setup.host = graph;
    setup.to_host = identity;
    setup.ctx = &ctx;
    setup.groups = groups;
    setup.strategy = strategy;
    setup.seed_cap = cap;
    return fix_level(setup);
  }
};

/// Pr[C_u = C_v = 1] and Pr[C_u = C_v = 0] by enumerating every seed that
/// agrees with `prefix` (s1 bits first, then the low b bits of s2).
inline std::pair<Rational, Rational> brute_joint(const LevelContext& ctx, NodeId u, NodeId v,
                                                 const std::vector<std::uint8_t>& prefix) {
  const FamilySpec& f = ctx.family;
  const int m = f.m, b = f.b;
  const std::uint64_t range = std::uint64_t{1} << b;
  auto t_of = [&](NodeId x) {
    const std::uint64_t L = ctx.k0[x] + ctx.k1[x];
    return (static_cast<std::uint64_t>(ctx.k1[x]) * range + L - 1) / L;
  };
  const std::uint64_t tu = t_of(u), tv = t_of(v);
  std::uint64_t both1 = 0, both0 = 0, total = 0;
  for (std::uint64_t s1 = 0; s1 < (std::uint64_t{1} << m); ++s1) {
    for (std::uint64_t s2 = 0; s2 < range; ++s2) {
      bool ok = true;
      for (std::size_t j = 0; j < prefix.size() && ok; ++j) {
        const std::uint64_t bit = static_cast<int>(j) < m ? (s1 >> j & 1) : (s2 >> (j - m) & 1);
        ok = bit == prefix[j];
      }
      if (!ok) continue;
      ++total;
      const bool cu = oracle::hash(s1, s2, ctx.coins[u].color, f.field.modulus, m, b) < tu;
      const bool cv = oracle::hash(s1, s2, ctx.coins[v].color, f.field.modulus, m, b) < tv;
      both1 += cu && cv;
      both0 += !cu && !cv;
    }
  }
  return {ratio(both1, total), ratio(both0, total)};
}

/// Sum of Phi at the next level for the coins of one seed, counted directly.
inline Rational brute_realized(const LevelContext& ctx, std::uint64_t s1, std::uint64_t s2) {
  const PrefixState& s = *ctx.state;
  const FamilySpec& f = ctx.family;
  const std::uint64_t range = std::uint64_t{1} << f.b;
  std::vector<int> bit(s.size());
  for (NodeId v = 0; v < s.size(); ++v) {
    const std::uint64_t L = ctx.k0[v] + ctx.k1[v];
    const std::uint64_t t = (static_cast<std::uint64_t>(ctx.k1[v]) * range + L - 1) / L;
    bit[v] = oracle::hash(s1, s2, ctx.coins[v].color, f.field.modulus, f.m, f.b) < t;
  }
  Rational total = 0;
  for (NodeId v = 0; v < s.size(); ++v) {
    std::int64_t same = 0;
    for (NodeId u : s.alive_adj[v]) same += bit[u] == bit[v];
    const std::int64_t size = bit[v] ? ctx.k1[v] : ctx.k0[v];
    if (same > 0) total += make_rational(same, size);
  }
  return total;
}

/// Minimum of brute_realized over s1 in [2^m] and s2 in [2^b].
inline Rational brute_best(const LevelContext& ctx) {
  std::optional<Rational> best;
  for (std::uint64_t s1 = 0; s1 < (std::uint64_t{1} << ctx.family.m); ++s1)
    for (std::uint64_t s2 = 0; s2 < (std::uint64_t{1} << ctx.family.b); ++s2) {
      const Rational r = brute_realized(ctx, s1, s2);
      if (!best || r < *best) best = r;
    }
  return *best;
}

}  // namespace fixture
