#include "dcolor/potential.hpp"

#include <string>

#include "dcolor/common.hpp"

namespace dcolor {

std::size_t PrefixState::alive_edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : alive_adj) twice += adj.size();
  return twice / 2;
}

std::vector<Edge> PrefixState::alive_edges() const {
  std::vector<Edge> out;
  for (NodeId u = 0; u < size(); ++u) {
    for (NodeId v : alive_adj[u]) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

PrefixState init_state(const ListColoringInstance& inst) {
  PrefixState s;
  const NodeId n = inst.graph.size();
  s.width = ceil_log2(inst.C);
  s.level = 0;
  s.prefix.assign(n, 0);
  s.candidates = inst.lists;
  s.alive_adj.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    require(!s.candidates[v].empty(), "node " + std::to_string(v) + " has an empty list");
    const auto nb = inst.graph.neighbors(v);
    s.alive_adj[v].assign(nb.begin(), nb.end());
  }
  return s;
}

std::pair<std::uint32_t, std::uint32_t> split_counts(const PrefixState& state, NodeId v) {
  require(state.level < state.width, "split_counts: all bits already fixed");
  const int shift = state.width - 1 - state.level;
  std::uint32_t k1 = 0;
  for (Color c : state.candidates[v]) k1 += (c >> shift) & 1u;
  return {static_cast<std::uint32_t>(state.candidates[v].size()) - k1, k1};
}

Rational phi(const PrefixState& state, NodeId v) {
  return make_rational(static_cast<long>(state.alive_adj[v].size()), static_cast<long>(state.candidates[v].size()));
}

Rational phi_sum(const PrefixState& state) {
  Rational total = 0;
  for (NodeId v = 0; v < state.size(); ++v) {
    if (!state.alive_adj[v].empty()) total += phi(state, v);
  }
  return total;
}

Rational phi_sum(const PrefixState& state, const std::vector<bool>& members) {
  Rational total = 0;
  for (NodeId v = 0; v < state.size(); ++v) {
    if (members[v] && !state.alive_adj[v].empty()) total += phi(state, v);
  }
  return total;
}

Rational phi_sum_edges(const PrefixState& state) {
  Rational total = 0;
  for (const Edge& e : state.alive_edges()) {
    total += make_rational(1, static_cast<long>(state.candidates[e.u].size()));
    total += make_rational(1, static_cast<long>(state.candidates[e.v].size()));
  }
  return total;
}

PrefixState apply_bits(const PrefixState& state, std::span<const std::uint8_t> bits) {
  require(state.level < state.width, "apply_bits: all bits already fixed");
  require(bits.size() == state.size(), "apply_bits: need one bit per node");
  PrefixState next;
  next.width = state.width;
  next.level = state.level + 1;
  const int shift = state.width - 1 - state.level;
  const NodeId n = state.size();
  next.prefix.resize(n);
  next.candidates.resize(n);
  next.alive_adj.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    const std::uint32_t bit = bits[v] ? 1u : 0u;
    next.prefix[v] = (state.prefix[v] << 1) | bit;
    for (Color c : state.candidates[v]) {
      if (((c >> shift) & 1u) == bit) next.candidates[v].push_back(c);
    }
    if (next.candidates[v].empty()) {
      throw InvariantViolation("level " + std::to_string(next.level) + ": node " + std::to_string(v) +
                               " chose bit " + std::to_string(bit) + " with no remaining candidate");
    }
    for (NodeId u : state.alive_adj[v]) {
      if ((bits[u] ? 1u : 0u) == bit) next.alive_adj[v].push_back(u);
    }
  }
  return next;
}

}  // namespace dcolor
