#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dcolor/graph.hpp"
#include "dcolor/rational.hpp"

namespace dcolor {

/// Prefix fixing state over an instance. Colors are coded with `width`
/// bits, most significant first; `prefix[v]` holds the `level` bits fixed
/// so far. alive_adj[v] lists the neighbors that share v's prefix.
struct PrefixState {
  int width = 0;
  int level = 0;
  std::vector<std::uint64_t> prefix;
  std::vector<std::vector<Color>> candidates;
  std::vector<std::vector<NodeId>> alive_adj;

  NodeId size() const { return static_cast<NodeId>(candidates.size()); }
  std::size_t alive_edge_count() const;
  std::vector<Edge> alive_edges() const;
};

PrefixState init_state(const ListColoringInstance& inst);

/// Candidates of v whose next bit is 0 and 1.
std::pair<std::uint32_t, std::uint32_t> split_counts(const PrefixState& state, NodeId v);

Rational phi(const PrefixState& state, NodeId v);
Rational phi_sum(const PrefixState& state);
/// Same value through the sum over alive edges of 1/|L(u)| + 1/|L(v)|.
Rational phi_sum_edges(const PrefixState& state);
/// Sum of phi over the nodes flagged in `members` (indexed by node).
Rational phi_sum(const PrefixState& state, const std::vector<bool>& members);

/// Extends every prefix by bits[v]. Throws InvariantViolation if some node
/// would be left without candidates.
PrefixState apply_bits(const PrefixState& state, std::span<const std::uint8_t> bits);

}  // namespace dcolor
