#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dcolor/coins.hpp"
#include "dcolor/congest.hpp"
#include "dcolor/potential.hpp"
#include "dcolor/rational.hpp"

namespace dcolor {

/// b for the plain phase: ceil(log2(10 * Delta * width)), at least 1.
int accuracy_bits(std::uint64_t max_degree, int width);
/// b' for the avoid-MIS phase: ceil(log2(10 * Delta * (Delta + 1) * width)).
int accuracy_bits_boosted(std::uint64_t max_degree, int width);

/// Everything needed to evaluate conditional expectations at one level.
struct LevelContext {
  FamilySpec family;
  std::vector<CoinSpec> coins;  // per node, p = k1 / |L|
  std::vector<std::uint32_t> k0;
  std::vector<std::uint32_t> k1;
  const PrefixState* state = nullptr;

  NodeId size() const { return static_cast<NodeId>(coins.size()); }
};

/// psi values must be < K and proper on the alive edges.
LevelContext make_level_context(const PrefixState& state, std::span<const Color> psi, std::uint64_t K, int b);

/// Fixed seed bits r_1..r_j in fixing order (s1 bits, then s2 bits).
struct SeedPrefix {
  std::vector<std::uint8_t> fixed;

  int size() const { return static_cast<int>(fixed.size()); }
  SeedPrefix extended(int bit) const;
};

/// Number of seed positions that carry a decision; the remaining s2 bits
/// (outside the low-b window) are set to 0.
inline int decided_bits(const FamilySpec& f) { return f.m + f.b; }

/// Completes a prefix with zeros.
Seed seed_from_prefix(const FamilySpec& family, const SeedPrefix& prefix);

/// |{y in [2^b): y < t_u and (y xor delta) < t_v}|.
UInt128 xor_box_count(std::uint64_t t_u, std::uint64_t t_v, std::uint64_t delta, int b);

/// Pr[C_u = C_v = 1] and Pr[C_u = C_v = 0] over uniform completions of the prefix.
std::pair<Rational, Rational> edge_outcome_prob(const FamilySpec& family, const CoinSpec& cu, const CoinSpec& cv,
                                                const SeedPrefix& prefix);
std::pair<Rational, Rational> joint_outcome_prob(const LevelContext& ctx, NodeId u, NodeId v,
                                                 const SeedPrefix& prefix);

/// E[Phi_l(v) | prefix].
Rational node_conditional(const LevelContext& ctx, NodeId v, const SeedPrefix& prefix);
/// Sum of node_conditional over members (all nodes if members is empty).
Rational total_conditional(const LevelContext& ctx, const SeedPrefix& prefix, const std::vector<bool>& members = {});

/// 1 iff S1 < S0.
int choose_seed_bit(const Rational& s0, const Rational& s1);

/// Per-node coin values under a full seed.
std::vector<std::uint8_t> coin_bits(const LevelContext& ctx, const Seed& seed);

/// Sum of Phi_l over members after applying the coins of `seed`.
Rational realized_phi(const LevelContext& ctx, const Seed& seed, const std::vector<bool>& members = {});

struct ChainStep {
  int position = 0;
  Rational s0;
  Rational s1;
  int bit = 0;
};

struct CentralResult {
  Seed seed;
  Rational expectation_before;  // E[sum Phi_l] with no bit fixed
  std::vector<ChainStep> steps;
};

/// Reference implementation of the bit-by-bit fixing without the network.
CentralResult derandomize_seed_central(const LevelContext& ctx, const std::vector<bool>& members = {});

struct ExhaustiveResult {
  Seed seed;
  Rational best;
  Rational average;
  std::uint64_t seeds_checked = 0;
};

/// Enumerates all s1 and all low-b values of s2. Throws CapExceeded when
/// 2^(2m) > cap. Ties go to the smallest (s1, s2) in enumeration order.
ExhaustiveResult exhaustive_seed(const LevelContext& ctx, std::uint64_t cap = std::uint64_t{1} << 24,
                                 const std::vector<bool>& members = {});

enum class Strategy { conditional, exhaustive };

/// One seed-fixing group: a tree in the host graph spanning its members.
struct LevelGroup {
  const BfsTree* tree = nullptr;
  std::vector<NodeId> members;  // instance node ids
};

struct LevelSetup {
  const Graph* host = nullptr;
  std::span<const NodeId> to_host;  // instance node -> host node
  const LevelContext* ctx = nullptr;
  std::span<const LevelGroup> groups;
  Strategy strategy = Strategy::conditional;
  std::uint64_t seed_cap = std::uint64_t{1} << 24;
  RunOptions options;
};

struct GroupLevelReport {
  std::size_t group = 0;
  Seed seed;
  Rational phi_before;
  Rational phi_after;
  Rational bound;  // phi_before + members / width
  Rational expectation_before;
  std::vector<ChainStep> chain;  // empty for the exhaustive strategy
};

struct LevelResult {
  PrefixState next;
  std::vector<GroupLevelReport> groups;
  RunStats stats;
  std::uint64_t chain_checks = 0;  // good-bit comparisons that were verified
};

/// Fixes the next prefix bit of every instance node. Each group agrees on a
/// seed bit by bit (aggregate the two conditional sums up its tree, the
/// root picks the smaller, broadcast it down), then every member flips
/// its coin. Throws InvariantViolation if a guarantee fails.
LevelResult fix_level(const LevelSetup& setup);

}  // namespace dcolor
