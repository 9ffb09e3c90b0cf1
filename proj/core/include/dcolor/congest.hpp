#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcolor/common.hpp"
#include "dcolor/graph.hpp"
#include "dcolor/rational.hpp"

namespace dcolor {

enum class Category : std::uint8_t { algorithm = 0, aggregation = 1 };
inline constexpr std::size_t kCategoryCount = 2;
const char* to_string(Category c);

struct Message {
  std::vector<std::uint8_t> payload;
  std::size_t bit_len = 0;
  Category category = Category::algorithm;
};

/// Packs fixed-width fields MSB-first. bit_len is the exact number of bits
/// written; the payload is padded to whole bytes.
class BitWriter {
 public:
  BitWriter& put(std::uint64_t value, int width);
  Message finish(Category category = Category::algorithm);

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const Message& msg) : msg_(msg) {}
  std::uint64_t get(int width);

 private:
  const Message& msg_;
  std::size_t pos_ = 0;
};

/// Aggregation messages: optional tag bits are not used, payload is
/// a sequence of wire-encoded rationals; bit_len = 8 * payload bytes.
Message make_rational_message(std::span<const Rational> values, std::uint32_t tag = 0, int tag_width = 0);
std::vector<Rational> read_rational_message(const Message& msg, std::size_t count, int tag_width = 0,
                                            std::uint32_t* tag = nullptr);

/// Inbox entry: `peer` is the sender. Outbox entry: `peer` is the receiver.
struct Envelope {
  NodeId peer = 0;
  Message msg;
};

struct BandwidthPolicy {
  bool strict = false;
  std::uint32_t beta = 0;

  static BandwidthPolicy measure() { return {}; }
  static BandwidthPolicy strict_with(std::uint32_t beta) { return {true, beta}; }
  /// Parses "measure" or "strict:BETA".
  static BandwidthPolicy parse(const std::string& text);
  std::size_t limit_bits(NodeId n) const { return static_cast<std::size_t>(beta) * ceil_log2(n); }
};

struct RunStats {
  std::uint64_t rounds = 0;
  /// Rounds after serializing messages that share a directed edge in the
  /// same round: each round costs max(1, max per-edge load) sub-slots.
  std::uint64_t charged_rounds = 0;
  std::uint64_t messages_sent = 0;
  std::array<std::size_t, kCategoryCount> max_msg_bits{};
  std::array<std::uint64_t, kCategoryCount> total_bits{};
  std::uint32_t max_edge_load = 0;
  /// load -> number of (directed edge, round) pairs with that many messages.
  std::map<std::uint32_t, std::uint64_t> edge_load_histogram;

  RunStats& operator+=(const RunStats& other);
};

/// Collects JSON-lines trace records. Round records are numbered
/// globally across consecutive protocol runs.
class Trace {
 public:
  explicit Trace(std::ostream* sink = nullptr) : sink_(sink) {}

  void round_record(std::uint64_t round_in_run, std::uint64_t algorithm_bits, std::uint64_t aggregation_bits,
                    std::uint64_t messages);
  void annotate(nlohmann::json record);
  void end_run(std::uint64_t rounds) { offset_ += rounds; }

  const std::vector<nlohmann::json>& records() const { return records_; }
  void set_keep_records(bool keep) { keep_ = keep; }

 private:
  void emit(nlohmann::json record);

  std::ostream* sink_;
  std::vector<nlohmann::json> records_;
  std::uint64_t offset_ = 0;
  bool keep_ = true;
};

struct RunOptions {
  BandwidthPolicy policy = BandwidthPolicy::measure();
  std::uint64_t round_cap = 10'000'000;
  Trace* trace = nullptr;
  bool record_rounds = true;
  /// Network size used for the bandwidth limit; 0 means the run's graph.
  NodeId network_size = 0;
};

struct StepContext {
  std::uint64_t round = 0;  // 1-based; messages written now travel in this round
  NodeId self = 0;
  std::span<const NodeId> neighbors;
};

enum class StepStatus { running, halted };

template <class P>
concept NodeProgram = requires(P& p, const StepContext& ctx, std::span<const Envelope> inbox,
                               std::vector<Envelope>& outbox) {
  { p.step(ctx, inbox, outbox) } -> std::same_as<StepStatus>;
};

namespace detail {
[[noreturn]] void throw_not_neighbor(std::uint64_t round, NodeId from, NodeId to);
[[noreturn]] void throw_bandwidth(std::uint64_t round, NodeId from, NodeId to, std::size_t bits, std::size_t limit);
[[noreturn]] void throw_round_cap(std::uint64_t cap);
}  // namespace detail

/// Synchronous round engine. Every non-halted node steps once per
/// iteration with the messages sent to it in the previous iteration
/// (ordered by sender id). An iteration counts as a round unless it sends
/// nothing and leaves every node halted. Messages to halted nodes are
/// dropped. Programs keep their final state in `programs`.
template <NodeProgram P>
RunStats run_protocol(const Graph& g, std::span<P> programs, const RunOptions& options = {}) {
  const NodeId n = g.size();
  if (programs.size() != n) throw Error("run_protocol: need exactly one program per node");
  const std::size_t limit = options.policy.limit_bits(options.network_size ? options.network_size : n);

  std::vector<std::vector<Envelope>> inbox(n);
  std::vector<std::vector<Envelope>> next(n);
  std::vector<bool> halted(n, false);
  std::vector<Envelope> outbox;
  std::map<std::pair<NodeId, NodeId>, std::uint32_t> load;
  RunStats stats;

  for (;;) {
    const std::uint64_t round = stats.rounds + 1;
    std::uint64_t sent = 0;
    std::array<std::uint64_t, kCategoryCount> round_bits{};
    load.clear();
    for (NodeId v = 0; v < n; ++v) {
      if (halted[v]) continue;
      outbox.clear();
      const StepContext ctx{round, v, g.neighbors(v)};
      const StepStatus status = programs[v].step(ctx, inbox[v], outbox);
      for (Envelope& env : outbox) {
        if (!g.has_edge(v, env.peer)) detail::throw_not_neighbor(round, v, env.peer);
        const auto cat = static_cast<std::size_t>(env.msg.category);
        if (options.policy.strict && env.msg.category == Category::algorithm && env.msg.bit_len > limit) {
          detail::throw_bandwidth(round, v, env.peer, env.msg.bit_len, limit);
        }
        stats.max_msg_bits[cat] = std::max(stats.max_msg_bits[cat], env.msg.bit_len);
        stats.total_bits[cat] += env.msg.bit_len;
        round_bits[cat] += env.msg.bit_len;
        ++load[{v, env.peer}];
        ++sent;
        next[env.peer].push_back({v, std::move(env.msg)});
      }
      if (status == StepStatus::halted) halted[v] = true;
    }
    for (NodeId v = 0; v < n; ++v) {
      inbox[v].clear();
      if (!halted[v]) inbox[v].swap(next[v]);
      next[v].clear();
    }
    const bool all_halted = std::all_of(halted.begin(), halted.end(), [](bool h) { return h; });
    if (sent == 0 && all_halted) break;

    ++stats.rounds;
    stats.messages_sent += sent;
    std::uint32_t max_load = 0;
    for (const auto& [edge, count] : load) {
      max_load = std::max(max_load, count);
      ++stats.edge_load_histogram[count];
    }
    stats.max_edge_load = std::max(stats.max_edge_load, max_load);
    stats.charged_rounds += std::max<std::uint32_t>(1, max_load);
    if (options.trace && options.record_rounds) {
      options.trace->round_record(stats.rounds, round_bits[0], round_bits[1], sent);
    }
    if (options.round_cap != 0 && stats.rounds > options.round_cap) detail::throw_round_cap(options.round_cap);
  }
  if (options.trace) options.trace->end_run(stats.rounds);
  return stats;
}

// ---------------------------------------------------------------------------
// Tree primitives

/// Rooted spanning tree of the nodes it contains. Vectors are indexed by
/// node id of the host graph; nodes outside the tree have in_tree = false.
struct BfsTree {
  NodeId root = 0;
  std::vector<bool> in_tree;
  std::vector<std::optional<NodeId>> parent;
  std::vector<std::vector<NodeId>> children;
  std::vector<std::uint32_t> level;
  std::uint32_t depth = 0;

  bool contains(NodeId v) const { return v < in_tree.size() && in_tree[v]; }
  std::vector<NodeId> nodes() const;
};

/// Builds a BfsTree from parent pointers (root has no parent). Throws
/// ValidationError if the links do not form a tree rooted at `root`.
BfsTree tree_from_parents(NodeId host_size, NodeId root, const std::vector<std::optional<NodeId>>& parent,
                          const std::vector<bool>& in_tree);

/// Roots a tree given by an edge list (of host-graph edges) at `root`.
BfsTree tree_from_edges(NodeId host_size, NodeId root, std::span<const Edge> edges, std::span<const NodeId> nodes);

struct BfsForestResult {
  std::vector<BfsTree> trees;  // one per root, same order
  RunStats stats;
};

/// Distributed BFS from several roots at once (at most one root per
/// component). Parent = smallest-id neighbor in the previous layer.
BfsForestResult build_bfs_forest(const Graph& g, std::span<const NodeId> roots, const RunOptions& options = {});

struct BfsResult {
  BfsTree tree;
  RunStats stats;
};

BfsResult build_bfs_tree(const Graph& g, NodeId root, const RunOptions& options = {});

using RationalPair = std::pair<Rational, Rational>;

struct AggregateResult {
  RationalPair sum;
  RunStats stats;
};

/// Convergecast of per-node pairs (indexed by host node id) to the root.
AggregateResult aggregate_sum(const Graph& g, const BfsTree& tree, std::span<const RationalPair> contributions,
                              const RunOptions& options = {});

struct BroadcastResult {
  std::vector<std::optional<std::uint64_t>> received;  // per host node
  RunStats stats;
};

BroadcastResult broadcast(const Graph& g, const BfsTree& tree, std::uint64_t value, int width,
                          const RunOptions& options = {});

}  // namespace dcolor
