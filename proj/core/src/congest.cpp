#include "dcolor/congest.hpp"

#include <deque>
#include <set>

namespace dcolor {

const char* to_string(Category c) { return c == Category::algorithm ? "algorithm" : "aggregation"; }

BitWriter& BitWriter::put(std::uint64_t value, int width) {
  if (width < 64 && width >= 0 && (value >> width) != 0) throw Error("BitWriter: value does not fit width");
  for (int i = width - 1; i >= 0; --i) {
    if (bits_ % 8 == 0) bytes_.push_back(0);
    if ((value >> i) & 1u) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
    ++bits_;
  }
  return *this;
}

Message BitWriter::finish(Category category) {
  return Message{std::move(bytes_), bits_, category};
}

std::uint64_t BitReader::get(int width) {
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i) {
    if (pos_ >= msg_.bit_len) throw ParseError("BitReader: read past end of message");
    const std::uint8_t byte = msg_.payload[pos_ / 8];
    value = (value << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
    ++pos_;
  }
  return value;
}

Message make_rational_message(std::span<const Rational> values, std::uint32_t tag, int tag_width) {
  Message msg;
  msg.category = Category::aggregation;
  for (int shift = ((tag_width + 7) / 8 - 1) * 8; shift >= 0; shift -= 8) {
    msg.payload.push_back(static_cast<std::uint8_t>(tag >> shift));
  }
  for (const Rational& q : values) append_rational(msg.payload, q);
  msg.bit_len = 8 * msg.payload.size();
  return msg;
}

std::vector<Rational> read_rational_message(const Message& msg, std::size_t count, int tag_width,
                                            std::uint32_t* tag) {
  std::size_t pos = 0;
  std::uint32_t t = 0;
  for (int i = 0; i < (tag_width + 7) / 8; ++i) {
    if (pos >= msg.payload.size()) throw ParseError("truncated tag");
    t = (t << 8) | msg.payload[pos++];
  }
  if (tag) *tag = t;
  std::vector<Rational> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(read_rational(msg.payload, pos));
  return out;
}

BandwidthPolicy BandwidthPolicy::parse(const std::string& text) {
  if (text == "measure") return measure();
  const std::string prefix = "strict:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      const auto beta = std::stoul(text.substr(prefix.size()));
      return strict_with(static_cast<std::uint32_t>(beta));
    } catch (const std::logic_error&) {
    }
  }
  throw ParseError("bandwidth policy must be 'measure' or 'strict:BETA', got '" + text + "'");
}

RunStats& RunStats::operator+=(const RunStats& other) {
  rounds += other.rounds;
  charged_rounds += other.charged_rounds;
  messages_sent += other.messages_sent;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    max_msg_bits[c] = std::max(max_msg_bits[c], other.max_msg_bits[c]);
    total_bits[c] += other.total_bits[c];
  }
  max_edge_load = std::max(max_edge_load, other.max_edge_load);
  for (const auto& [load, count] : other.edge_load_histogram) edge_load_histogram[load] += count;
  return *this;
}

void Trace::emit(nlohmann::json record) {
  if (sink_) *sink_ << record.dump() << '\n';
  if (keep_) records_.push_back(std::move(record));
}

void Trace::round_record(std::uint64_t round_in_run, std::uint64_t algorithm_bits, std::uint64_t aggregation_bits,
                         std::uint64_t messages) {
  nlohmann::json rec;
  rec["round"] = offset_ + round_in_run;
  rec["category_bits"] = {{"algorithm", algorithm_bits}, {"aggregation", aggregation_bits}};
  rec["messages"] = messages;
  emit(std::move(rec));
}

void Trace::annotate(nlohmann::json record) { emit(std::move(record)); }

namespace detail {

void throw_not_neighbor(std::uint64_t round, NodeId from, NodeId to) {
  throw Error("round " + std::to_string(round) + ": node " + std::to_string(from) + " sent to non-neighbor " +
              std::to_string(to));
}

void throw_bandwidth(std::uint64_t round, NodeId from, NodeId to, std::size_t bits, std::size_t limit) {
  throw BandwidthViolation("bandwidth violation in round " + std::to_string(round) + " on edge " +
                           std::to_string(from) + "->" + std::to_string(to) + ": " + std::to_string(bits) +
                           " bits > limit " + std::to_string(limit));
}

void throw_round_cap(std::uint64_t cap) {
  throw RoundCapExceeded("round cap of " + std::to_string(cap) + " exceeded");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trees

std::vector<NodeId> BfsTree::nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < in_tree.size(); ++v) {
    if (in_tree[v]) out.push_back(v);
  }
  return out;
}

BfsTree tree_from_parents(NodeId host_size, NodeId root, const std::vector<std::optional<NodeId>>& parent,
                          const std::vector<bool>& in_tree) {
  BfsTree t;
  t.root = root;
  t.in_tree = in_tree;
  t.parent = parent;
  t.children.assign(host_size, {});
  t.level.assign(host_size, 0);
  if (root >= host_size || !in_tree[root] || parent[root]) throw ValidationError("tree root invalid");
  std::size_t members = 0;
  for (NodeId v = 0; v < host_size; ++v) {
    if (!in_tree[v]) continue;
    ++members;
    if (v == root) continue;
    if (!parent[v] || !in_tree[*parent[v]]) throw ValidationError("tree node " + std::to_string(v) + " lacks a parent in the tree");
    t.children[*parent[v]].push_back(v);
  }
  std::deque<NodeId> queue{root};
  std::size_t reached = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    ++reached;
    t.depth = std::max(t.depth, t.level[u]);
    for (NodeId c : t.children[u]) {
      t.level[c] = t.level[u] + 1;
      queue.push_back(c);
    }
  }
  if (reached != members) throw ValidationError("parent links contain a cycle");
  return t;
}

BfsTree tree_from_edges(NodeId host_size, NodeId root, std::span<const Edge> edges, std::span<const NodeId> nodes) {
  std::vector<std::vector<NodeId>> adj(host_size);
  std::vector<bool> in_tree(host_size, false);
  for (NodeId v : nodes) in_tree.at(v) = true;
  for (const Edge& e : edges) {
    if (e.u >= host_size || e.v >= host_size) throw ValidationError("tree edge out of range");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
    in_tree[e.u] = in_tree[e.v] = true;
  }
  if (root >= host_size) throw ValidationError("tree root out of range");
  in_tree[root] = true;
  std::vector<std::optional<NodeId>> parent(host_size);
  std::vector<bool> seen(host_size, false);
  std::deque<NodeId> queue{root};
  seen[root] = true;
  std::size_t seen_edges = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    std::sort(adj[u].begin(), adj[u].end());
    for (NodeId w : adj[u]) {
      if (seen[w]) continue;
      seen[w] = true;
      parent[w] = u;
      ++seen_edges;
      queue.push_back(w);
    }
  }
  for (NodeId v = 0; v < host_size; ++v) {
    if (in_tree[v] && !seen[v]) throw ValidationError("tree is disconnected at node " + std::to_string(v));
  }
  if (seen_edges != edges.size()) throw ValidationError("tree edges contain a cycle or duplicate");
  return tree_from_parents(host_size, root, parent, in_tree);
}

namespace {

enum BfsKind : std::uint64_t { kExplore = 0, kChild = 1, kNack = 2 };

class BfsProgram {
 public:
  BfsProgram() = default;
  BfsProgram(bool active, bool is_root) : active_(active), root_(is_root) {}

  StepStatus step(const StepContext& ctx, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (!active_) return StepStatus::halted;
    if (!joined_) {
      std::vector<NodeId> explorers;
      for (const Envelope& env : inbox) {
        if (BitReader(env.msg).get(2) == kExplore) explorers.push_back(env.peer);
      }
      if (root_) {
        joined_ = true;
      } else if (!explorers.empty()) {
        joined_ = true;
        parent_ = *std::min_element(explorers.begin(), explorers.end());
      } else {
        return StepStatus::running;
      }
      for (NodeId w : ctx.neighbors) {
        const bool explored_me = std::find(explorers.begin(), explorers.end(), w) != explorers.end();
        if (parent_ && w == *parent_) {
          out.push_back({w, BitWriter().put(kChild, 2).finish()});
        } else if (explored_me) {
          out.push_back({w, BitWriter().put(kNack, 2).finish()});
        } else {
          out.push_back({w, BitWriter().put(kExplore, 2).finish()});
          pending_.insert(w);
        }
      }
      return pending_.empty() ? StepStatus::halted : StepStatus::running;
    }
    for (const Envelope& env : inbox) {
      const auto kind = BitReader(env.msg).get(2);
      if (kind == kChild) children_.push_back(env.peer);
      if (kind == kExplore && !pending_.count(env.peer)) {
        out.push_back({env.peer, BitWriter().put(kNack, 2).finish()});
      }
      pending_.erase(env.peer);
    }
    return pending_.empty() ? StepStatus::halted : StepStatus::running;
  }

  bool joined() const { return joined_; }
  std::optional<NodeId> parent() const { return parent_; }

 private:
  bool active_ = false;
  bool root_ = false;
  bool joined_ = false;
  std::optional<NodeId> parent_;
  std::set<NodeId> pending_;
  std::vector<NodeId> children_;
};

}  // namespace

BfsForestResult build_bfs_forest(const Graph& g, std::span<const NodeId> roots, const RunOptions& options) {
  const NodeId n = g.size();
  std::vector<BfsProgram> programs(n);
  std::set<NodeId> root_components;
  for (NodeId r : roots) {
    if (r >= n) throw ValidationError("BFS root out of range");
    if (!root_components.insert(g.component()[r]).second) throw ValidationError("two BFS roots in one component");
  }
  for (NodeId v = 0; v < n; ++v) {
    const bool active = root_components.count(g.component()[v]) > 0;
    const bool is_root = std::find(roots.begin(), roots.end(), v) != roots.end();
    programs[v] = BfsProgram(active, is_root);
  }
  BfsForestResult result;
  result.stats = run_protocol(g, std::span<BfsProgram>(programs), options);

  std::vector<std::optional<NodeId>> parent(n);
  for (NodeId v = 0; v < n; ++v) parent[v] = programs[v].parent();
  for (NodeId r : roots) {
    std::vector<bool> in_tree(n, false);
    for (NodeId v = 0; v < n; ++v) in_tree[v] = programs[v].joined() && g.component()[v] == g.component()[r];
    result.trees.push_back(tree_from_parents(n, r, parent, in_tree));
  }
  return result;
}

BfsResult build_bfs_tree(const Graph& g, NodeId root, const RunOptions& options) {
  const NodeId roots[] = {root};
  auto forest = build_bfs_forest(g, roots, options);
  return {std::move(forest.trees.front()), forest.stats};
}

namespace {

class ConvergecastProgram {
 public:
  ConvergecastProgram() = default;
  ConvergecastProgram(const BfsTree* tree, NodeId self, RationalPair own)
      : tree_(tree), self_(self), acc_(std::move(own)), waiting_(tree->children[self].size()) {}

  StepStatus step(const StepContext&, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (!tree_) return StepStatus::halted;
    for (const Envelope& env : inbox) {
      auto vals = read_rational_message(env.msg, 2);
      acc_.first += vals[0];
      acc_.second += vals[1];
      --waiting_;
    }
    if (waiting_ > 0) return StepStatus::running;
    if (tree_->parent[self_]) {
      const Rational vals[] = {acc_.first, acc_.second};
      out.push_back({*tree_->parent[self_], make_rational_message(vals)});
    }
    return StepStatus::halted;
  }

  const RationalPair& value() const { return acc_; }

 private:
  const BfsTree* tree_ = nullptr;
  NodeId self_ = 0;
  RationalPair acc_;
  std::size_t waiting_ = 0;
};

class BroadcastProgram {
 public:
  BroadcastProgram() = default;
  BroadcastProgram(const BfsTree* tree, NodeId self, std::optional<std::uint64_t> value, int width)
      : tree_(tree), self_(self), value_(value), width_(width) {}

  StepStatus step(const StepContext&, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (!tree_) return StepStatus::halted;
    for (const Envelope& env : inbox) value_ = BitReader(env.msg).get(width_);
    if (!value_) return StepStatus::running;
    for (NodeId c : tree_->children[self_]) out.push_back({c, BitWriter().put(*value_, width_).finish()});
    return StepStatus::halted;
  }

  std::optional<std::uint64_t> value() const { return value_; }

 private:
  const BfsTree* tree_ = nullptr;
  NodeId self_ = 0;
  std::optional<std::uint64_t> value_;
  int width_ = 0;
};

}  // namespace

AggregateResult aggregate_sum(const Graph& g, const BfsTree& tree, std::span<const RationalPair> contributions,
                              const RunOptions& options) {
  const NodeId n = g.size();
  if (contributions.size() != n) throw Error("aggregate_sum: need one contribution per node");
  std::vector<ConvergecastProgram> programs(n);
  for (NodeId v = 0; v < n; ++v) {
    if (tree.contains(v)) programs[v] = ConvergecastProgram(&tree, v, contributions[v]);
  }
  AggregateResult result;
  result.stats = run_protocol(g, std::span<ConvergecastProgram>(programs), options);
  result.sum = programs[tree.root].value();
  return result;
}

BroadcastResult broadcast(const Graph& g, const BfsTree& tree, std::uint64_t value, int width,
                          const RunOptions& options) {
  const NodeId n = g.size();
  std::vector<BroadcastProgram> programs(n);
  for (NodeId v = 0; v < n; ++v) {
    if (!tree.contains(v)) continue;
    programs[v] = BroadcastProgram(&tree, v, v == tree.root ? std::optional(value) : std::nullopt, width);
  }
  BroadcastResult result;
  result.stats = run_protocol(g, std::span<BroadcastProgram>(programs), options);
  result.received.resize(n);
  for (NodeId v = 0; v < n; ++v) result.received[v] = programs[v].value();
  return result;
}

}  // namespace dcolor
