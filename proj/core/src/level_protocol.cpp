#include <optional>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "dcolor/common.hpp"
#include "dcolor/derand.hpp"

namespace dcolor {

namespace {

struct Shared {
  const LevelSetup* setup = nullptr;
  const LevelContext* ctx = nullptr;
  int decided = 0;
  int tag_width = 0;
  int count_width = 0;
  int psi_width = 0;
  std::vector<std::optional<NodeId>> host_to_inst;
  std::vector<std::vector<std::uint8_t>> exhaustive_bits;  // per group
  std::vector<std::vector<ChainStep>> chain;               // per group, written by roots

  struct CacheEntry {
    std::pair<Rational, Rational> probs;
    int uses = 0;
  };
  std::unordered_map<std::uint64_t, CacheEntry> cache;

  // Each alive edge is evaluated once per (prefix length, candidate bit)
  // and handed to both endpoints.
  std::pair<Rational, Rational> edge_probs(NodeId v, NodeId u, const SeedPrefix& prefix) {
    const std::uint64_t lo = std::min(u, v);
    const std::uint64_t hi = std::max(u, v);
    const std::uint64_t key =
        ((lo * ctx->size() + hi) * 128 + static_cast<std::uint64_t>(prefix.size())) * 2 + prefix.fixed.back();
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, CacheEntry{joint_outcome_prob(*ctx, v, u, prefix), 0}).first;
    }
    auto probs = it->second.probs;
    if (++it->second.uses == 2) cache.erase(it);
    return probs;
  }

  Rational node_value(NodeId v, const SeedPrefix& prefix) {
    Rational x = 0;
    for (NodeId u : ctx->state->alive_adj[v]) {
      const auto [p11, p00] = edge_probs(v, u, prefix);
      if (ctx->k1[v] > 0) x += p11 / ctx->k1[v];
      if (ctx->k0[v] > 0) x += p00 / ctx->k0[v];
    }
    return x;
  }
};

struct NeighborView {
  std::uint64_t k0 = 0;
  std::uint64_t k1 = 0;
  std::uint64_t psi = 0;
};

class LevelNode {
 public:
  struct GroupRole {
    std::size_t group = 0;
    bool root = false;
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    bool member = false;
    SeedPrefix prefix;
    std::size_t waiting = 0;
    Rational acc0;
    Rational acc1;
    bool collecting = false;
    bool done = false;
  };

  LevelNode() = default;
  LevelNode(Shared* shared, NodeId host, std::optional<NodeId> local, std::vector<GroupRole> roles)
      : sh_(shared), host_(host), local_(local), roles_(std::move(roles)) {}

  StepStatus step(const StepContext& ctx, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (roles_.empty()) return StepStatus::halted;
    const Strategy strategy = sh_->setup->strategy;
    if (ctx.round == 1) {
      send_exchange(out);
      return StepStatus::running;
    }
    if (ctx.round == 2) {
      read_exchange(inbox);
      for (GroupRole& r : roles_) {
        if (strategy == Strategy::conditional) start_step(r);
      }
    } else {
      for (const Envelope& env : inbox) {
        if (env.msg.category != Category::algorithm) continue;
        BitReader reader(env.msg);
        GroupRole& r = role_for(reader.get(sh_->tag_width));
        require(r.parent && *r.parent == env.peer, "seed bit from a node that is not the tree parent");
        on_bit(r, static_cast<int>(reader.get(1)), out);
      }
      for (const Envelope& env : inbox) {
        if (env.msg.category != Category::aggregation) continue;
        std::uint32_t tag = 0;
        const auto sums = read_rational_message(env.msg, 2, sh_->tag_width, &tag);
        GroupRole& r = role_for(tag);
        require(r.collecting && r.waiting > 0, "unexpected partial sum");
        r.acc0 += sums[0];
        r.acc1 += sums[1];
        --r.waiting;
      }
    }
    for (GroupRole& r : roles_) {
      if (strategy == Strategy::exhaustive) {
        if (r.root) {
          // Root streams the precomputed seed, one bit per round (all at once without children).
          do {
            if (r.done) break;
            on_bit(r, sh_->exhaustive_bits[r.group][r.prefix.size()], out);
          } while (r.children.empty());
        }
        continue;
      }
      while (r.collecting && r.waiting == 0) finish_step(r, out);
    }
    for (const GroupRole& r : roles_) {
      if (!r.done) return StepStatus::running;
    }
    return StepStatus::halted;
  }

  const std::vector<GroupRole>& roles() const { return roles_; }
  const std::vector<std::pair<NodeId, NeighborView>>& views() const { return views_; }

 private:
  GroupRole& role_for(std::uint64_t tag) {
    for (GroupRole& r : roles_) {
      if (r.group == tag) return r;
    }
    throw InvariantViolation("message for group " + std::to_string(tag) + " reached node " + std::to_string(host_) +
                             " outside that group's tree");
  }

  void send_exchange(std::vector<Envelope>& out) {
    if (!local_) return;
    const LevelContext& c = *sh_->ctx;
    const NodeId v = *local_;
    for (NodeId u : c.state->alive_adj[v]) {
      BitWriter w;
      w.put(c.k0[v], sh_->count_width).put(c.k1[v], sh_->count_width).put(c.coins[v].color, sh_->psi_width);
      out.push_back({sh_->setup->to_host[u], w.finish()});
    }
  }

  void read_exchange(std::span<const Envelope> inbox) {
    for (const Envelope& env : inbox) {
      BitReader r(env.msg);
      NeighborView view;
      view.k0 = r.get(sh_->count_width);
      view.k1 = r.get(sh_->count_width);
      view.psi = r.get(sh_->psi_width);
      require(sh_->host_to_inst[env.peer].has_value(), "exchange message from a node outside the instance");
      views_.push_back({*sh_->host_to_inst[env.peer], view});
    }
  }

  void start_step(GroupRole& r) {
    r.acc0 = 0;
    r.acc1 = 0;
    if (r.member) {
      r.acc0 = sh_->node_value(*local_, r.prefix.extended(0));
      r.acc1 = sh_->node_value(*local_, r.prefix.extended(1));
    }
    r.waiting = r.children.size();
    r.collecting = true;
  }

  void finish_step(GroupRole& r, std::vector<Envelope>& out) {
    r.collecting = false;
    if (!r.root) {
      const Rational sums[] = {r.acc0, r.acc1};
      out.push_back({*r.parent, make_rational_message(sums, static_cast<std::uint32_t>(r.group), sh_->tag_width)});
      return;
    }
    const int bit = choose_seed_bit(r.acc0, r.acc1);
    sh_->chain[r.group].push_back(ChainStep{r.prefix.size(), r.acc0, r.acc1, bit});
    on_bit(r, bit, out);
  }

  void on_bit(GroupRole& r, int bit, std::vector<Envelope>& out) {
    require(!r.done, "seed bit received after the seed was complete");
    r.prefix = r.prefix.extended(bit);
    for (NodeId c : r.children) {
      BitWriter w;
      w.put(r.group, sh_->tag_width).put(static_cast<std::uint64_t>(bit), 1);
      out.push_back({c, w.finish()});
    }
    if (r.prefix.size() == sh_->decided) {
      r.done = true;
    } else if (sh_->setup->strategy == Strategy::conditional) {
      start_step(r);
    }
  }

  Shared* sh_ = nullptr;
  NodeId host_ = 0;
  std::optional<NodeId> local_;
  std::vector<GroupRole> roles_;
  std::vector<std::pair<NodeId, NeighborView>> views_;
};

}  // namespace

LevelResult fix_level(const LevelSetup& setup) {
  const Graph& host = *setup.host;
  const LevelContext& ctx = *setup.ctx;
  const PrefixState& state = *ctx.state;
  const NodeId n = ctx.size();
  const FamilySpec& family = ctx.family;
  require(setup.to_host.size() == n, "fix_level: to_host must cover every instance node");

  Shared sh;
  sh.setup = &setup;
  sh.ctx = &ctx;
  sh.decided = decided_bits(family);
  sh.tag_width = bits_for(setup.groups.empty() ? 0 : setup.groups.size() - 1);
  sh.count_width = state.width + 1;
  sh.psi_width = family.a;
  sh.host_to_inst.resize(host.size());
  for (NodeId v = 0; v < n; ++v) sh.host_to_inst[setup.to_host[v]] = v;
  sh.exhaustive_bits.resize(setup.groups.size());
  sh.chain.resize(setup.groups.size());

  std::vector<std::vector<bool>> member_mask(setup.groups.size(), std::vector<bool>(n, false));
  std::vector<int> group_of(n, -1);
  for (std::size_t g = 0; g < setup.groups.size(); ++g) {
    for (NodeId v : setup.groups[g].members) {
      require(group_of[v] == -1, "node " + std::to_string(v) + " belongs to two groups");
      require(setup.groups[g].tree->contains(setup.to_host[v]), "group tree misses member " + std::to_string(v));
      group_of[v] = static_cast<int>(g);
      member_mask[g][v] = true;
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    require(group_of[v] >= 0, "node " + std::to_string(v) + " has no group");
    for (NodeId u : state.alive_adj[v]) {
      require(group_of[u] == group_of[v], "alive edge between two groups at node " + std::to_string(v));
    }
  }

  LevelResult result;
  std::vector<Rational> expectation(setup.groups.size());
  for (std::size_t g = 0; g < setup.groups.size(); ++g) {
    expectation[g] = total_conditional(ctx, SeedPrefix{}, member_mask[g]);
    if (setup.strategy == Strategy::exhaustive) {
      const ExhaustiveResult ex = exhaustive_seed(ctx, setup.seed_cap, member_mask[g]);
      for (int j = 0; j < sh.decided; ++j) sh.exhaustive_bits[g].push_back(static_cast<std::uint8_t>(ex.seed.bit(family, j)));
    }
  }

  std::vector<std::vector<LevelNode::GroupRole>> roles(host.size());
  for (std::size_t g = 0; g < setup.groups.size(); ++g) {
    const BfsTree& tree = *setup.groups[g].tree;
    for (NodeId h : tree.nodes()) {
      LevelNode::GroupRole r;
      r.group = g;
      r.root = h == tree.root;
      r.parent = tree.parent[h];
      r.children = tree.children[h];
      r.member = sh.host_to_inst[h] && group_of[*sh.host_to_inst[h]] == static_cast<int>(g);
      roles[h].push_back(std::move(r));
    }
  }
  std::vector<LevelNode> programs;
  programs.reserve(host.size());
  for (NodeId h = 0; h < host.size(); ++h) programs.emplace_back(&sh, h, sh.host_to_inst[h], std::move(roles[h]));

  RunOptions options = setup.options;
  result.stats = run_protocol(host, std::span<LevelNode>(programs), options);

  // Every node derives the seed from the bits it received; members flip their coin.
  std::vector<std::optional<Seed>> group_seed(setup.groups.size());
  for (NodeId h = 0; h < host.size(); ++h) {
    for (const auto& r : programs[h].roles()) {
      require(r.done && r.prefix.size() == sh.decided, "node " + std::to_string(h) + " did not learn the full seed");
      const Seed s = seed_from_prefix(family, r.prefix);
      if (!group_seed[r.group]) group_seed[r.group] = s;
      require(*group_seed[r.group] == s, "nodes of one group disagree on the seed");
    }
  }
  std::vector<std::uint8_t> bits(n);
  for (NodeId v = 0; v < n; ++v) bits[v] = static_cast<std::uint8_t>(coin_eval(family, *group_seed[group_of[v]], ctx.coins[v]));
  for (NodeId v = 0; v < n; ++v) {
    const LevelNode& node = programs[setup.to_host[v]];
    require(node.views().size() == state.alive_adj[v].size(), "node " + std::to_string(v) + " missed an exchange message");
    for (const auto& [u, view] : node.views()) {
      require(view.k0 == ctx.k0[u] && view.k1 == ctx.k1[u] && view.psi == ctx.coins[u].color,
              "exchange data mismatch at node " + std::to_string(v));
      const CoinSpec seen = make_coin(family, view.psi, make_rational(static_cast<std::int64_t>(view.k1),
                                                                      static_cast<std::int64_t>(view.k0 + view.k1)));
      require(coin_eval(family, *group_seed[group_of[v]], seen) == bits[u],
              "node " + std::to_string(v) + " derived a wrong coin for neighbor " + std::to_string(u));
    }
  }
  result.next = apply_bits(state, bits);

  const Rational width(state.width);
  for (std::size_t g = 0; g < setup.groups.size(); ++g) {
    GroupLevelReport rep;
    rep.group = g;
    rep.seed = *group_seed[g];
    rep.phi_before = phi_sum(state, member_mask[g]);
    rep.phi_after = phi_sum(result.next, member_mask[g]);
    rep.bound = rep.phi_before + Rational(static_cast<long>(setup.groups[g].members.size())) / width;
    rep.expectation_before = expectation[g];
    rep.chain = std::move(sh.chain[g]);
    const std::string where = "level " + std::to_string(result.next.level) + ", group " + std::to_string(g);
    if (setup.strategy == Strategy::conditional) {
      require(static_cast<int>(rep.chain.size()) == sh.decided, where + ": missing seed decisions");
      Rational previous = rep.expectation_before;
      for (const ChainStep& step : rep.chain) {
        require((step.s0 + step.s1) / 2 == previous, where + ": conditional sums do not average to the previous value");
        const Rational& chosen = step.bit ? step.s1 : step.s0;
        require(chosen <= previous, where + ": chosen seed bit is not good");
        previous = chosen;
        ++result.chain_checks;
      }
      require(rep.phi_after == previous, where + ": realized potential differs from the final conditional expectation");
    }
    require(rep.phi_after <= rep.bound, where + ": potential grew beyond the per-level allowance");
    if (setup.options.trace) {
      nlohmann::json chain = nlohmann::json::array();
      for (const ChainStep& step : rep.chain) chain.push_back({to_string(step.s0), to_string(step.s1), step.bit});
      setup.options.trace->annotate({{"level", result.next.level},
                                     {"group", g},
                                     {"seed", seed_to_string(family, rep.seed)},
                                     {"phi_before", to_string(rep.phi_before)},
                                     {"phi_after", to_string(rep.phi_after)},
                                     {"bound", to_string(rep.bound)},
                                     {"expectation_before", to_string(rep.expectation_before)},
                                     {"chain", std::move(chain)}});
    }
    result.groups.push_back(std::move(rep));
  }
  return result;
}

}  // namespace dcolor
