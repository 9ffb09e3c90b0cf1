#include "dcolor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcolor/common.hpp"
#include "dcolor/linial.hpp"

namespace dcolor {

const char* to_string(Mode m) { return m == Mode::mis ? "mis" : "avoid-mis"; }
const char* to_string(KMode k) { return k == KMode::linial ? "linial" : "ids"; }
const char* to_string(Strategy s) { return s == Strategy::conditional ? "conditional" : "exhaustive"; }

Mode parse_mode(const std::string& text) {
  if (text == "mis") return Mode::mis;
  if (text == "avoid-mis" || text == "avoid_mis") return Mode::avoid_mis;
  throw ParseError("mode must be 'mis' or 'avoid-mis', got '" + text + "'");
}

KMode parse_kmode(const std::string& text) {
  if (text == "linial") return KMode::linial;
  if (text == "ids") return KMode::ids;
  throw ParseError("kmode must be 'linial' or 'ids', got '" + text + "'");
}

Strategy parse_strategy(const std::string& text) {
  if (text == "conditional") return Strategy::conditional;
  if (text == "exhaustive") return Strategy::exhaustive;
  throw ParseError("strategy must be 'conditional' or 'exhaustive', got '" + text + "'");
}

std::uint64_t round_formula(std::uint64_t D, std::uint64_t C, std::uint64_t K, std::uint64_t max_degree) {
  const std::uint64_t w = ceil_log2(C);
  return D * w * (ceil_log2(K) + ceil_log2(max_degree) + ceil_log2(w));
}

std::uint64_t default_round_cap(std::uint64_t D, std::uint64_t C, std::uint64_t K, std::uint64_t max_degree) {
  const std::uint64_t w = std::max<std::uint64_t>(ceil_log2(C), 1);
  return 64 * std::max<std::uint64_t>(D, 1) * w * (ceil_log2(K) + ceil_log2(max_degree) + ceil_log2(w) + 8);
}

std::uint64_t phase_bound(Mode mode, std::uint64_t n) {
  if (n <= 1) return 1;
  const double base = mode == Mode::mis ? 8.0 / 7.0 : 4.0 / 3.0;
  // Exact integer ceiling of log_base(n): smallest e with base^e >= n.
  std::uint64_t e = static_cast<std::uint64_t>(std::floor(std::log(static_cast<double>(n)) / std::log(base)));
  if (e > 0) --e;
  const Rational r = mode == Mode::mis ? make_rational(8, 7) : make_rational(4, 3);
  Rational power = 1;
  for (std::uint64_t i = 0; i < e; ++i) power *= r;
  while (power < Rational(static_cast<unsigned long>(n))) {
    power *= r;
    ++e;
  }
  return e + 1;
}

namespace {

class AnnounceProgram {
 public:
  AnnounceProgram() = default;
  AnnounceProgram(bool active, std::uint64_t value, int width) : active_(active), value_(value), width_(width) {}

  StepStatus step(const StepContext& ctx, std::span<const Envelope> inbox, std::vector<Envelope>& out) {
    if (ctx.round == 1) {
      if (active_) {
        for (NodeId w : ctx.neighbors) out.push_back({w, BitWriter().put(value_, width_).finish()});
      }
      return ctx.neighbors.empty() ? StepStatus::halted : StepStatus::running;
    }
    for (const Envelope& env : inbox) received_.push_back({env.peer, BitReader(env.msg).get(width_)});
    return StepStatus::halted;
  }

  const std::vector<std::pair<NodeId, std::uint64_t>>& received() const { return received_; }

 private:
  bool active_ = false;
  std::uint64_t value_ = 0;
  int width_ = 0;
  std::vector<std::pair<NodeId, std::uint64_t>> received_;
};

struct AnnounceResult {
  std::vector<std::vector<std::pair<NodeId, std::uint64_t>>> received;
  RunStats stats;
};

// One round: every active node sends `values[v]` to all its neighbors in g.
AnnounceResult announce(const Graph& g, const std::vector<bool>& active, const std::vector<std::uint64_t>& values,
                        int width, const RunOptions& options) {
  std::vector<AnnounceProgram> programs;
  programs.reserve(g.size());
  for (NodeId v = 0; v < g.size(); ++v) programs.emplace_back(active[v], values[v], width);
  AnnounceResult out;
  out.stats = run_protocol(g, std::span<AnnounceProgram>(programs), options);
  out.received.resize(g.size());
  for (NodeId v = 0; v < g.size(); ++v) out.received[v] = programs[v].received();
  return out;
}

Graph conflict_graph(const PrefixState& state) {
  const auto edges = state.alive_edges();
  return Graph(state.size(), edges);
}

void require_final(const PrefixState& state) {
  require(state.level == state.width, "finishing step needs every prefix bit fixed");
  for (NodeId v = 0; v < state.size(); ++v) {
    require(state.candidates[v].size() == 1, "node " + std::to_string(v) + " has more than one candidate left");
  }
}

// Flags exchanged in one round; each node checks the flags it received.
RunStats exchange_flags(const Graph& gc, const std::vector<bool>& low, const RunOptions& options) {
  std::vector<bool> everyone(gc.size(), true);
  std::vector<std::uint64_t> flags(gc.size());
  for (NodeId v = 0; v < gc.size(); ++v) flags[v] = low[v] ? 1 : 0;
  AnnounceResult ann = announce(gc, everyone, flags, 1, options);
  for (NodeId v = 0; v < gc.size(); ++v) {
    require(ann.received[v].size() == gc.degree(v), "missing low-set flag at node " + std::to_string(v));
    for (const auto& [u, flag] : ann.received[v]) require((flag == 1) == low[u], "wrong low-set flag");
  }
  return ann.stats;
}

}  // namespace

ListColoringInstance trim_lists(const ListColoringInstance& inst) {
  ListColoringInstance out = inst;
  for (NodeId v = 0; v < inst.graph.size(); ++v) {
    const std::size_t keep = inst.graph.degree(v) + 1;
    require(out.lists[v].size() >= keep, "list of node " + std::to_string(v) + " shorter than deg+1");
    out.lists[v].resize(keep);
  }
  return out;
}

FinishResult finish_mis(const PrefixState& state, std::span<const Color> psi, std::uint64_t K,
                        const RunOptions& options) {
  require_final(state);
  const NodeId n = state.size();
  const Graph gc = conflict_graph(state);
  FinishResult out;
  out.coloring = PartialColoring(n);
  std::vector<bool> low(n);
  std::vector<NodeId> low_nodes;
  for (NodeId v = 0; v < n; ++v) {
    low[v] = gc.degree(v) < 4;
    if (low[v]) low_nodes.push_back(v);
  }
  out.low_count = low_nodes.size();
  out.stats += exchange_flags(gc, low, options);

  const Subgraph h = induced_subgraph(gc, low_nodes);
  out.max_conflict_degree = h.graph.max_degree();
  require(out.max_conflict_degree <= 3, "conflict graph on the low set has degree above 3");
  std::vector<Color> psi_h(h.to_parent.size());
  for (NodeId i = 0; i < psi_h.size(); ++i) psi_h[i] = psi[h.to_parent[i]];
  const ColoringResult lin = linial_reduce(h.graph, psi_h, K, 3, options);
  out.stats += lin.stats;
  const MisResult mis = mis_by_colors(h.graph, lin.colors, lin.classes, options);
  out.stats += mis.stats;
  out.mis_size = mis.size();
  for (NodeId i = 0; i < psi_h.size(); ++i) {
    if (mis.in_set[i]) out.coloring.assignment[h.to_parent[i]] = state.candidates[h.to_parent[i]].front();
  }
  return out;
}

FinishResult finish_avoid_mis(const PrefixState& state, std::span<const NodeId> ids, const RunOptions& options) {
  require_final(state);
  const NodeId n = state.size();
  require(ids.size() == n, "finish_avoid_mis: need one id per node");
  const Graph gc = conflict_graph(state);
  FinishResult out;
  out.coloring = PartialColoring(n);
  std::vector<bool> low(n);
  for (NodeId v = 0; v < n; ++v) {
    low[v] = gc.degree(v) <= 1;
    out.low_count += low[v];
  }
  out.stats += exchange_flags(gc, low, options);
  for (NodeId v = 0; v < n; ++v) {
    if (!low[v]) continue;
    std::size_t low_neighbors = 0;
    bool keep = true;
    for (NodeId u : gc.neighbors(v)) {
      if (!low[u]) continue;
      ++low_neighbors;
      if (ids[u] > ids[v]) keep = false;
    }
    out.max_conflict_degree = std::max(out.max_conflict_degree, low_neighbors);
    if (keep) out.coloring.assignment[v] = state.candidates[v].front();
  }
  require(out.max_conflict_degree <= 1, "conflict graph on the low set is not a matching");
  return out;
}

namespace detail {

RunOptions RoundBudget::next() const {
  RunOptions o = base_;
  o.round_cap = cap_ == 0 ? 0 : std::max<std::uint64_t>(cap_ - std::min(cap_, total_.rounds), 1);
  return o;
}

void RoundBudget::charge(const RunStats& stats) {
  total_ += stats;
  if (cap_ != 0 && total_.rounds > cap_) {
    throw RoundCapExceeded("round cap of " + std::to_string(cap_) + " exceeded");
  }
}

namespace {

struct PhaseInput {
  const Graph* host = nullptr;
  const ListColoringInstance* inst = nullptr;  // carries psi
  std::span<const NodeId> to_host;
  std::span<const LevelGroup> groups;
  std::size_t index = 0;
};

PhaseResult run_phase(const PhaseInput& in, const PipelineConfig& config, RoundBudget& budget) {
  const ListColoringInstance& original = *in.inst;
  require(original.psi.has_value(), "phase instance needs an input coloring");
  const ListColoringInstance inst = config.mode == Mode::avoid_mis ? trim_lists(original) : original;
  const NodeId n = inst.graph.size();
  const std::uint64_t rounds_before = budget.total().rounds;

  PhaseResult out;
  PhaseReport& rep = out.report;
  rep.phase = in.index;
  rep.nodes_at_start = n;
  rep.K = inst.psi->classes;

  PrefixState state = init_state(inst);
  rep.phi_initial = phi_sum(state);
  require(rep.phi_initial == phi_sum_edges(state), "node and edge potential sums disagree");
  require(n == 0 || rep.phi_initial < Rational(static_cast<unsigned long>(n)), "initial potential is not below n");

  const int w = state.width;
  const std::uint64_t delta = inst.graph.max_degree();
  rep.b = config.mode == Mode::mis ? accuracy_bits(delta, w) : accuracy_bits_boosted(delta, w);
  std::uint32_t depth = 0;
  for (const LevelGroup& g : in.groups) depth = std::max(depth, g.tree->depth);

  for (int level = 1; level <= w; ++level) {
    const LevelContext ctx = make_level_context(state, inst.psi->colors, inst.psi->classes, rep.b);
    LevelSetup setup;
    setup.host = in.host;
    setup.to_host = in.to_host;
    setup.ctx = &ctx;
    setup.groups = in.groups;
    setup.strategy = config.strategy;
    setup.seed_cap = config.seed_cap;
    setup.options = budget.next();
    LevelResult res = fix_level(setup);
    budget.charge(res.stats);

    LevelSummary sum;
    sum.level = level;
    sum.phi_before = phi_sum(state);
    sum.phi_after = phi_sum(res.next);
    sum.bound = sum.phi_before + Rational(static_cast<unsigned long>(n)) / w;
    sum.rounds = res.stats.rounds;
    sum.depth = depth;
    sum.seed_len = ctx.family.seed_len();
    sum.chain_checks = res.chain_checks;
    require(sum.phi_after <= sum.bound, "level " + std::to_string(level) + ": potential bound violated");
    require(sum.phi_after == phi_sum_edges(res.next), "node and edge potential sums disagree");
    require(sum.rounds <= 1 + static_cast<std::uint64_t>(sum.seed_len) * (2 * depth + 2),
            "level " + std::to_string(level) + ": round bound exceeded");
    rep.levels.push_back(sum);
    state = std::move(res.next);
  }
  rep.phi_final = phi_sum(state);
  const Rational nq(static_cast<unsigned long>(n));
  if (config.mode == Mode::mis) {
    require(rep.phi_final <= 2 * nq, "final potential above 2n");
  } else {
    require(n == 0 || rep.phi_final < nq, "final potential not below n");
  }

  FinishResult fin;
  if (config.mode == Mode::mis) {
    fin = finish_mis(state, inst.psi->colors, inst.psi->classes, budget.next());
  } else {
    fin = finish_avoid_mis(state, in.to_host, budget.next());
  }
  budget.charge(fin.stats);
  rep.low_count = fin.low_count;
  rep.mis_size = fin.mis_size;
  rep.max_conflict_degree = fin.max_conflict_degree;
  out.coloring = std::move(fin.coloring);
  rep.nodes_colored = static_cast<NodeId>(out.coloring.colored_count());

  // Newly colored nodes tell their neighbors.
  std::vector<bool> active(n);
  std::vector<std::uint64_t> values(n);
  for (NodeId v = 0; v < n; ++v) {
    active[v] = out.coloring.assignment[v].has_value();
    values[v] = active[v] ? *out.coloring.assignment[v] : 0;
  }
  budget.charge(announce(inst.graph, active, values, bits_for(inst.C > 0 ? inst.C - 1 : 0), budget.next()).stats);

  const std::string where = "phase " + std::to_string(in.index);
  const VerifyReport vr = verify_coloring(original, out.coloring, false);
  require(vr.ok(), where + ": " + vr.first_violation());
  if (config.mode == Mode::mis) {
    require(rep.low_count >= (n + 1) / 2, where + ": fewer than half the nodes have potential below 4");
    require(rep.nodes_colored >= (n + 7) / 8, where + ": colored fewer than n/8 nodes");
  } else {
    require(rep.low_count >= (n + 1) / 2, where + ": fewer than half the nodes have potential at most 1");
    require(rep.nodes_colored >= (n + 3) / 4, where + ": colored fewer than n/4 nodes");
  }
  rep.rounds = budget.total().rounds - rounds_before;
  out.stats = budget.total();
  return out;
}

}  // namespace

LoopResult color_loop(const LoopInput& in, const PipelineConfig& config, RoundBudget& budget, std::size_t phase_offset) {
  const ListColoringInstance& sub = *in.sub;
  const NodeId n = sub.graph.size();
  LoopResult out;
  out.coloring = PartialColoring(n);
  std::size_t colored = 0;
  const std::uint64_t max_phases = phase_bound(config.mode, n);
  while (colored < n) {
    const std::uint64_t rounds_before = budget.total().rounds;
    ResidualInstance res = residual_instance(sub, out.coloring);
    ListColoringInstance& R = res.instance;
    const NodeId rn = R.graph.size();
    std::vector<NodeId> to_host(rn);
    std::vector<Color> psi(rn);
    for (NodeId v = 0; v < rn; ++v) {
      to_host[v] = in.sub_to_host[res.to_original[v]];
      psi[v] = in.psi[res.to_original[v]];
    }
    std::uint64_t K = in.K;
    if (config.kmode == KMode::linial) {
      RunOptions o = budget.next();
      ColoringResult lin = linial_reduce(R.graph, psi, K, R.graph.max_degree(), o);
      budget.charge(lin.stats);
      psi = std::move(lin.colors);
      K = lin.classes;
    }
    R.psi = InputColoring{psi, static_cast<Color>(K)};

    std::vector<LevelGroup> groups;
    std::vector<int> group_index(in.trees.size(), -1);
    for (NodeId v = 0; v < rn; ++v) {
      const std::size_t t = in.tree_of[res.to_original[v]];
      if (group_index[t] < 0) {
        group_index[t] = static_cast<int>(groups.size());
        groups.push_back(LevelGroup{&in.trees[t], {}});
      }
      groups[group_index[t]].members.push_back(v);
    }

    PhaseInput pin{in.host, &R, to_host, groups, phase_offset + out.phases.size() + 1};
    PhaseResult phase = run_phase(pin, config, budget);
    for (NodeId v = 0; v < rn; ++v) {
      if (phase.coloring.assignment[v]) {
        out.coloring.assignment[res.to_original[v]] = phase.coloring.assignment[v];
        ++colored;
      }
    }
    for (const LevelSummary& l : phase.report.levels) out.chain_checks += l.chain_checks;
    phase.report.rounds = budget.total().rounds - rounds_before;
    if (config.trace) {
      config.trace->annotate({{"phase", phase.report.phase},
                              {"colored", phase.report.nodes_colored},
                              {"remaining", n - colored},
                              {"phi_final", to_string(phase.report.phi_final)},
                              {"rounds", phase.report.rounds}});
    }
    out.phases.push_back(std::move(phase.report));
    require(out.phases.size() <= max_phases, "phase count exceeds " + std::to_string(max_phases));
  }
  return out;
}

}  // namespace detail

namespace {

struct Forest {
  std::vector<BfsTree> trees;
  std::vector<std::size_t> tree_of;
};

Forest component_forest(const Graph& g, detail::RoundBudget& budget) {
  std::vector<NodeId> roots;
  std::vector<std::size_t> index_of_component(g.component_count());
  std::vector<bool> seen(g.component_count(), false);
  for (NodeId v = 0; v < g.size(); ++v) {
    const NodeId c = g.component()[v];
    if (seen[c]) continue;
    seen[c] = true;
    index_of_component[c] = roots.size();
    roots.push_back(v);
  }
  BfsForestResult bfs = build_bfs_forest(g, roots, budget.next());
  budget.charge(bfs.stats);
  Forest f;
  f.trees = std::move(bfs.trees);
  f.tree_of.resize(g.size());
  for (NodeId v = 0; v < g.size(); ++v) f.tree_of[v] = index_of_component[g.component()[v]];
  return f;
}

std::pair<std::vector<Color>, std::uint64_t> input_coloring(const ListColoringInstance& inst) {
  if (inst.psi) return {inst.psi->colors, std::max<std::uint64_t>(inst.psi->classes, 1)};
  std::vector<Color> ids(inst.graph.size());
  for (NodeId v = 0; v < ids.size(); ++v) ids[v] = v;
  return {ids, std::max<std::uint64_t>(inst.graph.size(), 1)};
}

RunOptions base_options(const PipelineConfig& config, NodeId n) {
  RunOptions o;
  o.policy = config.bandwidth;
  o.trace = config.trace;
  o.network_size = n;
  return o;
}

}  // namespace

PhaseResult color_fraction(const ListColoringInstance& inst, const PipelineConfig& config) {
  validate_instance(inst);
  require(inst.psi.has_value(), "color_fraction needs an input coloring");
  const Graph& g = inst.graph;
  const std::uint64_t cap = config.round_cap
                                ? config.round_cap
                                : default_round_cap(g.diameter(), inst.C, inst.psi->classes, g.max_degree());
  detail::RoundBudget budget(cap, base_options(config, g.size()));
  const Forest forest = component_forest(g, budget);
  std::vector<LevelGroup> groups;
  std::vector<int> index(forest.trees.size(), -1);
  for (NodeId v = 0; v < g.size(); ++v) {
    const std::size_t t = forest.tree_of[v];
    if (index[t] < 0) {
      index[t] = static_cast<int>(groups.size());
      groups.push_back(LevelGroup{&forest.trees[t], {}});
    }
    groups[index[t]].members.push_back(v);
  }
  std::vector<NodeId> identity(g.size());
  for (NodeId v = 0; v < g.size(); ++v) identity[v] = v;
  detail::PhaseInput pin{&g, &inst, identity, groups, 1};
  return detail::run_phase(pin, config, budget);
}

ColoringRun list_color_full(const ListColoringInstance& inst, const PipelineConfig& config) {
  validate_instance(inst);
  const Graph& g = inst.graph;
  const auto [psi, K] = input_coloring(inst);
  const std::uint64_t cap =
      config.round_cap ? config.round_cap : default_round_cap(g.diameter(), inst.C, K, g.max_degree());
  detail::RoundBudget budget(cap, base_options(config, g.size()));
  const Forest forest = component_forest(g, budget);
  std::vector<NodeId> identity(g.size());
  for (NodeId v = 0; v < g.size(); ++v) identity[v] = v;

  detail::LoopInput in;
  in.host = &g;
  in.sub = &inst;
  in.sub_to_host = identity;
  in.trees = forest.trees;
  in.tree_of = forest.tree_of;
  in.psi = psi;
  in.K = K;
  detail::LoopResult loop = detail::color_loop(in, config, budget);

  const VerifyReport vr = verify_coloring(inst, loop.coloring, true);
  require(vr.ok(), "final coloring invalid: " + vr.first_violation());
  ColoringRun out;
  out.coloring = std::move(loop.coloring);
  out.phases = std::move(loop.phases);
  out.stats = budget.total();
  out.round_cap = cap;
  out.chain_checks = loop.chain_checks;
  return out;
}

}  // namespace dcolor
