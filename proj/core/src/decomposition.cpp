#include "dcolor/decomposition.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dcolor/common.hpp"

namespace dcolor {

const char* to_string(DecompProperty p) {
  switch (p) {
    case DecompProperty::partition: return "partition";
    case DecompProperty::tree: return "tree";
    case DecompProperty::contains_cluster: return "(i) tree contains cluster";
    case DecompProperty::diameter: return "(ii) tree diameter";
    case DecompProperty::coloring: return "(iii) adjacent clusters colored differently";
    case DecompProperty::congestion: return "(iv) congestion";
  }
  return "?";
}

bool DecompReport::has(DecompProperty p) const {
  return std::any_of(violations.begin(), violations.end(), [&](const DecompViolation& v) { return v.property == p; });
}

namespace {

std::string edge_str(const Edge& e) { return "{" + std::to_string(e.u) + "," + std::to_string(e.v) + "}"; }

Edge normalized(Edge e) {
  if (e.u > e.v) std::swap(e.u, e.v);
  return e;
}

// Farthest node and distance from `source` inside an adjacency map.
std::pair<NodeId, std::uint32_t> farthest(const std::map<NodeId, std::vector<NodeId>>& adj, NodeId source) {
  std::map<NodeId, std::uint32_t> dist{{source, 0}};
  std::deque<NodeId> queue{source};
  std::pair<NodeId, std::uint32_t> best{source, 0};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    const auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (NodeId w : it->second) {
      if (dist.count(w)) continue;
      dist[w] = dist[u] + 1;
      if (dist[w] > best.second) best = {w, dist[w]};
      queue.push_back(w);
    }
  }
  return best;
}

}  // namespace

DecompReport validate_decomposition(const Graph& g, const NetworkDecomposition& d) {
  DecompReport rep;
  auto flag = [&](DecompProperty p, std::string msg) { rep.violations.push_back({p, std::move(msg)}); };
  const NodeId n = g.size();
  std::vector<int> cluster_of(n, -1);
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    const Cluster& cl = d.clusters[c];
    const std::string name = "cluster " + std::to_string(cl.id);
    if (cl.color < 1 || cl.color > d.alpha) flag(DecompProperty::coloring, name + " has color outside 1..alpha");
    if (cl.nodes.empty()) flag(DecompProperty::partition, name + " is empty");
    for (NodeId v : cl.nodes) {
      if (v >= n) {
        flag(DecompProperty::partition, name + " lists node " + std::to_string(v) + " outside the graph");
      } else if (cluster_of[v] >= 0) {
        flag(DecompProperty::partition, "node " + std::to_string(v) + " is in two clusters");
      } else {
        cluster_of[v] = static_cast<int>(c);
      }
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (cluster_of[v] < 0) flag(DecompProperty::partition, "node " + std::to_string(v) + " is in no cluster");
  }

  // Per-cluster trees: shape, containment, diameter.
  std::map<std::pair<std::uint32_t, Edge>, std::uint32_t> same_color_load;
  for (const Cluster& cl : d.clusters) {
    const std::string name = "cluster " + std::to_string(cl.id);
    std::map<NodeId, std::vector<NodeId>> adj;
    std::set<Edge> seen;
    bool shape_ok = true;
    for (Edge e : cl.tree_edges) {
      e = normalized(e);
      if (e.v >= n || !g.has_edge(e.u, e.v)) {
        flag(DecompProperty::tree, name + " tree edge " + edge_str(e) + " is not a graph edge");
        shape_ok = false;
        continue;
      }
      if (!seen.insert(e).second) {
        flag(DecompProperty::tree, name + " repeats tree edge " + edge_str(e));
        shape_ok = false;
        continue;
      }
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
      ++same_color_load[{cl.color, e}];
    }
    std::set<NodeId> tree_nodes;
    for (const auto& [v, _] : adj) tree_nodes.insert(v);
    if (cl.nodes.size() == 1 && cl.tree_edges.empty()) tree_nodes.insert(cl.nodes.front());
    for (NodeId v : cl.nodes) {
      if (!tree_nodes.count(v)) flag(DecompProperty::contains_cluster, name + " tree misses node " + std::to_string(v));
    }
    if (tree_nodes.empty()) continue;
    if (seen.size() + 1 != tree_nodes.size()) shape_ok = false;
    if (shape_ok) {
      // Connected with |E| = |V| - 1 means a tree.
      std::set<NodeId> reach;
      std::deque<NodeId> queue{*tree_nodes.begin()};
      reach.insert(*tree_nodes.begin());
      while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (NodeId w : adj[u]) {
          if (reach.insert(w).second) queue.push_back(w);
        }
      }
      shape_ok = reach.size() == tree_nodes.size();
    }
    if (!shape_ok) {
      flag(DecompProperty::tree, name + " tree edges do not form a tree");
      continue;
    }
    const NodeId end = farthest(adj, *tree_nodes.begin()).first;
    const std::uint32_t diameter = farthest(adj, end).second;
    rep.max_tree_diameter = std::max(rep.max_tree_diameter, diameter);
    if (d.beta && diameter > *d.beta) {
      flag(DecompProperty::diameter, name + " tree diameter " + std::to_string(diameter) + " exceeds beta " +
                                         std::to_string(*d.beta));
    }
  }

  for (const Edge& e : g.edges()) {
    const int cu = cluster_of[e.u];
    const int cv = cluster_of[e.v];
    if (cu < 0 || cv < 0 || cu == cv) continue;
    if (d.clusters[cu].color == d.clusters[cv].color) {
      flag(DecompProperty::coloring, "adjacent clusters " + std::to_string(d.clusters[cu].id) + " and " +
                                         std::to_string(d.clusters[cv].id) + " share color " +
                                         std::to_string(d.clusters[cu].color) + " on edge " + edge_str(e));
    }
  }

  for (const auto& [key, load] : same_color_load) {
    rep.measured_kappa = std::max(rep.measured_kappa, load);
    if (d.kappa && load > *d.kappa) {
      flag(DecompProperty::congestion, "edge " + edge_str(key.second) + " lies in " + std::to_string(load) +
                                           " trees of color " + std::to_string(key.first) + ", kappa is " +
                                           std::to_string(*d.kappa));
    }
  }
  if (rep.measured_kappa == 0) rep.measured_kappa = 1;
  return rep;
}

NetworkDecomposition generate_decomposition(const Graph& g) {
  const NodeId n = g.size();
  NetworkDecomposition d;
  std::vector<bool> done(n, false);
  std::size_t remaining = n;
  std::uint32_t color = 0;
  while (remaining > 0) {
    ++color;
    std::vector<bool> available(n);
    for (NodeId v = 0; v < n; ++v) available[v] = !done[v];
    for (NodeId center = 0; center < n; ++center) {
      if (!available[center]) continue;
      // Grow a BFS ball inside the available nodes while the next layer
      // holds at least half as many nodes as the ball.
      std::vector<NodeId> ball{center};
      std::vector<std::optional<NodeId>> parent(n);
      std::vector<bool> in_ball(n, false);
      in_ball[center] = true;
      std::vector<NodeId> frontier{center};
      std::vector<NodeId> layer;
      for (;;) {
        layer.clear();
        std::vector<bool> in_layer(n, false);
        for (NodeId u : frontier) {
          for (NodeId w : g.neighbors(u)) {
            if (!available[w] || in_ball[w] || in_layer[w]) continue;
            in_layer[w] = true;
            parent[w] = u;
            layer.push_back(w);
          }
        }
        std::sort(layer.begin(), layer.end());
        if (layer.empty() || 2 * layer.size() < ball.size()) break;
        for (NodeId w : layer) in_ball[w] = true;
        ball.insert(ball.end(), layer.begin(), layer.end());
        frontier = layer;
      }
      Cluster cl;
      cl.id = static_cast<std::uint32_t>(d.clusters.size());
      cl.color = color;
      std::sort(ball.begin(), ball.end());
      cl.nodes = ball;
      for (NodeId v : ball) {
        if (parent[v] && in_ball[*parent[v]]) cl.tree_edges.push_back(normalized({*parent[v], v}));
        available[v] = false;
        done[v] = true;
      }
      std::sort(cl.tree_edges.begin(), cl.tree_edges.end());
      remaining -= ball.size();
      for (NodeId w : layer) available[w] = false;
      d.clusters.push_back(std::move(cl));
    }
  }
  d.alpha = color;
  return d;
}

NetworkDecomposition parse_decomposition(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("decomposition JSON: ") + e.what());
  }
  try {
    NetworkDecomposition d;
    d.alpha = j.at("alpha").get<std::uint32_t>();
    if (j.contains("beta")) d.beta = j.at("beta").get<std::uint32_t>();
    if (j.contains("kappa")) d.kappa = j.at("kappa").get<std::uint32_t>();
    for (const auto& c : j.at("clusters")) {
      Cluster cl;
      cl.id = c.at("id").get<std::uint32_t>();
      cl.color = c.at("color").get<std::uint32_t>();
      cl.nodes = c.at("nodes").get<std::vector<NodeId>>();
      for (const auto& e : c.at("tree_edges")) {
        if (!e.is_array() || e.size() != 2) throw ParseError("tree edge must be a pair");
        cl.tree_edges.push_back({e[0].get<NodeId>(), e[1].get<NodeId>()});
      }
      d.clusters.push_back(std::move(cl));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("decomposition JSON: ") + e.what());
  }
}

NetworkDecomposition load_decomposition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_decomposition(ss.str());
}

std::string decomposition_to_json(const NetworkDecomposition& d) {
  nlohmann::json j;
  j["alpha"] = d.alpha;
  if (d.beta) j["beta"] = *d.beta;
  if (d.kappa) j["kappa"] = *d.kappa;
  j["clusters"] = nlohmann::json::array();
  for (const Cluster& cl : d.clusters) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : cl.tree_edges) edges.push_back({e.u, e.v});
    j["clusters"].push_back({{"id", cl.id}, {"color", cl.color}, {"nodes", cl.nodes}, {"tree_edges", edges}});
  }
  return j.dump();
}

DecompositionRun color_with_decomposition(const ListColoringInstance& inst, const NetworkDecomposition& d,
                                          const PipelineConfig& config) {
  validate_instance(inst);
  const Graph& g = inst.graph;
  const NodeId n = g.size();
  const DecompReport check = validate_decomposition(g, d);
  if (!check.ok()) {
    throw ValidationError(std::string("invalid decomposition: ") + to_string(check.violations.front().property) +
                          ": " + check.violations.front().message);
  }

  std::vector<Color> psi(n);
  std::uint64_t K = std::max<std::uint64_t>(n, 1);
  if (inst.psi) {
    psi = inst.psi->colors;
    K = std::max<std::uint64_t>(inst.psi->classes, 1);
  } else {
    for (NodeId v = 0; v < n; ++v) psi[v] = v;
  }

  RunOptions base;
  base.policy = config.bandwidth;
  base.trace = config.trace;
  base.network_size = n;
  const std::uint64_t D = std::max<std::uint64_t>(g.diameter(), check.max_tree_diameter);
  const std::uint64_t cap = config.round_cap ? config.round_cap : default_round_cap(D, inst.C, K, g.max_degree());
  detail::RoundBudget budget(cap, base);

  std::vector<BfsTree> trees;
  for (const Cluster& cl : d.clusters) {
    const NodeId root = *std::min_element(cl.nodes.begin(), cl.nodes.end());
    trees.push_back(tree_from_edges(n, root, cl.tree_edges, cl.nodes));
  }
  std::vector<std::size_t> cluster_of(n);
  for (std::size_t c = 0; c < d.clusters.size(); ++c) {
    for (NodeId v : d.clusters[c].nodes) cluster_of[v] = c;
  }

  DecompositionRun out;
  out.measured_kappa = check.measured_kappa;
  PartialColoring coloring(n);
  std::size_t phases_so_far = 0;
  for (std::uint32_t k = 1; k <= d.alpha; ++k) {
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < n; ++v) {
      if (d.clusters[cluster_of[v]].color == k) nodes.push_back(v);
    }
    if (nodes.empty()) continue;
    const Subgraph sg = induced_subgraph(g, nodes);
    for (const Edge& e : sg.graph.edges()) {
      require(cluster_of[sg.to_parent[e.u]] == cluster_of[sg.to_parent[e.v]],
              "two adjacent clusters active in color class " + std::to_string(k));
    }
    ListColoringInstance sub;
    sub.graph = sg.graph;
    sub.C = inst.C;
    sub.lists.resize(nodes.size());
    std::vector<Color> sub_psi(nodes.size());
    std::vector<std::size_t> tree_of(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) {
      const NodeId v = sg.to_parent[i];
      std::set<Color> taken;
      for (NodeId u : g.neighbors(v)) {
        if (coloring.assignment[u]) taken.insert(*coloring.assignment[u]);
      }
      for (Color c : inst.lists[v]) {
        if (!taken.count(c)) sub.lists[i].push_back(c);
      }
      require(sub.lists[i].size() >= sub.graph.degree(i) + 1,
              "list of node " + std::to_string(v) + " too short at hand-off to color class " + std::to_string(k));
      sub_psi[i] = psi[v];
      tree_of[i] = cluster_of[v];
    }

    detail::LoopInput in;
    in.host = &g;
    in.sub = &sub;
    in.sub_to_host = sg.to_parent;
    in.trees = trees;
    in.tree_of = tree_of;
    in.psi = sub_psi;
    in.K = K;
    const RunStats before = budget.total();
    detail::LoopResult loop = detail::color_loop(in, config, budget, phases_so_far);
    const RunStats& after = budget.total();
    const std::uint64_t raw = after.rounds - before.rounds;
    const std::uint64_t charged = after.charged_rounds - before.charged_rounds;
    require(charged <= static_cast<std::uint64_t>(check.measured_kappa) * raw,
            "color class " + std::to_string(k) + ": charged rounds exceed kappa times raw rounds");
    out.class_rounds.push_back({raw, charged});
    for (NodeId i = 0; i < nodes.size(); ++i) {
      require(loop.coloring.assignment[i].has_value(), "color class left a node uncolored");
      coloring.assignment[sg.to_parent[i]] = loop.coloring.assignment[i];
    }
    phases_so_far += loop.phases.size();
    out.run.chain_checks += loop.chain_checks;
    for (auto& p : loop.phases) out.run.phases.push_back(std::move(p));
  }
  const VerifyReport vr = verify_coloring(inst, coloring, true);
  require(vr.ok(), "decomposition coloring invalid: " + vr.first_violation());
  out.run.coloring = std::move(coloring);
  out.run.stats = budget.total();
  out.run.round_cap = cap;
  out.max_edge_load = out.run.stats.max_edge_load;
  require(out.max_edge_load <= out.measured_kappa, "an edge carried more messages per round than kappa");
  return out;
}

}  // namespace dcolor
