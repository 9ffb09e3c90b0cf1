#include "dcolor/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace dcolor {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

std::string edge_name(NodeId u, NodeId v) {
  return "{" + std::to_string(u) + "," + std::to_string(v) + "}";
}

}  // namespace

Graph::Graph(NodeId n, std::span<const Edge> edges) : adj_(n) {
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw ValidationError("edge " + edge_name(e.u, e.v) + " out of range");
    if (e.u == e.v) throw ValidationError("self-loop at node " + std::to_string(e.u));
    adj_[e.u].push_back(e.v);
    adj_[e.v].push_back(e.u);
  }
  for (NodeId v = 0; v < n; ++v) {
    auto& nb = adj_[v];
    std::sort(nb.begin(), nb.end());
    auto dup = std::adjacent_find(nb.begin(), nb.end());
    if (dup != nb.end()) throw ValidationError("parallel edge " + edge_name(std::min(v, *dup), std::max(v, *dup)));
    max_degree_ = std::max(max_degree_, nb.size());
    edge_count_ += nb.size();
  }
  edge_count_ /= 2;

  component_.assign(n, kUnreached);
  for (NodeId s = 0; s < n; ++s) {
    if (component_[s] != kUnreached) continue;
    std::deque<NodeId> queue{s};
    component_[s] = component_count_;
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId w : adj_[u]) {
        if (component_[w] == kUnreached) {
          component_[w] = component_count_;
          queue.push_back(w);
        }
      }
    }
    ++component_count_;
  }

  for (NodeId s = 0; s < n; ++s) {
    for (std::uint32_t d : bfs_distances(*this, s)) {
      if (d != kUnreached) diameter_ = std::max(diameter_, d);
    }
  }
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= size() || v >= size()) return false;
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < size(); ++u) {
    for (NodeId v : adj_[u]) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source) {
  std::vector<std::uint32_t> dist(g.size(), kUnreached);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] == kUnreached) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<std::int64_t> local(g.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<std::int64_t>(i);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (NodeId w : g.neighbors(nodes[i])) {
      if (local[w] > static_cast<std::int64_t>(i)) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(local[w])});
      }
    }
  }
  return {Graph(static_cast<NodeId>(nodes.size()), edges), std::vector<NodeId>(nodes.begin(), nodes.end())};
}

void validate_instance(const ListColoringInstance& inst) {
  const Graph& g = inst.graph;
  if (inst.lists.size() != g.size()) throw ValidationError("list count does not match node count");
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto& list = inst.lists[v];
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] >= inst.C) {
        throw ValidationError("node " + std::to_string(v) + ": color " + std::to_string(list[i]) +
                              " outside color space [" + std::to_string(inst.C) + "]");
      }
      if (i > 0 && list[i - 1] >= list[i]) {
        throw ValidationError("node " + std::to_string(v) + ": list not sorted or has duplicates");
      }
    }
    if (list.size() < g.degree(v) + 1) {
      throw ValidationError("node " + std::to_string(v) + ": list size " + std::to_string(list.size()) +
                            " < deg+1 = " + std::to_string(g.degree(v) + 1));
    }
  }
  if (inst.psi) {
    const auto& psi = *inst.psi;
    if (psi.colors.size() != g.size()) throw ValidationError("psi size does not match node count");
    for (NodeId v = 0; v < g.size(); ++v) {
      if (psi.colors[v] >= psi.classes) {
        throw ValidationError("psi of node " + std::to_string(v) + " outside [" + std::to_string(psi.classes) + "]");
      }
    }
    for (const Edge& e : g.edges()) {
      if (psi.colors[e.u] == psi.colors[e.v]) throw ValidationError("psi not proper on edge " + edge_name(e.u, e.v));
    }
  }
}

ListColoringInstance attach_default_lists(Graph graph) {
  ListColoringInstance inst;
  inst.C = static_cast<Color>(graph.max_degree() + 1);
  inst.lists.resize(graph.size());
  for (NodeId v = 0; v < graph.size(); ++v) {
    auto& list = inst.lists[v];
    list.resize(graph.degree(v) + 1);
    for (std::size_t c = 0; c < list.size(); ++c) list[c] = static_cast<Color>(c);
  }
  inst.graph = std::move(graph);
  return inst;
}

std::size_t PartialColoring::colored_count() const {
  return static_cast<std::size_t>(
      std::count_if(assignment.begin(), assignment.end(), [](const auto& c) { return c.has_value(); }));
}

std::string VerifyReport::first_violation() const {
  if (!monochromatic.empty()) {
    return "monochromatic edge " + edge_name(monochromatic.front().u, monochromatic.front().v);
  }
  if (!out_of_list.empty()) return "node " + std::to_string(out_of_list.front()) + " colored outside its list";
  if (!uncolored.empty()) return "node " + std::to_string(uncolored.front()) + " is uncolored";
  return {};
}

VerifyReport verify_coloring(const ListColoringInstance& inst, const PartialColoring& coloring,
                             bool require_total) {
  VerifyReport report;
  const Graph& g = inst.graph;
  auto color_of = [&](NodeId v) -> std::optional<Color> {
    return v < coloring.assignment.size() ? coloring.assignment[v] : std::nullopt;
  };
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto c = color_of(v);
    if (!c) {
      if (require_total) report.uncolored.push_back(v);
      continue;
    }
    if (!std::binary_search(inst.lists[v].begin(), inst.lists[v].end(), *c)) report.out_of_list.push_back(v);
  }
  for (const Edge& e : g.edges()) {
    const auto a = color_of(e.u);
    const auto b = color_of(e.v);
    if (a && b && *a == *b) report.monochromatic.push_back(e);
  }
  return report;
}

ResidualInstance residual_instance(const ListColoringInstance& inst, const PartialColoring& coloring) {
  const Graph& g = inst.graph;
  std::vector<NodeId> keep;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (v >= coloring.assignment.size() || !coloring.assignment[v]) keep.push_back(v);
  }
  Subgraph sub = induced_subgraph(g, keep);

  ResidualInstance out;
  out.instance.C = inst.C;
  out.instance.lists.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const NodeId v = keep[i];
    std::vector<Color> taken;
    for (NodeId w : g.neighbors(v)) {
      if (w < coloring.assignment.size() && coloring.assignment[w]) taken.push_back(*coloring.assignment[w]);
    }
    std::sort(taken.begin(), taken.end());
    auto& list = out.instance.lists[i];
    std::set_difference(inst.lists[v].begin(), inst.lists[v].end(), taken.begin(), taken.end(),
                        std::back_inserter(list));
    require(list.size() >= sub.graph.degree(static_cast<NodeId>(i)) + 1,
            "residual list of node " + std::to_string(v) + " smaller than residual degree + 1");
  }
  if (inst.psi) {
    InputColoring psi;
    psi.classes = inst.psi->classes;
    for (NodeId v : keep) psi.colors.push_back(inst.psi->colors[v]);
    out.instance.psi = std::move(psi);
  }
  out.instance.graph = std::move(sub.graph);
  out.to_original = std::move(keep);
  return out;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

/// Uniform integer in [0, bound) from raw 64-bit output, rejection sampled.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in [0,1) from the top 53 bits.
double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<Edge> random_regular(NodeId n, std::uint32_t d, std::mt19937_64& rng) {
  if (d >= n && n > 0) throw ValidationError("regular graph needs d < n");
  if ((static_cast<std::uint64_t>(n) * d) % 2 != 0) throw ValidationError("regular graph needs n*d even");
  // Pair points one at a time, only ever joining suitable pairs; restart when stuck.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<NodeId> points;
    for (NodeId v = 0; v < n; ++v) points.insert(points.end(), d, v);
    std::set<Edge> chosen;
    bool stuck = false;
    while (!points.empty() && !stuck) {
      bool placed = false;
      for (int tries = 0; tries < 64 && !placed; ++tries) {
        const auto i = uniform_below(rng, points.size());
        const auto j = uniform_below(rng, points.size());
        const NodeId a = points[i];
        const NodeId b = points[j];
        if (i == j || a == b || chosen.count({std::min(a, b), std::max(a, b)})) continue;
        chosen.insert({std::min(a, b), std::max(a, b)});
        for (auto idx : {std::max(i, j), std::min(i, j)}) {
          points[idx] = points.back();
          points.pop_back();
        }
        placed = true;
      }
      if (!placed) {
        // Exhaustive check for any suitable pair before giving up.
        stuck = true;
        for (std::size_t i = 0; i < points.size() && stuck; ++i) {
          for (std::size_t j = i + 1; j < points.size(); ++j) {
            const NodeId a = points[i];
            const NodeId b = points[j];
            if (a != b && !chosen.count({std::min(a, b), std::max(a, b)})) {
              stuck = false;
              break;
            }
          }
        }
      }
    }
    if (!stuck) return {chosen.begin(), chosen.end()};
  }
  throw ValidationError("failed to generate regular graph");
}

}  // namespace

GeneratorSpec parse_generator_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.empty()) throw ParseError("empty generator spec");
  GeneratorSpec spec;
  const std::string& kind = parts[0];
  auto need = [&](std::size_t count) {
    if (parts.size() != count) throw ParseError("generator '" + kind + "' expects " + std::to_string(count - 1) + " parameters");
  };
  try {
    if (kind == "gnp") {
      need(3);
      spec.kind = GraphKind::gnp;
      spec.p = std::stod(parts[2]);
    } else if (kind == "regular") {
      need(3);
      spec.kind = GraphKind::regular;
      spec.d = static_cast<std::uint32_t>(std::stoul(parts[2]));
    } else {
      need(2);
      if (kind == "path") spec.kind = GraphKind::path;
      else if (kind == "cycle") spec.kind = GraphKind::cycle;
      else if (kind == "star") spec.kind = GraphKind::star;
      else if (kind == "clique") spec.kind = GraphKind::clique;
      else throw ParseError("unknown generator kind '" + kind + "'");
    }
    spec.n = static_cast<NodeId>(std::stoul(parts[1]));
  } catch (const std::logic_error&) {
    throw ParseError("bad generator parameters in '" + text + "'");
  }
  return spec;
}

std::string to_string(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GraphKind::gnp: {
      std::ostringstream os;
      os << "gnp," << spec.n << "," << spec.p;
      return os.str();
    }
    case GraphKind::regular: return "regular," + std::to_string(spec.n) + "," + std::to_string(spec.d);
    case GraphKind::path: return "path," + std::to_string(spec.n);
    case GraphKind::cycle: return "cycle," + std::to_string(spec.n);
    case GraphKind::star: return "star," + std::to_string(spec.n);
    case GraphKind::clique: return "clique," + std::to_string(spec.n);
  }
  return {};
}

Graph generate_graph(const GeneratorSpec& spec, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  const NodeId n = spec.n;
  std::vector<Edge> edges;
  switch (spec.kind) {
    case GraphKind::gnp:
      if (spec.p < 0.0 || spec.p > 1.0) throw ValidationError("gnp probability outside [0,1]");
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
          if (uniform_unit(rng) < spec.p) edges.push_back({u, v});
        }
      }
      break;
    case GraphKind::regular:
      edges = random_regular(n, spec.d, rng);
      break;
    case GraphKind::path:
      for (NodeId v = 1; v < n; ++v) edges.push_back({v - 1, v});
      break;
    case GraphKind::cycle:
      if (n < 3) throw ValidationError("cycle needs n >= 3");
      for (NodeId v = 1; v < n; ++v) edges.push_back({v - 1, v});
      edges.push_back({0, n - 1});
      break;
    case GraphKind::star:
      if (n < 1) throw ValidationError("star needs n >= 1");
      for (NodeId v = 1; v < n; ++v) edges.push_back({0, v});
      break;
    case GraphKind::clique:
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) edges.push_back({u, v});
      }
      break;
  }
  return Graph(n, edges);
}

}  // namespace dcolor
