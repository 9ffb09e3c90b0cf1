#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcolor/common.hpp"

namespace dcolor {

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Simple undirected graph on nodes 0..n-1 with sorted adjacency lists.
/// Immutable after construction.
class Graph {
 public:
  Graph() = default;
  /// Throws ValidationError on self-loops, parallel edges or out-of-range ends.
  Graph(NodeId n, std::span<const Edge> edges);

  NodeId size() const { return static_cast<NodeId>(adj_.size()); }
  std::span<const NodeId> neighbors(NodeId v) const { return adj_[v]; }
  std::size_t degree(NodeId v) const { return adj_[v].size(); }
  std::size_t max_degree() const { return max_degree_; }
  std::size_t edge_count() const { return edge_count_; }
  bool has_edge(NodeId u, NodeId v) const;

  /// All edges with u < v, sorted.
  std::vector<Edge> edges() const;

  /// Maximum eccentricity over all connected components.
  std::uint32_t diameter() const { return diameter_; }

  /// Component index per node; components are numbered by smallest member.
  const std::vector<NodeId>& component() const { return component_; }
  NodeId component_count() const { return component_count_; }

 private:
  std::vector<std::vector<NodeId>> adj_;
  std::size_t max_degree_ = 0;
  std::size_t edge_count_ = 0;
  std::uint32_t diameter_ = 0;
  std::vector<NodeId> component_;
  NodeId component_count_ = 0;
};

/// BFS distances from `source`; unreachable nodes get UINT32_MAX.
std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source);

struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_parent;  // local id -> parent id
};

/// Graph induced on `nodes` (sorted ascending), relabelled densely.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// Proper input coloring psi: V -> [classes].
struct InputColoring {
  std::vector<Color> colors;
  Color classes = 0;
};

struct ListColoringInstance {
  Graph graph;
  Color C = 0;                            // color space [C]
  std::vector<std::vector<Color>> lists;  // sorted, duplicate free
  std::optional<InputColoring> psi;
};

/// Throws ValidationError naming the violated invariant and node/edge.
void validate_instance(const ListColoringInstance& inst);

/// L(v) = {0..deg(v)}, C = max degree + 1.
ListColoringInstance attach_default_lists(Graph graph);

struct PartialColoring {
  std::vector<std::optional<Color>> assignment;

  PartialColoring() = default;
  explicit PartialColoring(NodeId n) : assignment(n) {}
  std::size_t colored_count() const;
};

struct VerifyReport {
  std::vector<Edge> monochromatic;
  std::vector<NodeId> out_of_list;
  std::vector<NodeId> uncolored;

  bool ok() const { return monochromatic.empty() && out_of_list.empty() && uncolored.empty(); }
  /// First violation in human-readable form; empty when ok().
  std::string first_violation() const;
};

VerifyReport verify_coloring(const ListColoringInstance& inst, const PartialColoring& coloring,
                             bool require_total);

struct ResidualInstance {
  ListColoringInstance instance;
  std::vector<NodeId> to_original;
};

/// Instance induced on the uncolored nodes; each list loses the colors
/// taken by colored neighbors. psi, when present, is restricted.
ResidualInstance residual_instance(const ListColoringInstance& inst, const PartialColoring& coloring);

enum class GraphKind { gnp, regular, path, cycle, star, clique };

struct GeneratorSpec {
  GraphKind kind = GraphKind::path;
  NodeId n = 0;
  double p = 0.0;         // gnp
  std::uint32_t d = 0;    // regular
};

/// Parses "gnp,N,P", "regular,N,D", "path,N", "cycle,N", "star,N", "clique,N".
GeneratorSpec parse_generator_spec(const std::string& text);
std::string to_string(const GeneratorSpec& spec);

/// Deterministic for a fixed seed on every platform (uses the raw
/// mt19937_64 stream, no std distributions).
Graph generate_graph(const GeneratorSpec& spec, std::uint64_t rng_seed);

// JSON instance / coloring files.
ListColoringInstance parse_instance(const std::string& json_text);
ListColoringInstance load_instance(const std::filesystem::path& path);
std::string instance_to_json(const ListColoringInstance& inst);
void save_instance(const ListColoringInstance& inst, const std::filesystem::path& path);

PartialColoring parse_coloring(const std::string& json_text, NodeId n);
PartialColoring load_coloring(const std::filesystem::path& path, NodeId n);
std::string coloring_to_json(const PartialColoring& coloring);

}  // namespace dcolor
