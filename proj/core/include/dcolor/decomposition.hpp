#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dcolor/graph.hpp"
#include "dcolor/pipeline.hpp"

namespace dcolor {

struct Cluster {
  std::uint32_t id = 0;
  std::uint32_t color = 1;  // in 1..alpha
  std::vector<NodeId> nodes;
  std::vector<Edge> tree_edges;
};

/// Clusters partition V; each has a tree in G containing its nodes.
/// beta and kappa are optional declared bounds; when absent the measured
/// values are used.
struct NetworkDecomposition {
  std::uint32_t alpha = 0;
  std::vector<Cluster> clusters;
  std::optional<std::uint32_t> beta;
  std::optional<std::uint32_t> kappa;
};

enum class DecompProperty { partition, tree, contains_cluster, diameter, coloring, congestion };
const char* to_string(DecompProperty p);

struct DecompViolation {
  DecompProperty property;
  std::string message;
};

struct DecompReport {
  std::vector<DecompViolation> violations;
  std::uint32_t max_tree_diameter = 0;
  std::uint32_t measured_kappa = 0;

  bool ok() const { return violations.empty(); }
  bool has(DecompProperty p) const;
};

DecompReport validate_decomposition(const Graph& g, const NetworkDecomposition& d);

/// Constant c in alpha, beta <= c * max(1, ceil(log2 n)) for generated decompositions.
inline constexpr std::uint32_t kDecompositionConstant = 4;

/// Sequential ball carving: strong-diameter clusters, kappa = 1.
NetworkDecomposition generate_decomposition(const Graph& g);

NetworkDecomposition parse_decomposition(const std::string& json_text);
NetworkDecomposition load_decomposition(const std::filesystem::path& path);
std::string decomposition_to_json(const NetworkDecomposition& d);

struct DecompositionRun {
  ColoringRun run;
  std::uint32_t measured_kappa = 0;
  /// Per color class: raw rounds and rounds after charging shared tree edges.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> class_rounds;
  std::uint32_t max_edge_load = 0;
};

/// Colors the instance one decomposition color class at a time; clusters
/// of one class run together, each agreeing on seeds over its own tree.
DecompositionRun color_with_decomposition(const ListColoringInstance& inst, const NetworkDecomposition& d,
                                          const PipelineConfig& config = {});

}  // namespace dcolor
