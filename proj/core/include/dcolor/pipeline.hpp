#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dcolor/congest.hpp"
#include "dcolor/derand.hpp"
#include "dcolor/graph.hpp"
#include "dcolor/potential.hpp"

namespace dcolor {

enum class Mode { mis, avoid_mis };
enum class KMode { linial, ids };

const char* to_string(Mode m);
const char* to_string(KMode k);
const char* to_string(Strategy s);
Mode parse_mode(const std::string& text);
KMode parse_kmode(const std::string& text);
Strategy parse_strategy(const std::string& text);

struct PipelineConfig {
  Mode mode = Mode::mis;
  KMode kmode = KMode::linial;
  Strategy strategy = Strategy::conditional;
  BandwidthPolicy bandwidth = BandwidthPolicy::measure();
  std::uint64_t round_cap = 0;  // 0: default_round_cap
  std::uint64_t seed_cap = std::uint64_t{1} << 24;
  Trace* trace = nullptr;
};

/// D * w * (ceil(log2 K) + ceil(log2 Delta) + ceil(log2 w)) with w = ceil(log2 C).
std::uint64_t round_formula(std::uint64_t D, std::uint64_t C, std::uint64_t K, std::uint64_t max_degree);
/// 64 * D * w * (ceil(log2 K) + ceil(log2 Delta) + ceil(log2 w) + 8), D and w at least 1.
std::uint64_t default_round_cap(std::uint64_t D, std::uint64_t C, std::uint64_t K, std::uint64_t max_degree);

/// ceil(log_{8/7} n) + 1 for mis, ceil(log_{4/3} n) + 1 for avoid-MIS.
std::uint64_t phase_bound(Mode mode, std::uint64_t n);

struct LevelSummary {
  int level = 0;
  Rational phi_before;
  Rational phi_after;
  Rational bound;
  std::uint64_t rounds = 0;
  std::uint32_t depth = 0;  // deepest group tree
  int seed_len = 0;         // 2m
  std::uint64_t chain_checks = 0;
};

struct PhaseReport {
  std::size_t phase = 0;
  NodeId nodes_at_start = 0;
  NodeId nodes_colored = 0;
  std::uint64_t K = 0;
  int b = 0;
  Rational phi_initial;
  Rational phi_final;
  std::vector<LevelSummary> levels;
  std::size_t low_count = 0;  // |V_<4| or |V_low|
  std::size_t mis_size = 0;
  std::size_t max_conflict_degree = 0;  // inside the low set
  std::uint64_t rounds = 0;
};

struct FinishResult {
  PartialColoring coloring;  // indexed like the state
  std::size_t low_count = 0;
  std::size_t mis_size = 0;
  std::size_t max_conflict_degree = 0;
  RunStats stats;
};

/// Keeps the deg(v)+1 smallest colors of every list.
ListColoringInstance trim_lists(const ListColoringInstance& inst);

/// Final-level state: V_<4 = {Phi < 4}; an MIS of the conflict graph on
/// V_<4 (computed from the K-coloring psi) keeps its candidate colors.
FinishResult finish_mis(const PrefixState& state, std::span<const Color> psi, std::uint64_t K,
                        const RunOptions& options = {});

/// Final-level state: V_low = {Phi <= 1}; of two conflicting V_low nodes
/// the one with the larger id keeps its color.
FinishResult finish_avoid_mis(const PrefixState& state, std::span<const NodeId> ids, const RunOptions& options = {});

struct PhaseResult {
  PartialColoring coloring;  // indexed like the phase instance
  PhaseReport report;
  RunStats stats;
};

/// One phase on an instance that carries psi; the instance graph is also
/// the network.
PhaseResult color_fraction(const ListColoringInstance& inst, const PipelineConfig& config);

struct ColoringRun {
  PartialColoring coloring;
  std::vector<PhaseReport> phases;
  RunStats stats;
  std::uint64_t round_cap = 0;
  std::uint64_t chain_checks = 0;
};

ColoringRun list_color_full(const ListColoringInstance& inst, const PipelineConfig& config = {});

namespace detail {

/// Shared phase loop. `sub` lives on `sub_to_host` nodes of `host`; node v
/// of `sub` aggregates over trees[tree_of[v]]. psi has one value per sub node.
struct LoopInput {
  const Graph* host = nullptr;
  const ListColoringInstance* sub = nullptr;
  std::span<const NodeId> sub_to_host;
  std::span<const BfsTree> trees;
  std::span<const std::size_t> tree_of;
  std::span<const Color> psi;
  std::uint64_t K = 1;
};

class RoundBudget {
 public:
  RoundBudget(std::uint64_t cap, RunOptions base) : cap_(cap), base_(base) {}
  RunOptions next() const;
  void charge(const RunStats& stats);
  const RunStats& total() const { return total_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
  RunOptions base_;
  RunStats total_;
};

struct LoopResult {
  PartialColoring coloring;  // indexed like sub
  std::vector<PhaseReport> phases;
  std::uint64_t chain_checks = 0;
};

LoopResult color_loop(const LoopInput& in, const PipelineConfig& config, RoundBudget& budget,
                      std::size_t phase_offset = 0);

}  // namespace detail

}  // namespace dcolor
