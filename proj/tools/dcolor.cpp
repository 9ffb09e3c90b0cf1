#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dcolor/decomposition.hpp"
#include "dcolor/graph.hpp"
#include "dcolor/pipeline.hpp"
#include "dcolor/rational.hpp"

namespace {

using namespace dcolor;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kFailure = 1, kBadInput = 2, kCapError = 3 };

enum class ColorsMode { lists, degree1, delta1 };

ColorsMode parse_colors_mode(const std::string& text) {
  if (text == "lists") return ColorsMode::lists;
  if (text == "degree1") return ColorsMode::degree1;
  if (text == "delta1") return ColorsMode::delta1;
  throw ParseError("colors-mode must be lists, degree1 or delta1, got '" + text + "'");
}

struct RunConfig {
  std::string graph_path;
  std::string gen;
  std::string colors_mode = "lists";
  std::string kmode = "linial";
  std::string mode = "mis";
  std::string strategy = "conditional";
  std::string decomp = "off";
  std::string bandwidth = "measure";
  std::string trace_path;
  std::string out_path;
  std::string save_instance_path;
  std::uint64_t rng_seed = 1;
  std::uint64_t round_cap = 0;
  std::uint64_t seed_cap = std::uint64_t{1} << 24;
};

ListColoringInstance build_instance(const RunConfig& cfg) {
  ListColoringInstance inst;
  if (!cfg.graph_path.empty()) {
    inst = load_instance(cfg.graph_path);
  } else {
    inst = attach_default_lists(generate_graph(parse_generator_spec(cfg.gen), cfg.rng_seed));
  }
  if (parse_colors_mode(cfg.colors_mode) != ColorsMode::lists) {
    auto psi = std::move(inst.psi);
    inst = attach_default_lists(std::move(inst.graph));
    inst.psi = std::move(psi);
  }
  validate_instance(inst);
  return inst;
}

json stats_json(const RunStats& s) {
  json j;
  j["rounds"] = s.rounds;
  j["charged_rounds"] = s.charged_rounds;
  j["messages"] = s.messages_sent;
  j["max_msg_bits"] = {{"algorithm", s.max_msg_bits[0]}, {"aggregation", s.max_msg_bits[1]}};
  j["total_bits"] = {{"algorithm", s.total_bits[0]}, {"aggregation", s.total_bits[1]}};
  j["max_edge_load"] = s.max_edge_load;
  return j;
}

json phase_json(const PhaseReport& p) {
  json j;
  j["phase"] = p.phase;
  j["nodes_at_start"] = p.nodes_at_start;
  j["nodes_colored"] = p.nodes_colored;
  j["K"] = p.K;
  j["b"] = p.b;
  j["phi_initial"] = to_string(p.phi_initial);
  j["phi_final"] = to_string(p.phi_final);
  j["levels"] = p.levels.size();
  j["low_count"] = p.low_count;
  j["mis_size"] = p.mis_size;
  j["rounds"] = p.rounds;
  return j;
}

json run_json(const ListColoringInstance& inst, const ColoringRun& run) {
  const Graph& g = inst.graph;
  json j;
  j["n"] = g.size();
  j["edges"] = g.edge_count();
  j["max_degree"] = g.max_degree();
  j["diameter"] = g.diameter();
  j["C"] = inst.C;
  j["phases"] = run.phases.size();
  j["round_cap"] = run.round_cap;
  j["chain_checks"] = run.chain_checks;
  j["stats"] = stats_json(run.stats);
  json phases = json::array();
  for (const PhaseReport& p : run.phases) phases.push_back(phase_json(p));
  j["phase_reports"] = std::move(phases);
  return j;
}

int cmd_run(const RunConfig& cfg) {
  const ColorsMode colors_mode = parse_colors_mode(cfg.colors_mode);
  ListColoringInstance inst = build_instance(cfg);
  if (!cfg.save_instance_path.empty()) save_instance(inst, cfg.save_instance_path);

  PipelineConfig pc;
  pc.mode = parse_mode(cfg.mode);
  pc.kmode = parse_kmode(cfg.kmode);
  pc.strategy = parse_strategy(cfg.strategy);
  pc.bandwidth = BandwidthPolicy::parse(cfg.bandwidth);
  pc.round_cap = cfg.round_cap;
  pc.seed_cap = cfg.seed_cap;

  std::ofstream trace_file;
  std::optional<Trace> trace;
  if (!cfg.trace_path.empty()) {
    trace_file.open(cfg.trace_path);
    if (!trace_file) throw Error("cannot open trace file " + cfg.trace_path);
    trace.emplace(&trace_file);
    trace->set_keep_records(false);
    pc.trace = &*trace;
  }

  json out;
  ColoringRun run;
  if (cfg.decomp == "off") {
    run = list_color_full(inst, pc);
    out = run_json(inst, run);
  } else {
    const NetworkDecomposition d =
        cfg.decomp == "generate" ? generate_decomposition(inst.graph) : load_decomposition(cfg.decomp);
    DecompositionRun dr = color_with_decomposition(inst, d, pc);
    run = std::move(dr.run);
    out = run_json(inst, run);
    json dj;
    dj["alpha"] = d.alpha;
    dj["clusters"] = d.clusters.size();
    dj["measured_kappa"] = dr.measured_kappa;
    dj["max_edge_load"] = dr.max_edge_load;
    json classes = json::array();
    for (const auto& [raw, charged] : dr.class_rounds) classes.push_back({{"raw", raw}, {"charged", charged}});
    dj["class_rounds"] = std::move(classes);
    out["decomposition"] = std::move(dj);
  }

  const VerifyReport vr = verify_coloring(inst, run.coloring, true);
  if (!vr.ok()) throw InvariantViolation("output coloring invalid: " + vr.first_violation());
  if (colors_mode == ColorsMode::delta1) {
    const auto delta = inst.graph.max_degree();
    for (NodeId v = 0; v < inst.graph.size(); ++v) {
      if (*run.coloring.assignment[v] > delta) {
        throw InvariantViolation("delta1: node " + std::to_string(v) + " got color " +
                                 std::to_string(*run.coloring.assignment[v]) + " > max degree " +
                                 std::to_string(delta));
      }
    }
  }
  out["mode"] = cfg.mode;
  out["kmode"] = cfg.kmode;
  out["strategy"] = cfg.strategy;
  out["bandwidth"] = cfg.bandwidth;

  if (!cfg.out_path.empty()) {
    std::ofstream f(cfg.out_path);
    if (!f) throw Error("cannot open output file " + cfg.out_path);
    f << coloring_to_json(run.coloring) << '\n';
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_verify(const std::string& instance_path, const std::string& coloring_path) {
  const ListColoringInstance inst = load_instance(instance_path);
  const PartialColoring coloring = load_coloring(coloring_path, inst.graph.size());
  const VerifyReport vr = verify_coloring(inst, coloring, true);
  if (!vr.ok()) {
    std::cout << "invalid: " << vr.first_violation() << '\n';
    return kFailure;
  }
  std::cout << "valid\n";
  return kOk;
}

struct BenchConfig {
  std::vector<std::string> gens;
  std::string mode = "mis";
  std::string kmode = "linial";
  std::uint64_t rng_seed = 1;
  bool no_timing = false;
};

int cmd_bench(const BenchConfig& cfg) {
  PipelineConfig pc;
  pc.mode = parse_mode(cfg.mode);
  pc.kmode = parse_kmode(cfg.kmode);
  std::cout << "instance,n,delta,C,phases,rounds,max_bits_algorithm,max_bits_aggregation,wall_ms,ratio\n";
  for (const std::string& spec : cfg.gens) {
    const ListColoringInstance inst = attach_default_lists(generate_graph(parse_generator_spec(spec), cfg.rng_seed));
    const auto t0 = std::chrono::steady_clock::now();
    const ColoringRun run = list_color_full(inst, pc);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const Graph& g = inst.graph;
    const std::uint64_t K = run.phases.empty() ? 1 : run.phases.front().K;
    const std::uint64_t formula = round_formula(g.diameter(), inst.C, K, g.max_degree());

    std::ostringstream row;
    row << '"' << spec << '"' << ',' << g.size() << ',' << g.max_degree() << ',' << inst.C << ','
        << run.phases.size() << ',' << run.stats.rounds << ',' << run.stats.max_msg_bits[0] << ','
        << run.stats.max_msg_bits[1] << ',';
    if (!cfg.no_timing) row << std::fixed << std::setprecision(3) << ms;
    row << ',' << std::fixed << std::setprecision(4)
        << static_cast<double>(run.stats.rounds) / static_cast<double>(std::max<std::uint64_t>(formula, 1));
    std::cout << row.str() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic (degree+1)-list coloring in a simulated CONGEST network"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  CLI::App* run = app.add_subcommand("run", "Color an instance and print run statistics as JSON");
  auto* graph_opt = run->add_option("--graph", run_cfg.graph_path, "Instance JSON file");
  auto* gen_opt = run->add_option("--gen", run_cfg.gen, "Generator spec, e.g. gnp,200,0.05");
  graph_opt->excludes(gen_opt);
  gen_opt->excludes(graph_opt);
  run->add_option("--colors-mode", run_cfg.colors_mode, "lists | degree1 | delta1")->capture_default_str();
  run->add_option("--kmode", run_cfg.kmode, "linial | ids")->capture_default_str();
  run->add_option("--mode", run_cfg.mode, "mis | avoid-mis")->capture_default_str();
  run->add_option("--strategy", run_cfg.strategy, "conditional | exhaustive")->capture_default_str();
  run->add_option("--decomp", run_cfg.decomp, "off | PATH | generate")->capture_default_str();
  run->add_option("--bandwidth", run_cfg.bandwidth, "measure | strict:BETA")->capture_default_str();
  run->add_option("--trace", run_cfg.trace_path, "Write a JSONL trace");
  run->add_option("--out", run_cfg.out_path, "Write the coloring as JSON");
  run->add_option("--save-instance", run_cfg.save_instance_path, "Write the instance that was colored");
  run->add_option("--rng-seed", run_cfg.rng_seed, "Generator seed")->capture_default_str();
  run->add_option("--round-cap", run_cfg.round_cap, "Round cap, 0 for the default")->capture_default_str();
  run->add_option("--seed-cap", run_cfg.seed_cap, "Seed cap for exhaustive search")->capture_default_str();

  std::string instance_path;
  std::string coloring_path;
  CLI::App* verify = app.add_subcommand("verify", "Check a coloring against an instance");
  verify->add_option("--instance", instance_path, "Instance JSON file")->required();
  verify->add_option("--coloring", coloring_path, "Coloring JSON file")->required();

  BenchConfig bench_cfg;
  CLI::App* bench = app.add_subcommand("bench", "Run generated instances and print a CSV table");
  bench->add_option("--gen", bench_cfg.gens, "Generator spec, repeatable");
  bench->add_option("--mode", bench_cfg.mode, "mis | avoid-mis")->capture_default_str();
  bench->add_option("--kmode", bench_cfg.kmode, "linial | ids")->capture_default_str();
  bench->add_option("--rng-seed", bench_cfg.rng_seed, "Generator seed")->capture_default_str();
  bench->add_flag("--no-timing", bench_cfg.no_timing, "Leave the wall time column empty");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (run_cfg.graph_path.empty() && run_cfg.gen.empty()) {
        std::cerr << "error: one of --graph or --gen is required\n";
        return kBadInput;
      }
      return cmd_run(run_cfg);
    }
    if (verify->parsed()) return cmd_verify(instance_path, coloring_path);
    return cmd_bench(bench_cfg);
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCapError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
