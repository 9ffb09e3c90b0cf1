#include <benchmark/benchmark.h>

#include "dcolor/decomposition.hpp"
#include "dcolor/linial.hpp"
#include "dcolor/pipeline.hpp"

using namespace dcolor;

static void BM_ListColorGnp(benchmark::State& state) {
  const auto spec = "gnp," + std::to_string(state.range(0)) + ",0.05";
  const auto inst = attach_default_lists(generate_graph(parse_generator_spec(spec), 1));
  PipelineConfig cfg;
  cfg.mode = state.range(1) ? Mode::avoid_mis : Mode::mis;
  std::uint64_t rounds = 0;
  for (auto _ : state) rounds = list_color_full(inst, cfg).stats.rounds;
  state.counters["rounds"] = static_cast<double>(rounds);
}
BENCHMARK(BM_ListColorGnp)->ArgsProduct({{50, 100, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_LinialReduce(benchmark::State& state) {
  const auto g = generate_graph(parse_generator_spec("regular," + std::to_string(state.range(0)) + ",8"), 1);
  for (auto _ : state) benchmark::DoNotOptimize(linial_reduce(g));
}
BENCHMARK(BM_LinialReduce)->Arg(1024)->Arg(4096);

static void BM_WithDecomposition(benchmark::State& state) {
  const auto inst = attach_default_lists(generate_graph(parse_generator_spec("gnp,200,0.05"), 1));
  const NetworkDecomposition d = generate_decomposition(inst.graph);
  for (auto _ : state) benchmark::DoNotOptimize(color_with_decomposition(inst, d));
}
BENCHMARK(BM_WithDecomposition)->Unit(benchmark::kMillisecond);
