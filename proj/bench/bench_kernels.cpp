// Serial reference vs OpenMP kernels. The Arg is the worker count.

#include <benchmark/benchmark.h>

#include "stochmatch/estimator.hpp"
#include "stochmatch/graph_io.hpp"
#include "stochmatch/mwm.hpp"
#include "stochmatch/pipeline.hpp"
#include "stochmatch/sparsifier.hpp"

using namespace stochmatch;

namespace {

const StochasticGraph& medium_graph() {
  static const StochasticGraph g =
      gen_random_graph(40, 0.2, Law::parse("uniform:0:1"), Law::parse("uniform:0.2:1"), 7);
  return g;
}

void BM_EstimateXSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(estimate_x_serial(medium_graph(), 2000, 1));
}
BENCHMARK(BM_EstimateXSerial)->Unit(benchmark::kMillisecond);

void BM_EstimateXParallel(benchmark::State& st) {
  const int w = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(estimate_x(medium_graph(), 2000, 1, w));
}
BENCHMARK(BM_EstimateXParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_QueryPlan(benchmark::State& st) {
  const int w = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(build_query_plan(medium_graph(), 64, 3, w));
}
BENCHMARK(BM_QueryPlan)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EndToEnd(benchmark::State& st) {
  const int w = static_cast<int>(st.range(0));
  static const StochasticGraph g =
      gen_random_graph(12, 0.35, Law::parse("uniform:0:1"), Law::parse("uniform:0.3:1"), 9);
  PipelineOptions po;
  po.params = Params::derive(0.12, 0.25, g.p_min(), 16, 0.1);
  po.x_trials = po.y_trials = po.pair_trials = 2000;
  po.cond_trials = 200;
  po.law = LawKind::kSampled;
  po.seed = 5;
  static const PipelineSetup setup = prepare_pipeline(g, po);
  for (auto _ : st) benchmark::DoNotOptimize(end_to_end(setup, po.params, 16, false, 200, 5, w));
}
BENCHMARK(BM_EndToEnd)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Blossom(benchmark::State& st) {
  const auto g = gen_random_graph(static_cast<std::size_t>(st.range(0)), 0.3, Law::parse("uniform:0:1"),
                                  Law::parse("const:1"), 11);
  const GraphView view(g);
  for (auto _ : st) benchmark::DoNotOptimize(max_weight_matching(view));
}
BENCHMARK(BM_Blossom)->Arg(20)->Arg(60)->Arg(120)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
