#include <cmath>
#include <cstdint>

#include <benchmark/benchmark.h>

#include "bclab/bc_lemmas.hpp"
#include "bclab/clayton_model.hpp"
#include "bclab/series_engine.hpp"

using namespace bclab;

namespace {

const ClaytonParams kUnit{};
const ScaledMaxEvent kEvent{0.9, 0.5};

void BM_PartialSum(benchmark::State& state) {
  const TermSequence terms{[](std::int64_t n) { return 1.0 / (static_cast<double>(n) * static_cast<double>(n)); }, ""};
  for (auto _ : state) benchmark::DoNotOptimize(partial_sum(terms, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PartialSum)->Arg(100000)->Arg(1000000);

void BM_Classify(benchmark::State& state) {
  const TermSequence terms{[](std::int64_t n) { return std::pow(static_cast<double>(n), -1.5); }, ""};
  for (auto _ : state) benchmark::DoNotOptimize(classify(terms, state.range(0)).classification);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Classify)->Arg(100000)->Arg(1000000);

void BM_ScaledMaxCdf(benchmark::State& state) {
  std::int64_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scaled_max_cdf(kUnit, n, kEvent));
    n = n % 1000000 + 1;
  }
}
BENCHMARK(BM_ScaledMaxCdf);

void BM_DiffTerm(benchmark::State& state) {
  std::int64_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(diff_term(kUnit, n, kEvent));
    n = n % 1000000 + 1;
  }
}
BENCHMARK(BM_DiffTerm);

void BM_EvaluateClayton(benchmark::State& state) {
  const ProbSeq p{[](std::int64_t n) { return scaled_max_cdf(kUnit, n, kEvent); }, ZeroLimit::certified, ""};
  const PairSeq q{[](std::int64_t n) { return pair_joint_scaled(kUnit, n, kEvent); }, ""};
  EvaluateOptions options;
  options.n_max = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(p, q, options).conclusion);
}
BENCHMARK(BM_EvaluateClayton)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PathStep(benchmark::State& state) {
  ClaytonPath path(0);
  for (auto _ : state) benchmark::DoNotOptimize(path.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PathStep);

}  // namespace

BENCHMARK_MAIN();
