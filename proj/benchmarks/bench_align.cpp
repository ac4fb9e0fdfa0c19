// Microbenchmarks for the hot paths: DP alignment and the full offline
// evaluation pipeline.

#include <cstdint>
#include <random>

#include <benchmark/benchmark.h>

#include "sodam/align.hpp"
#include "sodam/score.hpp"
#include "support/fixtures.hpp"

namespace fx = sodam::testing;
using namespace sodam;

static void BM_Align(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const std::size_t m = static_cast<std::size_t>(state.range(1));
    std::mt19937_64 rng(1);
    auto refs = fx::random_intervals(rng, n, n * 20.0);
    auto preds = fx::random_intervals(rng, m, n * 20.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(align(refs, preds));
    }
    state.SetComplexityN(static_cast<std::int64_t>(n * m));
}
BENCHMARK(BM_Align)
    ->Args({5, 10})
    ->Args({10, 40})
    ->Args({30, 120})
    ->Args({100, 400})
    ->Complexity(benchmark::oN);

static void BM_EvaluateOffline(benchmark::State& state) {
    const std::size_t scenes = static_cast<std::size_t>(state.range(0));
    auto refs = fx::self_scoring_references(scenes);
    ScriptDocument pred = fx::document_of(refs);
    DeterministicJudge judge;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_sodam(pred, refs, judge));
    }
}
BENCHMARK(BM_EvaluateOffline)->Arg(3)->Arg(10)->Arg(30);

static void BM_MergeGroup(benchmark::State& state) {
    const std::size_t members = static_cast<std::size_t>(state.range(0));
    std::vector<SceneEntry> group;
    for (std::size_t i = 0; i < members; ++i)
        group.push_back(fx::scene(i * 5.0, i * 5.0 + 4.0, fx::full_caption("m")));
    for (auto _ : state) {
        benchmark::DoNotOptimize(merge_group(group));
    }
}
BENCHMARK(BM_MergeGroup)->Arg(2)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
