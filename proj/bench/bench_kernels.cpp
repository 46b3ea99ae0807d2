// Serial reference vs OpenMP for each parallel kernel. The second argument
// selects the mode: 0 = serial, 1 = parallel.

#include "ampcg/experiment.hpp"
#include "ampcg/separation.hpp"

#include <benchmark/benchmark.h>

using namespace ampcg;

namespace {

Execution mode(const benchmark::State& state) { return state.range(1) ? Execution::Parallel : Execution::Serial; }

Observations population_for(const ChainGraph& g, std::uint64_t seed) {
    const auto params = rescale_equal_variances(random_faithful_parameters(g, {}, seed), 1.0);
    return Observations::from_population(implied_distribution(params).cov);
}

void BM_AllSeparations(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const auto g = random_chain_graph(p, 0.3, 0.3, 1);
    for (auto _ : state) benchmark::DoNotOptimize(all_separations(g, p, mode(state)));
}
BENCHMARK(BM_AllSeparations)->ArgsProduct({{6, 8}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_IdentifyInClass(benchmark::State& state) {
    // Dense undirected-heavy graphs have large classes.
    const auto p = static_cast<std::size_t>(state.range(0));
    const auto g = random_chain_graph(p, 0.6, 0.5, 3);
    const auto obs = population_for(g, 3);
    for (auto _ : state) benchmark::DoNotOptimize(identify_in_class(g, obs, {}, mode(state)));
    state.counters["class_size"] = static_cast<double>(equivalence_class(g).size());
}
BENCHMARK(BM_IdentifyInClass)->ArgsProduct({{5, 6}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_GreedySearch(benchmark::State& state) {
    const auto g = random_chain_graph(static_cast<std::size_t>(state.range(0)), 0.4, 0.3, 5);
    const auto obs = population_for(g, 5);
    SearchConfig cfg;
    cfg.restarts = 1;
    for (auto _ : state) benchmark::DoNotOptimize(greedy_search(obs, cfg, nullptr, mode(state)));
}
BENCHMARK(BM_GreedySearch)->ArgsProduct({{5}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Experiment(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.p = static_cast<std::size_t>(state.range(0));
    for (std::uint64_t s = 0; s < 16; ++s) cfg.seeds.push_back(s);
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, mode(state)));
}
BENCHMARK(BM_Experiment)->ArgsProduct({{5}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
