#include <benchmark/benchmark.h>

#include <random>

#include "catsr/fit.hpp"
#include "catsr/search.hpp"
#include "catsr/synthetic.hpp"

using namespace catsr;

namespace {

Dataset benchmark_dataset(int points_per_cell, std::mt19937_64& rng) {
    const auto bench = quartic_benchmark();
    return sample_dataset(bench.schema, bench.expression, bench.truth, points_per_cell, -20, 20,
                          rng);
}

void bm_sparse_jacobian(benchmark::State& state) {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(1);
    const auto ds = benchmark_dataset(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse_jacobian(bench.expression, bench.truth, ds));
    }
    state.SetComplexityN(ds.n_rows());
}
BENCHMARK(bm_sparse_jacobian)->RangeMultiplier(4)->Range(8, 512)->Complexity(benchmark::oN);

void bm_fit_quartic(benchmark::State& state) {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(2);
    const auto ds = benchmark_dataset(8, rng);
    for (auto _ : state) {
        std::mt19937_64 fit_rng(3);
        const auto init = perturb(bench.truth, 0.1, fit_rng);
        benchmark::DoNotOptimize(fit_parameters(bench.expression, ds, init, {}, fit_rng));
    }
}
BENCHMARK(bm_fit_quartic);

void bm_pareto_rank(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> loss(0.0, 1.0);
    std::uniform_int_distribution<int> small(1, 15);
    std::vector<Objectives> objs(state.range(0));
    for (auto& o : objs) o = {loss(rng), small(rng), small(rng)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pareto_rank(objs));
    }
}
BENCHMARK(bm_pareto_rank)->Arg(64)->Arg(256)->Arg(1024);

void bm_predict(benchmark::State& state) {
    const auto bench = quartic_benchmark();
    std::mt19937_64 rng(5);
    const auto ds = benchmark_dataset(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict(bench.expression, bench.truth, ds));
    }
}
BENCHMARK(bm_predict)->Arg(8)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
