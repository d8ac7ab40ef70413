#include "scml/affinity.hpp"
#include "scml/embedder.hpp"
#include "scml/metrics.hpp"
#include "scml/neighbors.hpp"
#include "scml/pipeline.hpp"
#include "scml/sampler.hpp"
#include "scml/spectral.hpp"
#include "scml/synth.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

const scml::Dataset& blobs(scml::Index n) {
    static std::map<scml::Index, scml::Dataset> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, scml::gen_blobs(n, 5, 10, 1.0, 1)).first;
    }
    return it->second;
}

void BM_KnnSearch(benchmark::State& state) {
    const auto& d = blobs(static_cast<scml::Index>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(scml::knn_search(d.points, 20));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnSearch)->RangeMultiplier(2)->Range(1000, 16000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_PpsSample(benchmark::State& state) {
    const auto& d = blobs(8000);
    const auto k1 = static_cast<scml::Index>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(scml::pps_sample(d.points, k1));
    }
}
BENCHMARK(BM_PpsSample)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Affinity(benchmark::State& state) {
    const auto& d = blobs(static_cast<scml::Index>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(scml::high_dim_probabilities(d.points, 20, scml::default_gamma));
    }
}
BENCHMARK(BM_Affinity)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
    const auto& d = blobs(static_cast<scml::Index>(state.range(0)));
    const auto a = scml::high_dim_probabilities(d.points, 20, scml::default_gamma);
    const auto init = scml::laplacian_eigenmaps_init(a, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scml::evaluate_gradient(a, init.coords));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gradient)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_LaplacianInit(benchmark::State& state) {
    const auto& d = blobs(static_cast<scml::Index>(state.range(0)));
    const auto a = scml::high_dim_probabilities(d.points, 20, scml::default_gamma);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scml::laplacian_eigenmaps_init(a, 2));
    }
}
BENCHMARK(BM_LaplacianInit)->Arg(1000)->Arg(2000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Embed(benchmark::State& state) {
    const auto& d = blobs(static_cast<scml::Index>(state.range(0)));
    scml::ScmlConfig cfg;
    cfg.k1 = static_cast<scml::Index>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(scml::embed(d, cfg));
    }
}
BENCHMARK(BM_Embed)->Args({5000, 10})->Args({5000, 40})->Args({20000, 20})->Unit(benchmark::kMillisecond);

void BM_Congruence(benchmark::State& state) {
    const auto& d = blobs(4000);
    const scml::Matrix low = d.points.leftCols(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scml::congruence_coefficient(d.points, low));
    }
}
BENCHMARK(BM_Congruence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
