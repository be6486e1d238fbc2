// Microbenchmarks for the hot stages: series products, coefficient
// propagation, approximant construction and denominator root finding.

#include <benchmark/benchmark.h>

#include <random>

#include "polewarp/classifier.hpp"
#include "polewarp/dtengine.hpp"
#include "polewarp/lorenz.hpp"
#include "polewarp/pade.hpp"
#include "polewarp/scenario.hpp"

using namespace polewarp;

namespace {

TaylorSeries random_series(int order, Precision prec, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    TaylorSeries s(order, prec);
    for (int k = 0; k <= order; ++k) s[k] = HPReal(dist(rng), prec);
    return s;
}

ScenarioConfig lorenz_config(int L, int M) {
    ScenarioConfig cfg;
    cfg.name = "bench";
    cfg.model_type = "lorenz";
    cfg.params = {{"sigma", "1"}, {"rho", "2"}, {"beta", "1"}};
    cfg.initial_state = {"1.2", "1.1", "1.3"};
    cfg.mapping.rate = 1.0;
    cfg.pade.L = L;
    cfg.pade.M = M;
    return cfg;
}

void BM_series_mul(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const Precision prec(2 * order + 1);
    const TaylorSeries a = random_series(order, prec, 17);
    const TaylorSeries b = random_series(order, prec, 42);
    for (auto _ : state) benchmark::DoNotOptimize(series_mul(a, b, order));
}

void BM_propagate_lorenz(benchmark::State& state) {
    const int half = static_cast<int>(state.range(0));
    const ScenarioRuntime rt = build_scenario(lorenz_config(half, half));
    for (auto _ : state)
        benchmark::DoNotOptimize(propagate_coefficients(*rt.model, rt.map, rt.x0, rt.v0, 2 * half));
}

void BM_build_pade(benchmark::State& state) {
    const int half = static_cast<int>(state.range(0));
    const ScenarioRuntime rt = build_scenario(lorenz_config(half, half));
    const EquilibriumPoint sep = find_sep(*rt.model, rt.sep_guess_x, rt.sep_guess_v);
    const CoefficientTable table = propagate_coefficients(*rt.model, rt.map, rt.x0, rt.v0, 2 * half);
    const IndicatorSeries ind = indicator_coefficients(table, sep.x_star, 2 * half);
    for (auto _ : state) benchmark::DoNotOptimize(build_pade(ind.h, half, half));
}

void BM_denominator_roots(benchmark::State& state) {
    const int half = static_cast<int>(state.range(0));
    const ScenarioRuntime rt = build_scenario(lorenz_config(half, half));
    const EquilibriumPoint sep = find_sep(*rt.model, rt.sep_guess_x, rt.sep_guess_v);
    const CoefficientTable table = propagate_coefficients(*rt.model, rt.map, rt.x0, rt.v0, 2 * half);
    const IndicatorSeries ind = indicator_coefficients(table, sep.x_star, 2 * half);
    const PadeApproximant pade = build_pade(ind.h, half, half);
    for (auto _ : state) benchmark::DoNotOptimize(denominator_roots(pade));
}

void BM_assess_lorenz(benchmark::State& state) {
    const int half = static_cast<int>(state.range(0));
    const ScenarioRuntime rt = build_scenario(lorenz_config(half, half));
    for (auto _ : state) benchmark::DoNotOptimize(assess(rt));
}

}  // namespace

BENCHMARK(BM_series_mul)->Arg(40)->Arg(80)->Arg(160);
BENCHMARK(BM_propagate_lorenz)->Arg(10)->Arg(20)->Arg(40);
BENCHMARK(BM_build_pade)->Arg(10)->Arg(20)->Arg(40);
BENCHMARK(BM_denominator_roots)->Arg(10)->Arg(20)->Arg(40);
BENCHMARK(BM_assess_lorenz)->Arg(10)->Arg(20);

BENCHMARK_MAIN();
