#include <benchmark/benchmark.h>

#include <limits>

#include "qem/distributions.hpp"
#include "qem/em.hpp"
#include "qem/fixtures.hpp"
#include "qem/weibull_root.hpp"

using namespace qem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void BM_TruncatedQuantileExponential(benchmark::State& state) {
    const ModelParams m(ExponentialParams{0.012});
    const TruncatedQuantileFn fn(m, {63.48, kInf});
    double xi = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fn(xi));
        xi = xi < 0.9 ? xi + 0.1 : 0.1;
    }
}
BENCHMARK(BM_TruncatedQuantileExponential);

void BM_TruncatedQuantileNormal(benchmark::State& state) {
    const ModelParams m(NormalParams{1.7, 0.08});
    const TruncatedQuantileFn fn(m, {1.778, kInf});
    double xi = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fn(xi));
        xi = xi < 0.9 ? xi + 0.1 : 0.1;
    }
}
BENCHMARK(BM_TruncatedQuantileNormal);

void BM_EstepMatrixQem(benchmark::State& state) {
    FitConfig cfg(ModelParams(NormalParams{1.7, 0.1}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = static_cast<int>(state.range(0));
    const auto& ds = fixtures::gupta();
    for (auto _ : state)
        benchmark::DoNotOptimize(estep_matrix(cfg.initial, ds, cfg, 1));
}
BENCHMARK(BM_EstepMatrixQem)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ShapeEquationEval(benchmark::State& state) {
    FitConfig cfg(ModelParams(WeibullParams{1.0, 1.0}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 1000;
    const auto z = estep_matrix(cfg.initial, fixtures::nelson_cracks(), cfg, 1);
    const auto inputs = ShapeEquationInputs::from_samples(z);
    double beta = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(h_of_beta(inputs, beta));
        beta = beta < 3.0 ? beta + 0.25 : 0.5;
    }
}
BENCHMARK(BM_ShapeEquationEval);

void BM_SolveBeta(benchmark::State& state) {
    FitConfig cfg(ModelParams(WeibullParams{1.0, 1.0}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 1000;
    const auto z = estep_matrix(cfg.initial, fixtures::nelson_cracks(), cfg, 1);
    const auto inputs = ShapeEquationInputs::from_samples(z);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_beta(inputs));
}
BENCHMARK(BM_SolveBeta);

void BM_ObservedLoglikNelson(benchmark::State& state) {
    const ModelParams m(WeibullParams{0.0017, 1.49});
    const auto& ds = fixtures::nelson_cracks();
    for (auto _ : state)
        benchmark::DoNotOptimize(observed_loglik(m, ds));
}
BENCHMARK(BM_ObservedLoglikNelson);

void BM_RunFitLeukemiaExactEm(benchmark::State& state) {
    FitConfig cfg(ModelParams(ExponentialParams{1.0}));
    cfg.strategy = Strategy::exact_em;
    cfg.epsilon = 1e-9;
    cfg.max_iterations = 10000;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_fit(ModelTag::exponential, fixtures::leukemia(), cfg));
}
BENCHMARK(BM_RunFitLeukemiaExactEm);

void BM_RunFitRayleighQem(benchmark::State& state) {
    FitConfig cfg(ModelParams(RayleighParams{1.0}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 1000;
    cfg.epsilon = 1e-15;
    cfg.max_iterations = 10;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_fit(ModelTag::rayleigh, fixtures::rayleigh20(), cfg));
}
BENCHMARK(BM_RunFitRayleighQem);

void BM_RunFitNelsonWeibullQem(benchmark::State& state) {
    FitConfig cfg(ModelParams(WeibullParams{1.0, 1.0}));
    cfg.strategy = Strategy::qem;
    cfg.grid_size = 100;
    cfg.epsilon = 1e-5;
    cfg.max_iterations = 5000;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_fit(ModelTag::weibull, fixtures::nelson_cracks(), cfg));
}
BENCHMARK(BM_RunFitNelsonWeibullQem);

} // namespace

BENCHMARK_MAIN();
