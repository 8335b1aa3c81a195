// Microbenchmarks for the hot paths: gating evaluations, field evaluations,
// integrator steps, and the two bundled end-to-end runs.

#include <benchmark/benchmark.h>

#include <vector>

#include "mlsync/scenario.hpp"

namespace {

const mlsync::NeuronParams kParams = []() {
    return mlsync::find_bundled_scenario("paper-set-10")->neuron;
}();

void BM_GatingFunctions(benchmark::State& state) {
    double v = -60.0;
    for (auto _ : state) {
        const mlsync::GatingValues g = mlsync::gating_at(v, kParams);
        benchmark::DoNotOptimize(g);
        v += 0.1;
        if (v > 40.0) v = -60.0;
    }
}
BENCHMARK(BM_GatingFunctions);

void BM_NeuronField(benchmark::State& state) {
    mlsync::NeuronState y{-35.0, 0.9};
    for (auto _ : state) {
        const mlsync::NeuronRates r = mlsync::neuron_field(y, kParams);
        benchmark::DoNotOptimize(r);
        y.v += 1e-6;  // defeat caching without leaving the working range
    }
}
BENCHMARK(BM_NeuronField);

void BM_CoupledField(benchmark::State& state) {
    const mlsync::ControllerParams ctrl{0.5};
    mlsync::CoupledState y{-35.0, 0.9, 10.0, 3.0, -1.0};
    for (auto _ : state) {
        const mlsync::CoupledRates r = mlsync::coupled_field(y, kParams, ctrl);
        benchmark::DoNotOptimize(r);
        y.v1 += 1e-6;
    }
}
BENCHMARK(BM_CoupledField);

void BM_Rk4CoupledStep(benchmark::State& state) {
    const mlsync::OdeSystem system =
        mlsync::make_coupled_system(kParams, mlsync::ControllerParams{0.5});
    std::vector<double> y{-35.0, 0.9, 10.0, 3.0, -1.0};
    for (auto _ : state) {
        y = mlsync::rk4_step(system, y, 0.01);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_Rk4CoupledStep);

void BM_Rk45CoupledStep(benchmark::State& state) {
    const mlsync::OdeSystem system =
        mlsync::make_coupled_system(kParams, mlsync::ControllerParams{0.5});
    const std::vector<double> y{-35.0, 0.9, 10.0, 3.0, -1.0};
    for (auto _ : state) {
        const mlsync::Rk45Result r = mlsync::rk45_step(system, y, 0.01, 1e-8, 1e-10);
        benchmark::DoNotOptimize(r.state.data());
    }
}
BENCHMARK(BM_Rk45CoupledStep);

void BM_SingleScenario(benchmark::State& state) {
    const mlsync::SimConfig config = *mlsync::find_bundled_scenario("paper-set-10");
    for (auto _ : state) {
        const mlsync::Trajectory traj = mlsync::run_single(config);
        benchmark::DoNotOptimize(traj.data.data());
    }
}
BENCHMARK(BM_SingleScenario)->Unit(benchmark::kMillisecond);

void BM_CoupledScenario(benchmark::State& state) {
    const mlsync::SimConfig config = *mlsync::find_bundled_scenario("paper-set-11");
    for (auto _ : state) {
        const mlsync::CoupledRun run = mlsync::run_coupled(config);
        benchmark::DoNotOptimize(run.trajectory.data.data());
    }
}
BENCHMARK(BM_CoupledScenario)->Unit(benchmark::kMillisecond);

void BM_SyncMetrics(benchmark::State& state) {
    const mlsync::CoupledRun run =
        mlsync::run_coupled(*mlsync::find_bundled_scenario("paper-set-11"));
    for (auto _ : state) {
        const mlsync::SyncMetrics m = mlsync::sync_metrics(run.series, 1e-3, 200.0);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_SyncMetrics);

}  // namespace

BENCHMARK_MAIN();
