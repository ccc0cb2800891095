#include "crnoise/noisebudget.hpp"
#include "crnoise/spectral.hpp"
#include "crnoise/sysmodel.hpp"
#include "crnoise/timesim.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace crnoise;

namespace {

const SystemMatrices& reference_system() {
    static const SystemMatrices system = build_system(reference_config());
    return system;
}

}  // namespace

static void BM_ModeAnalysis(benchmark::State& state) {
    const auto& system = reference_system();
    for (auto _ : state) benchmark::DoNotOptimize(mode_analysis(system));
}
BENCHMARK(BM_ModeAnalysis);

static void BM_Receptance(benchmark::State& state) {
    const auto& system = reference_system();
    double f = 2400.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(receptance(system, f));
        f = f > 2600.0 ? 2400.0 : f + 0.01;
    }
}
BENCHMARK(BM_Receptance);

// Integrator throughput, reported as steps per second.
static void BM_SimulateThermal(benchmark::State& state) {
    const auto& system = reference_system();
    const auto modes = mode_analysis(system);
    Forcing forcing;
    forcing.stochastic = StochasticForce{Target::resonator1, 5.136e-23, 1};
    SimulationPlan plan;
    plan.dt = default_dt(modes);
    plan.duration = static_cast<double>(state.range(0)) * plan.dt;
    plan.record_decimation = 5;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(system, forcing, plan));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateThermal)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_WelchPsd(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = thermal_force_samples(1.0, 1e-4, n, 3);
    for (auto _ : state) benchmark::DoNotOptimize(welch_psd(x, 1e-4, 0, 0.5));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WelchPsd)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_AnalyticBudget(benchmark::State& state) {
    const auto& system = reference_system();
    const auto modes = mode_analysis(system);
    const Environment env;
    TransducerConfig t;
    t.eta = 2.9469927776465238e-05;
    for (auto _ : state) {
        const auto psd = analytic_displacement_psd(system, modes, env, Target::resonator1);
        const auto thermal = thermal_budget(system.config, modes, env, t, psd, "analytic");
        const auto electronic = electronic_budget({}, 4e6, env);
        benchmark::DoNotOptimize(combine(thermal.i_mot_noise[0], electronic));
    }
}
BENCHMARK(BM_AnalyticBudget);
BENCHMARK_MAIN();
