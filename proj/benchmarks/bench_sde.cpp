#include <benchmark/benchmark.h>

#include "mvm/sde.hpp"

using namespace mvm;

static void BM_EulerPath(benchmark::State& state) {
    AtomicMeasure mu0 = AtomicMeasure::on_line({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
    FeedbackControl ctrl = constant_feedback(identity_control(mu0.support()));
    const double dt = 1e-3;
    const double horizon = static_cast<double>(state.range(0)) * dt;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        MvmPath path = simulate_euler(mu0, ctrl, dt, horizon, seed++);
        benchmark::DoNotOptimize(path.weights.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerPath)->Arg(1000)->Arg(4000);

static void BM_ExponentialPath(benchmark::State& state) {
    AtomicMeasure mu0 = AtomicMeasure::on_line({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
    ControlVector rho = identity_control(mu0.support());
    const double dt = 1e-3;
    const double horizon = static_cast<double>(state.range(0)) * dt;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        MvmPath path = simulate_exponential(mu0, rho, dt, horizon, seed++);
        benchmark::DoNotOptimize(path.weights.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExponentialPath)->Arg(1000);

static void BM_McValue(benchmark::State& state) {
    AtomicMeasure mu0 = AtomicMeasure::on_line({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
    FeedbackControl ctrl = constant_feedback(identity_control(mu0.support()));
    CostFunctional cost = quadratic_tracking_cost(fields::tanh_field(), fields::identity(),
                                                  0.5, 1.0);
    McParams params;
    params.dt = 1e-3;
    params.horizon = 0.5;
    params.paths = state.range(0);
    params.threads = static_cast<int>(state.range(1));
    for (auto _ : state) {
        McResult r = mc_value(mu0, ctrl, cost, params);
        benchmark::DoNotOptimize(r.estimate);
        ++params.seed;
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McValue)->Args({200, 1})->Args({200, 4});
