#include <benchmark/benchmark.h>

#include <random>

#include "mvm/hjb.hpp"
#include "mvm/simplex_grid.hpp"

using namespace mvm;

static void BM_SimplexInterpolate(benchmark::State& state) {
    Support s = Support::line({-1.0, 0.0, 1.0});
    SimplexGrid grid = SimplexGrid::build(s, static_cast<int>(state.range(0)));
    std::vector<double> values(grid.node_count());
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double& v : values) v = unif(gen);
    std::vector<std::vector<double>> queries(512, std::vector<double>(3));
    for (auto& q : queries) {
        double sum = 0.0;
        for (double& x : q) {
            x = 0.01 + unif(gen);
            sum += x;
        }
        for (double& x : q) x /= sum;
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid.interpolate(values, queries[i++ & 511]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimplexInterpolate)->Arg(40)->Arg(160);

// One Jacobi sweep including the per-call stencil/cost tableau build; the
// solver itself amortises that setup across all iterations.
static void BM_HjbSweep(benchmark::State& state) {
    Support s = Support::line({-1.0, 0.0, 1.0});
    SimplexGrid grid = SimplexGrid::build(s, static_cast<int>(state.range(0)));
    std::vector<ControlVector> controls = {
        identity_control(s),
        constant_control(s, 0.0),
        scaled_identity_control(s, 0.5),
        scaled_identity_control(s, 2.0),
    };
    CostFunctional cost = quadratic_tracking_cost(fields::tanh_field(), fields::identity(),
                                                  0.5, 1.0);
    HjbProblem prob{grid, controls, cost, 2e-3, 1e-8, 200000, 1};
    std::vector<double> u(grid.node_count(), 0.0);
    for (auto _ : state) {
        auto next = hjb_sweep(prob, u);
        benchmark::DoNotOptimize(next.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.node_count());
}
BENCHMARK(BM_HjbSweep)->Arg(40)->Arg(80);

BENCHMARK_MAIN();
