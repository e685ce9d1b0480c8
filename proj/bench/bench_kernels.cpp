// Serial reference kernel against the OpenMP kernel on the same trial batch.
// With one hardware thread the two should be close; the parallel kernel pays for
// per-thread scratch setup only once per batch.

#include "netdetect/graph_markov.hpp"
#include "netdetect/hypothesis_model.hpp"
#include "netdetect/simulation.hpp"

#include <benchmark/benchmark.h>

using namespace netdetect;

namespace {

struct Fixture {
    WeightMatrix weights;
    NetworkModel model;
    SimulationSpec spec;

    explicit Fixture(std::size_t n)
        : weights(uniform_weights(generate_scale_free(n, 2, 7))),
          model(NetworkModel::homogeneous(n, NodeDistribution::bernoulli(0.5), NodeDistribution::bernoulli(0.6))) {
        spec.rule = Rule::modified;
        spec.r = inverse_weights(analyze(weights).profile.pi);
        spec.horizon = 75;
        spec.record_times = default_sample_times(spec.horizon);
        spec.record_nodes = {0};
    }
};

void run_kernel(benchmark::State& state, Execution exec) {
    const Fixture fx(static_cast<std::size_t>(state.range(0)));
    const std::size_t trials = static_cast<std::size_t>(state.range(1));
    std::vector<double> out(trials * fx.spec.stride(fx.model));
    for (auto _ : state) {
        simulate_trials(fx.spec, fx.model, fx.weights, 1, 42, streams::alternative, 0, trials, out, exec);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(trials));
}

void BM_TrialsSerial(benchmark::State& state) { run_kernel(state, Execution::serial); }
void BM_TrialsParallel(benchmark::State& state) { run_kernel(state, Execution::parallel); }

void BM_Consensus(benchmark::State& state) {
    const Fixture fx(static_cast<std::size_t>(state.range(0)));
    Vector x(fx.weights.size(), 1.0), y(fx.weights.size());
    for (auto _ : state) {
        fx.weights.right_multiply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Args({30, 2000})->Args({100, 500})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Args({30, 2000})->Args({100, 500})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Consensus)->Arg(30)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
