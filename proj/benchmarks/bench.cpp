#include <benchmark/benchmark.h>

#include "vagus/cascade.hpp"
#include "vagus/metrics.hpp"
#include "vagus/neuron.hpp"
#include "vagus/rng.hpp"

namespace {

void BM_GatingRates(benchmark::State& state) {
    double v = -72.3;
    for (auto _ : state) {
        auto r = vagus::gating_rates(v);
        benchmark::DoNotOptimize(r);
        v = -72.3 + (v < 40.0 ? 1e-6 : -112.3);  // wander, defeat constant folding
    }
}
BENCHMARK(BM_GatingRates);

void BM_CascadeRhs(benchmark::State& state) {
    const vagus::CascadeParams p;
    vagus::CascadeState s{0.4, 0.9, 0.3, 7.0};
    for (auto _ : state) {
        auto d = vagus::cascade_rhs(s, p);
        benchmark::DoNotOptimize(d);
        s.ca_c += 1e-9;
    }
}
BENCHMARK(BM_CascadeRhs);

// Cost of one full membrane step, amortized: simulate 100 ms per iteration.
void BM_NeuronStep(benchmark::State& state) {
    const vagus::HHParams p;
    const vagus::CascadeTrajectory none;
    class Null : public vagus::SampleSink {
      public:
        void on_sample(double, double) override {}
    } sink;
    std::int64_t steps = 0;
    for (auto _ : state) {
        vagus::simulate_neuron_stream(none, p, 0.1, 0.01, vagus::hh_rest_state(), sink);
        steps += 10000;
    }
    state.SetItemsProcessed(steps);
}
BENCHMARK(BM_NeuronStep)->Unit(benchmark::kMillisecond);

void BM_CascadeIntegrate1s(benchmark::State& state) {
    const vagus::CascadeParams p;
    for (auto _ : state) {
        auto traj = vagus::integrate_cascade({}, p, 1.0);
        benchmark::DoNotOptimize(traj);
    }
}
BENCHMARK(BM_CascadeIntegrate1s)->Unit(benchmark::kMillisecond);

void BM_MutualInformation(benchmark::State& state) {
    vagus::Rng rng(7);
    vagus::BinarySequence x, y;
    for (int i = 0; i < 600; ++i) {
        x.bits.push_back(rng.uniform01() < 0.03);
        y.bits.push_back(rng.uniform01() < 0.1);
    }
    for (auto _ : state) {
        auto mi = vagus::mutual_information(vagus::joint_probabilities(x, y));
        benchmark::DoNotOptimize(mi);
    }
}
BENCHMARK(BM_MutualInformation);

}  // namespace

BENCHMARK_MAIN();
