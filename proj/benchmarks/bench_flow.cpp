#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "qddlab/experiments.hpp"
#include "qddlab/flow.hpp"
#include "qddlab/markov.hpp"

namespace {

struct Fixture {
    qddlab::SteadyState steady;
    qddlab::Generator gen;
    std::vector<double> u;

    explicit Fixture(int n, double lambda = 10.0)
        : steady(qddlab::quadratic_steady_state(qddlab::Grid(2, n), lambda)), gen(qddlab::make_generator(steady)) {
        u = qddlab::discretize(steady.grid, qddlab::regular_profile, 5).density.vector();
    }
};

void BM_GeneratorApply(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(f.gen.apply(f.u));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.u.size()));
}
BENCHMARK(BM_GeneratorApply)->Arg(30)->Arg(100);

void BM_QddRhs(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(qddlab::qdd_rhs(f.u, f.steady, f.gen));
}
BENCHMARK(BM_QddRhs)->Arg(30)->Arg(100);

void BM_Jacobian(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(qddlab::qdd_jacobian(f.u, f.steady, f.gen));
}
BENCHMARK(BM_Jacobian)->Arg(30)->Arg(100);

void BM_QddStep(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    qddlab::StepperConfig cfg;
    cfg.tau = 1e-5;
    for (auto _ : state) benchmark::DoNotOptimize(qddlab::qdd_step(f.u, f.steady, f.gen, cfg));
}
BENCHMARK(BM_QddStep)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FpStep(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    const qddlab::FpStepper stepper(f.gen, f.steady, 1e-5);
    for (auto _ : state) benchmark::DoNotOptimize(stepper.step(f.u));
}
BENCHMARK(BM_FpStep)->Arg(30)->Arg(100);

void BM_SpectralGap(benchmark::State& state) {
    const Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(qddlab::spectral_gap(f.gen, f.steady));
}
BENCHMARK(BM_SpectralGap)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
