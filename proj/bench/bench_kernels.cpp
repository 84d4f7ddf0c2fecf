// Parallel kernels against their serial references. Run with
// --benchmark_counters_tabular=true; set OMP_NUM_THREADS to vary the pool.

#include "jointsparse/reference.hpp"

#include <benchmark/benchmark.h>

using namespace jointsparse;

namespace {

struct Problem {
    std::vector<MeasurementOperator> ops;
    std::vector<Eigen::VectorXd> ys;
};

Problem make_problem(std::size_t n, std::size_t L)
{
    const auto F = dct(n);
    const auto ens = generate_ensemble(n, L, n / 8, ValueDistribution::uniform, 1);
    const auto masks = generate_masks(n, L, 0.25, MaskMode::fixed_count, 1);
    const auto meas = measure(ens, masks, *F, 20.0, 1);
    Problem p;
    for (const auto& r : meas.retained)
        p.ops.push_back(MeasurementOperator::from_transform(F, r));
    p.ys = meas.values;
    return p;
}

SolverConfig fixed_iterations()
{
    SolverConfig cfg = experiment_solver_defaults();
    cfg.stopTol = 0.0;
    cfg.maxIter = 50;
    return cfg;
}

template <bool Parallel>
void BM_simat(benchmark::State& state)
{
    const auto p = make_problem(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    const auto cfg = fixed_iterations();
    for (auto _ : state) {
        auto r = Parallel ? simat(p.ops, p.ys, cfg) : reference::simat(p.ops, p.ys, cfg);
        benchmark::DoNotOptimize(r.recovered.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.maxIter * state.range(1));
}

constexpr CoefficientStats kStats{.mu0 = 0.079, .mu1 = 0.5, .var0 = 0.01, .var1 = 0.09, .eps = 0.2};

template <bool Parallel>
void BM_lemma_check(benchmark::State& state)
{
    const auto trials = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto c = Parallel ? monte_carlo_lemma_check(kStats, 2, trials, 7)
                          : reference::monte_carlo_lemma_check(kStats, 2, trials, 7);
        benchmark::DoNotOptimize(c.pW);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_run_trials(benchmark::State& state)
{
    std::vector<TrialSpec> specs;
    for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(state.range(0)); ++seed) {
        TrialSpec s;
        s.K = 31;
        s.seed = seed;
        specs.push_back(s);
    }
    RunnerConfig rc;
    rc.tune = false;
    for (auto _ : state) {
        auto recs = Parallel ? run_trials(specs, rc) : reference::run_trials(specs, rc);
        benchmark::DoNotOptimize(recs.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void simat_sizes(benchmark::internal::Benchmark* b)
{
    for (int L : {8, 64})
        for (int n : {256, 1024})
            b->Args({n, L});
}

} // namespace

BENCHMARK(BM_simat<false>)->Name("simat/serial")->Apply(simat_sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simat<true>)->Name("simat/parallel")->Apply(simat_sizes)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_lemma_check<false>)->Name("lemma_check/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lemma_check<true>)->Name("lemma_check/parallel")->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_run_trials<false>)->Name("run_trials/serial")->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_run_trials<true>)->Name("run_trials/parallel")->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
