// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "ruinlab/analytic.hpp"
#include "ruinlab/estimators.hpp"
#include "ruinlab/report.hpp"

using namespace ruinlab;

namespace {
const ValidatedModel& base_model() {
    static const ValidatedModel model = validate_model(fixture_model());
    return model;
}
const ValidatedModel& star_model() {
    static const ValidatedModel model = validate_model(fixture_model_star());
    return model;
}
} // namespace

static void BM_StepEvent(benchmark::State& state) {
    const ValidatedModel& model = base_model();
    RngStream rng(1, 0);
    int s = 0;
    for (auto _ : state) {
        EventRecord ev = step_event(model, s, rng);
        s = ev.state_after;
        benchmark::DoNotOptimize(ev);
    }
}
BENCHMARK(BM_StepEvent);

static void BM_RuinReplication(benchmark::State& state) {
    const ValidatedModel& model = star_model();
    PassageOptions opts;
    opts.barrier = 3.75;
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream rng(2, rep++);
        PassageOutcome out = first_passage_up(model, 0.1, rng, opts);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_RuinReplication);

static void BM_ModifiedReplication(benchmark::State& state) {
    ModifiedOptions opts;
    opts.barrier = 3.75;
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream rng(3, rep++);
        ModifiedOutcome out =
            simulate_modified(base_model(), star_model(), 0.1, 0.3, 0.3, rng, opts);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_ModifiedReplication);

static void BM_EstimateRuinParallel(benchmark::State& state) {
    McOptions opts;
    opts.n = state.range(0);
    opts.workers = static_cast<int>(state.range(1));
    for (auto _ : state) {
        MCEstimate est = estimate_ruin(star_model(), 0.1, opts);
        benchmark::DoNotOptimize(est);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateRuinParallel)->Args({100000, 1})->Args({100000, 2});

static void BM_ModifiedRuinClosedForm(benchmark::State& state) {
    for (auto _ : state) {
        double v = modified_ruin(base_model(), star_model(), 0.1, 0.2, 0.3);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_ModifiedRuinClosedForm);

static void BM_LundbergRoots(benchmark::State& state) {
    for (auto _ : state) {
        LundbergRoots roots = lundberg_roots(base_model());
        benchmark::DoNotOptimize(roots);
    }
}
BENCHMARK(BM_LundbergRoots);

BENCHMARK_MAIN();
