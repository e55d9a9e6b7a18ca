#include <benchmark/benchmark.h>

#include "edgegen/runner.hpp"

using namespace edgegen;

static void BM_ProportionalFairSlot(benchmark::State& state) {
    RadioConfig radio;
    WorkloadConfig wl;
    wl.n_users = static_cast<int>(state.range(0));
    Rng rng(1);
    auto users = generate_users(wl, radio, rng);
    for (auto _ : state) {
        auto alloc = allocate_proportional_fair(users, radio);
        benchmark::DoNotOptimize(alloc.assignment.data());
    }
    state.SetItemsProcessed(state.iterations() * radio.rb_count);
}
BENCHMARK(BM_ProportionalFairSlot)->Arg(5)->Arg(20)->Arg(80);

static void BM_MockDecisionFromRenderedPrompt(benchmark::State& state) {
    ExperiencePool pool;
    Rng rng(2);
    std::uniform_real_distribution<double> reward(-40.0, 30.0);
    for (std::int64_t b = 0; b < state.range(0); ++b) {
        pool.update({Condition{TaskType::regular, b}, Decision::local, reward(rng), Evaluation::good});
        pool.update({Condition{TaskType::quality_preferred, b}, Decision::offload, reward(rng), Evaluation::good});
    }
    MockOracle oracle;
    const auto tmpl = PromptTemplate::standard();
    for (auto _ : state) {
        const auto prompt = build_meta_prompt(pool, Condition{TaskType::regular, 3}, tmpl, 200);
        benchmark::DoNotOptimize(decide(oracle, prompt));
    }
}
BENCHMARK(BM_MockDecisionFromRenderedPrompt)->Arg(2)->Arg(10);

static void BM_Episode(benchmark::State& state, const char* policy) {
    ExperimentConfig cfg;
    cfg.policy.name = policy;
    cfg.steps = 500;
    for (auto _ : state) {
        auto m = run_episode(cfg, 42);
        benchmark::DoNotOptimize(m.cumulative_reward);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.steps));
}
BENCHMARK_CAPTURE(BM_Episode, icl, "icl")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Episode, bruteforce, "bruteforce")->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
