#include "covote/backend.hpp"
#include "covote/orchestrator.hpp"

#include <benchmark/benchmark.h>

using namespace covote;

namespace {

SimulatedTask bench_task() {
    SimulatedTask task;
    task.gold_answer = "42";
    task.answer_distribution = {{"42", 0.55}, {"43", 0.25}, {"41", 0.20}};
    return task;
}

} // namespace

static void BM_RunProblem(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PolicyKind kind = state.range(1) ? PolicyKind::CWSC : PolicyKind::None;
    SimulatedTask task = bench_task();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SimulatedBackend backend(task, n, ++seed);
        auto result = run_problem("q", backend, n, {256, 8, ScheduleMode::Halving}, {kind, seed},
                                  {});
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_RunProblem)
    ->Args({16, 0})
    ->Args({16, 1})
    ->Args({64, 0})
    ->Args({64, 1});

static void BM_SelectSurvivors(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SimulatedTask task = bench_task();
    SimulatedBackend backend(task, n, 3);
    std::vector<Hypothesis> cohort;
    for (int i = 0; i < n; ++i) {
        Hypothesis h;
        h.index = i;
        GenerationRequest request;
        request.prompt = "q";
        request.prefix = &h;
        request.max_new_tokens = 256;
        auto chunk = backend.generate(request);
        h.append(chunk.new_tokens, chunk.new_logprobs, chunk.new_text);
        cohort.push_back(std::move(h));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_survivors(cohort, {PolicyKind::CWSC, 0}));
    }
}
BENCHMARK(BM_SelectSurvivors)->Arg(16)->Arg(64)->Arg(256);
