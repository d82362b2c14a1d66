#include "covote/setcover.hpp"
#include "covote/types.hpp"

#include <benchmark/benchmark.h>

using namespace covote;

namespace {

setcover::CoverInput random_instance(int n, int span, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    setcover::CoverInput input;
    for (int i = 0; i < n; ++i) {
        setcover::WeightedSet ws;
        auto size = 1 + rand_below(rng, static_cast<std::uint64_t>(span));
        for (std::uint64_t j = 0; j < size; ++j) {
            ws.members.insert(static_cast<TokenId>(rand_below(rng, span)));
        }
        ws.weight = rand_unit(rng);
        input.universe.insert(ws.members.begin(), ws.members.end());
        input.sets.push_back(std::move(ws));
    }
    return input;
}

} // namespace

static void BM_WeightedSetCover(benchmark::State& state) {
    auto input = random_instance(static_cast<int>(state.range(0)),
                                 static_cast<int>(state.range(1)), 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(setcover::weighted_set_cover(input));
    }
}
BENCHMARK(BM_WeightedSetCover)
    ->Args({16, 256})
    ->Args({64, 1024})
    ->Args({256, 4096})
    ->Args({512, 8192});
