#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace covote {

// Opaque token symbol. Equality is exact integer equality; backends are free
// to use vocabulary indices or interned ids.
using TokenId = std::uint32_t;

// One sampled solution stream. Mutated only by its owning orchestrator
// between step barriers; value-copyable everywhere else.
struct Hypothesis {
    int index = 0;                  // stable position in the original cohort of N
    std::vector<TokenId> tokens;
    std::vector<double> logprobs;   // natural log, one per token, each <= 0
    std::string text;
    bool complete = false;
    double logprob_sum = 0.0;       // running sum, maintained by append()

    std::size_t length() const { return tokens.size(); }

    // Appends one generation chunk, keeping token/logprob parity.
    // Throws std::invalid_argument on parity mismatch, positive logprobs,
    // or growth after completion.
    void append(const std::vector<TokenId>& new_tokens,
                const std::vector<double>& new_logprobs,
                const std::string& new_text);
};

enum class ScheduleMode { Halving, Fixed };

// Per-iteration step size. Halving mode emits max(initial / 2^k, floor)
// with integer division; fixed mode always emits `initial`.
struct StepSchedule {
    int initial = 256;
    int floor = 8;
    ScheduleMode mode = ScheduleMode::Halving;
};

// Pure function of (schedule, iteration). iteration must be >= 0.
int schedule_next(const StepSchedule& schedule, int iteration);

struct SamplingParams {
    double temperature = 1.0;
    double top_p = 0.95;
    std::uint64_t seed = 0;
};

// --- seed bookkeeping -------------------------------------------------------

// splitmix64 finalizer; the basis of the master-seed fan-out scheme.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Platform-independent helpers; std::uniform_*_distribution is
// implementation-defined and would break byte-identical replays.
double rand_unit(std::mt19937_64& rng);                         // [0, 1)
std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n); // [0, n)

} // namespace covote
