#include "covote/types.hpp"

namespace covote {

void Hypothesis::append(const std::vector<TokenId>& new_tokens,
                        const std::vector<double>& new_logprobs,
                        const std::string& new_text) {
    if (complete && !new_tokens.empty()) {
        throw std::invalid_argument("Hypothesis::append: hypothesis already complete");
    }
    if (new_tokens.size() != new_logprobs.size()) {
        throw std::invalid_argument("Hypothesis::append: token/logprob length mismatch");
    }
    for (double lp : new_logprobs) {
        if (lp > 0.0) {
            throw std::invalid_argument("Hypothesis::append: positive logprob");
        }
    }
    tokens.insert(tokens.end(), new_tokens.begin(), new_tokens.end());
    logprobs.insert(logprobs.end(), new_logprobs.begin(), new_logprobs.end());
    for (double lp : new_logprobs) logprob_sum += lp;
    text += new_text;
}

int schedule_next(const StepSchedule& schedule, int iteration) {
    if (iteration < 0) {
        throw std::invalid_argument("schedule_next: negative iteration");
    }
    if (schedule.initial <= 0 || schedule.floor <= 0) {
        throw std::invalid_argument("schedule_next: non-positive schedule parameters");
    }
    if (schedule.mode == ScheduleMode::Fixed) {
        return schedule.initial;
    }
    int value = schedule.initial;
    for (int k = 0; k < iteration && value > schedule.floor; ++k) {
        value /= 2;
    }
    return value < schedule.floor ? schedule.floor : value;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path) s = mix_seed(s, p);
    return s;
}

double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
    // modulo bias is irrelevant at our n (<= a few thousand)
    return n == 0 ? 0 : rng() % n;
}

} // namespace covote
