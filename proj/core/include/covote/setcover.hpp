#pragma once

#include "covote/types.hpp"

#include <unordered_set>
#include <vector>

namespace covote::setcover {

using TokenSet = std::unordered_set<TokenId>;

struct WeightedSet {
    TokenSet members;
    double weight = 0.0; // in [0, 1]
};

// Universe plus candidate sets, indexed by cohort position. The caller builds
// the universe as the union of the member sets; this is validated.
struct CoverInput {
    TokenSet universe;
    std::vector<WeightedSet> sets;
};

struct CoverResult {
    std::vector<int> chosen;        // set indices in order of admission
    std::size_t covered_count = 0;
};

class EmptyUniverseError : public std::runtime_error {
public:
    EmptyUniverseError() : std::runtime_error("set cover: empty universe") {}
};

class IncompleteUniverseError : public std::runtime_error {
public:
    IncompleteUniverseError() : std::runtime_error("set cover: sets do not cover universe") {}
};

class ZeroSizeSetError : public std::runtime_error {
public:
    ZeroSizeSetError() : std::runtime_error("set cover: priority of empty set") {}
};

// weight / |S|. Throws ZeroSizeSetError on set_size == 0; empty member sets
// are special-cased by weighted_set_cover, not here.
double priority(double weight, std::size_t set_size);

// Min-priority-queue greedy: every set is enqueued once with priority
// weight/|S|, dequeued in ascending priority (ties by ascending index), and
// admitted iff it still contributes at least one uncovered item. Stops as
// soon as the universe is covered. Priorities are never re-scored.
CoverResult weighted_set_cover(const CoverInput& input);

} // namespace covote::setcover
