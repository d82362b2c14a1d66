#include "covote/setcover.hpp"

#include <limits>
#include <queue>
#include <utility>

namespace covote::setcover {

double priority(double weight, std::size_t set_size) {
    if (set_size == 0) throw ZeroSizeSetError();
    return weight / static_cast<double>(set_size);
}

CoverResult weighted_set_cover(const CoverInput& input) {
    if (input.universe.empty()) throw EmptyUniverseError();

    // Validate that the universe is exactly the union of the member sets.
    std::size_t union_size = 0;
    {
        TokenSet seen;
        seen.reserve(input.universe.size());
        for (const auto& ws : input.sets) {
            for (TokenId t : ws.members) {
                if (!input.universe.count(t)) throw IncompleteUniverseError();
                seen.insert(t);
            }
        }
        union_size = seen.size();
    }
    if (union_size != input.universe.size()) throw IncompleteUniverseError();

    using Entry = std::pair<double, int>; // (priority, set index)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    for (int i = 0; i < static_cast<int>(input.sets.size()); ++i) {
        const auto& ws = input.sets[i];
        // Empty sets can never contribute; park them at +inf.
        double p = ws.members.empty() ? std::numeric_limits<double>::infinity()
                                      : priority(ws.weight, ws.members.size());
        pq.emplace(p, i);
    }

    CoverResult result;
    TokenSet covered;
    covered.reserve(input.universe.size());
    while (covered.size() < input.universe.size()) {
        if (pq.empty()) throw IncompleteUniverseError(); // unreachable after validation
        int idx = pq.top().second;
        pq.pop();
        const auto& members = input.sets[idx].members;
        bool contributes = false;
        for (TokenId t : members) {
            if (!covered.count(t)) { contributes = true; break; }
        }
        if (contributes) {
            result.chosen.push_back(idx);
            covered.insert(members.begin(), members.end());
        }
    }
    result.covered_count = covered.size();
    return result;
}

} // namespace covote::setcover
