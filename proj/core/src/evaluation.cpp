#include "covote/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>

namespace covote::eval {

namespace {

// Returns the content of the balanced {...} starting at `open`, or nullopt.
std::optional<std::string> balanced_braces(const std::string& text, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
        if (text[i] == '{') {
            ++depth;
        } else if (text[i] == '}') {
            --depth;
            if (depth == 0) return text.substr(open + 1, i - open - 1);
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<std::string> extract_final_answer(const std::string& text) {
    static const std::string marker = "\\boxed{";
    std::size_t pos = text.rfind(marker);
    while (pos != std::string::npos) {
        if (auto inner = balanced_braces(text, pos + marker.size() - 1)) return inner;
        pos = pos == 0 ? std::string::npos : text.rfind(marker, pos - 1);
    }

    // Fall back to the last standalone numeric literal.
    static const std::regex number(R"([-+]?[0-9]+(\.[0-9]+)?)");
    std::optional<std::string> last;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number);
         it != std::sregex_iterator(); ++it) {
        std::size_t start = static_cast<std::size_t>(it->position());
        if (start > 0) {
            char before = text[start - 1];
            if (std::isalnum(static_cast<unsigned char>(before)) || before == '_' || before == '.') {
                continue;
            }
        }
        last = it->str();
    }
    return last;
}

std::string normalize_answer(const std::string& raw) {
    std::string s = raw;

    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) s.erase(s.begin());
    while (!s.empty() && is_space(s.back())) s.pop_back();
    while (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
        s = s.substr(1, s.size() - 2);
        while (!s.empty() && is_space(s.front())) s.erase(s.begin());
        while (!s.empty() && is_space(s.back())) s.pop_back();
    }

    static const std::regex frac(R"(\\frac\{([^{}]+)\}\{([^{}]+)\})");
    s = std::regex_replace(s, frac, "$1/$2");

    std::string collapsed;
    bool in_space = false;
    for (char c : s) {
        if (is_space(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !collapsed.empty()) collapsed += ' ';
        in_space = false;
        collapsed += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return collapsed;
}

std::optional<std::string> majority_element(const std::vector<std::string>& answers,
                                            const std::vector<double>& confidences) {
    if (answers.empty()) return std::nullopt;
    if (!confidences.empty() && confidences.size() != answers.size()) {
        throw std::invalid_argument("majority_element: confidences do not parallel answers");
    }

    struct Tally {
        int count = 0;
        double conf_sum = 0.0;
    };
    std::map<std::string, Tally> tallies; // ordered: lexicographic residual tie-break
    for (std::size_t i = 0; i < answers.size(); ++i) {
        auto& t = tallies[normalize_answer(answers[i])];
        ++t.count;
        if (!confidences.empty()) t.conf_sum += confidences[i];
    }

    const std::string* best = nullptr;
    int best_count = -1;
    double best_mean_conf = -1.0;
    for (const auto& [answer, tally] : tallies) {
        double mean_conf = tally.conf_sum / tally.count;
        if (tally.count > best_count ||
            (tally.count == best_count && mean_conf > best_mean_conf)) {
            best = &answer;
            best_count = tally.count;
            best_mean_conf = mean_conf;
        }
    }
    return *best;
}

int exact_match(const std::optional<std::string>& pred, const std::string& gold) {
    if (gold.empty()) throw std::invalid_argument("exact_match: empty gold answer");
    if (!pred) return 0;
    return normalize_answer(*pred) == normalize_answer(gold) ? 1 : 0;
}

std::optional<double> token_savings_delta(const AccuracyCurve& pruned, double baseline_em,
                                          double baseline_tokens) {
    if (pruned.points.empty()) throw std::invalid_argument("token_savings_delta: empty curve");

    // Smallest-token point at or after which EM never drops below baseline.
    std::optional<std::size_t> qualifying;
    bool suffix_ok = true;
    for (std::size_t i = pruned.points.size(); i-- > 0;) {
        suffix_ok = suffix_ok && pruned.points[i].em >= baseline_em;
        if (suffix_ok) qualifying = i;
    }
    if (!qualifying) return std::nullopt;
    double tokens = pruned.points[*qualifying].mean_tokens;
    return 100.0 * (baseline_tokens - tokens) / baseline_tokens;
}

std::vector<std::pair<int, double>> prune_rate_series(const std::vector<ProblemResult>& results) {
    std::vector<double> sums;
    std::vector<int> counts;
    for (const auto& result : results) {
        for (const auto& step : result.steps) {
            auto k = static_cast<std::size_t>(step.iteration);
            if (k >= sums.size()) {
                sums.resize(k + 1, 0.0);
                counts.resize(k + 1, 0);
            }
            sums[k] += 100.0 * (step.survivors_before - step.survivors_after) /
                       step.survivors_before;
            ++counts[k];
        }
    }
    std::vector<std::pair<int, double>> series;
    series.reserve(sums.size());
    for (std::size_t k = 0; k < sums.size(); ++k) {
        if (counts[k] > 0) series.emplace_back(static_cast<int>(k), sums[k] / counts[k]);
    }
    return series;
}

double coverage_fraction(const std::vector<Hypothesis>& cohort) {
    if (cohort.empty()) throw EmptyCohortError();
    setcover::TokenSet universe;
    std::vector<std::size_t> sizes;
    sizes.reserve(cohort.size());
    for (const auto& h : cohort) {
        auto s = unique_tokens(h);
        if (s.empty()) throw EmptyCohortError();
        sizes.push_back(s.size());
        universe.insert(s.begin(), s.end());
    }
    double mean = 0.0;
    for (std::size_t n : sizes) mean += static_cast<double>(n) / universe.size();
    return mean / cohort.size();
}

double PairwiseWinRate::win_pct_a() const {
    int total = wins_a + wins_b + ties;
    return total == 0 ? 0.0 : 100.0 * wins_a / total;
}

double PairwiseWinRate::win_pct_b() const {
    int total = wins_a + wins_b + ties;
    return total == 0 ? 0.0 : 100.0 * wins_b / total;
}

PairwiseWinRate ablation_win_rate(const std::vector<double>& setup_scores_a,
                                  const std::vector<double>& setup_scores_b) {
    if (setup_scores_a.size() != setup_scores_b.size()) throw LengthMismatchError();
    PairwiseWinRate rate;
    for (std::size_t i = 0; i < setup_scores_a.size(); ++i) {
        if (setup_scores_a[i] > setup_scores_b[i]) {
            ++rate.wins_a;
        } else if (setup_scores_b[i] > setup_scores_a[i]) {
            ++rate.wins_b;
        } else {
            ++rate.ties;
        }
    }
    return rate;
}

} // namespace covote::eval
