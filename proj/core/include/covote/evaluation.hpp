#pragma once

#include "covote/orchestrator.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace covote::eval {

// Content of the last well-balanced "\boxed{...}", else the last standalone
// numeric literal, else nothing.
std::optional<std::string> extract_final_answer(const std::string& text);

// Simplified exact-match normalizer: trim, strip outer '$', canonicalize
// \frac{a}{b} to a/b, collapse internal whitespace, lowercase. Idempotent.
// Deliberately not a full math-equivalence checker; real-model numbers
// produced through it are "simplified-EM".
std::string normalize_answer(const std::string& raw);

// Plurality over normalized answers. Ties go to the answer whose supporters
// have the highest mean confidence, then lexicographic. `confidences`, when
// non-empty, must parallel `answers`.
std::optional<std::string> majority_element(const std::vector<std::string>& answers,
                                            const std::vector<double>& confidences = {});

int exact_match(const std::optional<std::string>& pred, const std::string& gold);

struct CurvePoint {
    double mean_tokens = 0.0;
    double em = 0.0;
};

// (tokens, EM) polyline for one (policy, N, step size) setup, sorted by
// tokens ascending.
struct AccuracyCurve {
    std::vector<CurvePoint> points;
    std::string label;
};

// Token savings: the % of baseline tokens saved at the smallest-token point
// that meets the baseline EM and never drops below it afterwards. No
// interpolation; discrete curve points only.
std::optional<double> token_savings_delta(const AccuracyCurve& pruned, double baseline_em,
                                          double baseline_tokens);

// Per iteration k: mean over problems still active at k of
// 100 * (survivors_before - survivors_after) / survivors_before.
std::vector<std::pair<int, double>> prune_rate_series(const std::vector<ProblemResult>& results);

class EmptyCohortError : public std::runtime_error {
public:
    EmptyCohortError() : std::runtime_error("coverage of empty cohort") {}
};

// Mean over hypotheses of |S_i| / |U| with U the cohort union.
double coverage_fraction(const std::vector<Hypothesis>& cohort);

class LengthMismatchError : public std::runtime_error {
public:
    LengthMismatchError() : std::runtime_error("paired setup score lists differ in length") {}
};

struct PairwiseWinRate {
    int wins_a = 0;
    int wins_b = 0;
    int ties = 0;
    double win_pct_a() const;
    double win_pct_b() const;
};

// % of paired setups where one side's mean score strictly exceeds the
// other's; ties count to neither.
PairwiseWinRate ablation_win_rate(const std::vector<double>& setup_scores_a,
                                  const std::vector<double>& setup_scores_b);

} // namespace covote::eval
