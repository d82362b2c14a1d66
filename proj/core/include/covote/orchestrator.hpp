#pragma once

#include "covote/backend.hpp"
#include "covote/setcover.hpp"
#include "covote/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace covote {

enum class PolicyKind { CWSC, SC, CW, Random, None };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name); // throws std::invalid_argument

// Survivor-selection strategy. CWSC is the full method; SC uses uniform
// weights; CW keeps the top-confidence hypotheses, count borrowed from CWSC;
// Random keeps the same count at random; None keeps everything.
struct PruningPolicy {
    PolicyKind kind = PolicyKind::CWSC;
    std::uint64_t rng_seed = 0; // Random only
};

struct StepRecord {
    int iteration = 0;
    int step_size = 0;
    int survivors_before = 0;
    int survivors_after = 0;
    long long tokens_generated = 0;
    std::vector<double> confidences; // one per pre-selection survivor
};

struct ProblemResult {
    std::string question_id;
    std::vector<std::pair<int, std::string>> final_answers; // (hypothesis index, raw answer)
    std::optional<std::string> voted_answer;
    long long total_tokens = 0;
    std::vector<StepRecord> steps;
    PruningPolicy policy;
    int budget_n = 0;
    double first_step_coverage = 0.0; // mean |S_i|/|U| at the first selection
};

class EmptyHypothesisError : public std::runtime_error {
public:
    EmptyHypothesisError() : std::runtime_error("confidence of empty hypothesis") {}
};

class ConfidenceOutOfRangeError : public std::runtime_error {
public:
    ConfidenceOutOfRangeError() : std::runtime_error("confidence outside [0,1]") {}
};

// exp of the mean per-token logprob, over the hypothesis's own length.
// Result is in (0, 1]; exactly 1.0 for all-zero logprobs.
double compute_confidence(const Hypothesis& h);

// 1 - conf. Throws ConfidenceOutOfRangeError outside [0,1].
double hypothesis_weight(double conf);

// Distinct token ids of the whole prefix.
setcover::TokenSet unique_tokens(const Hypothesis& h);

// Selects the surviving cohort positions (sorted ascending) for one step.
// The cohort's token-set union is always preserved by CWSC/SC; CW and Random
// borrow the survivor count from an internal CWSC run. `rng` feeds the
// Random policy and advances across calls; if null, a generator seeded from
// policy.rng_seed is used for that single call.
std::vector<int> select_survivors(const std::vector<Hypothesis>& cohort,
                                  const PruningPolicy& policy,
                                  std::mt19937_64* rng = nullptr);

// Called after each selection with the pre-selection cohort and the chosen
// positions; used by tests to audit the coverage-preservation invariant.
using StepObserver =
    std::function<void(int iteration, const std::vector<Hypothesis>& cohort,
                       const std::vector<int>& survivors)>;

// The full pruning loop: step-wise parallel generation, confidence scoring,
// survivor selection after every step, majority vote over the survivors once
// all are complete. Token accounting includes tokens of hypotheses pruned
// later.
ProblemResult run_problem(const std::string& question, Backend& backend, int budget_n,
                          const StepSchedule& schedule, const PruningPolicy& policy,
                          const SamplingParams& params, const StepObserver& observer = {});

} // namespace covote
