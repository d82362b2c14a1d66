#include "covote/orchestrator.hpp"

#include "covote/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace covote {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::CWSC: return "cwsc";
        case PolicyKind::SC: return "sc";
        case PolicyKind::CW: return "cw";
        case PolicyKind::Random: return "random";
        case PolicyKind::None: return "none";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
    std::string s;
    for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "cwsc") return PolicyKind::CWSC;
    if (s == "sc") return PolicyKind::SC;
    if (s == "cw") return PolicyKind::CW;
    if (s == "random") return PolicyKind::Random;
    if (s == "none") return PolicyKind::None;
    throw std::invalid_argument("unknown pruning policy: " + name);
}

double compute_confidence(const Hypothesis& h) {
    if (h.tokens.empty()) throw EmptyHypothesisError();
    return std::exp(h.logprob_sum / static_cast<double>(h.tokens.size()));
}

double hypothesis_weight(double conf) {
    if (conf < 0.0 || conf > 1.0) throw ConfidenceOutOfRangeError();
    return 1.0 - conf;
}

setcover::TokenSet unique_tokens(const Hypothesis& h) {
    return setcover::TokenSet(h.tokens.begin(), h.tokens.end());
}

namespace {

std::vector<int> cwsc_keep(const std::vector<Hypothesis>& cohort, bool uniform_weights) {
    setcover::CoverInput input;
    input.sets.reserve(cohort.size());
    for (const auto& h : cohort) {
        setcover::WeightedSet ws;
        ws.members = unique_tokens(h);
        ws.weight = uniform_weights ? 1.0 : hypothesis_weight(compute_confidence(h));
        input.universe.insert(ws.members.begin(), ws.members.end());
        input.sets.push_back(std::move(ws));
    }
    auto result = setcover::weighted_set_cover(input);
    std::sort(result.chosen.begin(), result.chosen.end());
    return result.chosen;
}

} // namespace

std::vector<int> select_survivors(const std::vector<Hypothesis>& cohort,
                                  const PruningPolicy& policy, std::mt19937_64* rng) {
    if (cohort.empty()) throw std::invalid_argument("select_survivors: empty cohort");

    std::vector<int> all(cohort.size());
    for (std::size_t i = 0; i < cohort.size(); ++i) all[i] = static_cast<int>(i);
    if (policy.kind == PolicyKind::None) return all;

    if (policy.kind == PolicyKind::CWSC || policy.kind == PolicyKind::SC) {
        return cwsc_keep(cohort, policy.kind == PolicyKind::SC);
    }

    // CW and Random borrow the survivor count from the full method.
    std::size_t k = cwsc_keep(cohort, false).size();
    if (k >= cohort.size()) return all;

    if (policy.kind == PolicyKind::CW) {
        std::vector<std::pair<double, int>> ranked; // (-conf, index): ties by ascending index
        ranked.reserve(cohort.size());
        for (std::size_t i = 0; i < cohort.size(); ++i) {
            ranked.emplace_back(-compute_confidence(cohort[i]), static_cast<int>(i));
        }
        std::sort(ranked.begin(), ranked.end());
        std::vector<int> chosen;
        chosen.reserve(k);
        for (std::size_t i = 0; i < k; ++i) chosen.push_back(ranked[i].second);
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    // Random: k distinct positions via partial Fisher-Yates on the policy's
    // own generator.
    std::mt19937_64 local(policy.rng_seed);
    std::mt19937_64& gen = rng ? *rng : local;
    std::vector<int> pool = all;
    std::vector<int> chosen;
    chosen.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rand_below(gen, pool.size() - i));
        std::swap(pool[i], pool[j]);
        chosen.push_back(pool[i]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

ProblemResult run_problem(const std::string& question, Backend& backend, int budget_n,
                          const StepSchedule& schedule, const PruningPolicy& policy,
                          const SamplingParams& params, const StepObserver& observer) {
    if (budget_n < 1) throw std::invalid_argument("run_problem: budget_n < 1");

    ProblemResult result;
    result.question_id = question;
    result.policy = policy;
    result.budget_n = budget_n;

    std::vector<Hypothesis> cohort(static_cast<std::size_t>(budget_n));
    for (int i = 0; i < budget_n; ++i) cohort[static_cast<std::size_t>(i)].index = i;

    std::mt19937_64 policy_rng(policy.rng_seed);

    for (int iteration = 0;; ++iteration) {
        int step_size = schedule_next(schedule, iteration);

        long long tokens_this_step = 0;
        for (auto& h : cohort) {
            if (h.complete) continue;
            GenerationRequest request;
            request.prompt = question;
            request.prefix = &h;
            request.max_new_tokens = step_size;
            request.params = params;
            GenerationChunk chunk = backend.generate(request);
            tokens_this_step += static_cast<long long>(chunk.new_tokens.size());
            h.append(chunk.new_tokens, chunk.new_logprobs, chunk.new_text);
            if (chunk.finished) h.complete = true;
        }
        result.total_tokens += tokens_this_step;

        StepRecord record;
        record.iteration = iteration;
        record.step_size = step_size;
        record.survivors_before = static_cast<int>(cohort.size());
        record.tokens_generated = tokens_this_step;

        bool scorable = std::all_of(cohort.begin(), cohort.end(),
                                    [](const Hypothesis& h) { return !h.tokens.empty(); });
        std::vector<int> survivors;
        if (scorable) {
            for (const auto& h : cohort) record.confidences.push_back(compute_confidence(h));
            if (iteration == 0) result.first_step_coverage = eval::coverage_fraction(cohort);
            survivors = select_survivors(cohort, policy, &policy_rng);
        } else {
            // A backend produced a zero-token stream; nothing to score or
            // cover this step, keep everyone.
            survivors.resize(cohort.size());
            for (std::size_t i = 0; i < cohort.size(); ++i) survivors[i] = static_cast<int>(i);
        }
        record.survivors_after = static_cast<int>(survivors.size());
        result.steps.push_back(record);
        if (observer) observer(iteration, cohort, survivors);

        std::vector<Hypothesis> next;
        next.reserve(survivors.size());
        for (int pos : survivors) next.push_back(std::move(cohort[static_cast<std::size_t>(pos)]));
        cohort = std::move(next);

        bool any_incomplete = std::any_of(cohort.begin(), cohort.end(),
                                          [](const Hypothesis& h) { return !h.complete; });
        if (!any_incomplete) break;
    }

    // Majority vote over the final survivors' extracted answers.
    std::vector<std::string> answers;
    std::vector<double> confidences;
    for (const auto& h : cohort) {
        auto answer = eval::extract_final_answer(h.text);
        if (!answer) continue;
        result.final_answers.emplace_back(h.index, *answer);
        answers.push_back(*answer);
        confidences.push_back(h.tokens.empty() ? 0.0 : compute_confidence(h));
    }
    result.voted_answer = eval::majority_element(answers, confidences);
    return result;
}

} // namespace covote
