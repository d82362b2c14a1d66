#include "covote/orchestrator.hpp"

#include "covote/evaluation.hpp"
#include "support/reference.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace covote;

namespace {

Hypothesis make_hypothesis(int index, std::vector<TokenId> tokens, std::vector<double> logprobs) {
    Hypothesis h;
    h.index = index;
    h.append(tokens, logprobs, "");
    return h;
}

SimulatedTask cohort_task() {
    SimulatedTask task;
    task.vocab_size = 48;
    task.gold_answer = "42";
    task.answer_distribution = {{"42", 0.55}, {"43", 0.25}, {"41", 0.20}};
    task.mean_length = 300;
    task.length_jitter = 60;
    task.confidence_bias = 0.8;
    task.shared_token_fraction = 0.25;
    return task;
}

} // namespace

TEST_CASE("confidence is exp of the mean logprob") {
    CHECK(compute_confidence(make_hypothesis(0, {1, 2, 3}, {0, 0, 0})) == 1.0);
    CHECK(compute_confidence(make_hypothesis(0, {1, 2}, {-std::log(2.0), -std::log(2.0)})) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(compute_confidence(make_hypothesis(0, {1, 2}, {-1.0, -3.0})) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(compute_confidence(Hypothesis{}), EmptyHypothesisError);
}

TEST_CASE("weight is the confidence complement") {
    CHECK(hypothesis_weight(1.0) == 0.0);
    CHECK(hypothesis_weight(0.5) == 0.5);
    CHECK(hypothesis_weight(0.1353) == doctest::Approx(0.8647));
    CHECK_THROWS_AS(hypothesis_weight(1.5), ConfidenceOutOfRangeError);
    CHECK_THROWS_AS(hypothesis_weight(-0.1), ConfidenceOutOfRangeError);
}

TEST_CASE("unique_tokens deduplicates the whole prefix") {
    CHECK(unique_tokens(make_hypothesis(0, {5, 5, 7}, {-1, -1, -1})) ==
          setcover::TokenSet{5, 7});
    CHECK(unique_tokens(Hypothesis{}).empty());
    CHECK(unique_tokens(make_hypothesis(0, {1, 2, 1, 3, 2}, {-1, -1, -1, -1, -1})) ==
          setcover::TokenSet{1, 2, 3});
}

TEST_CASE("duplicate hypotheses collapse to the lower index under CWSC") {
    std::vector<Hypothesis> cohort{make_hypothesis(0, {1, 2, 3}, {-0.5, -0.5, -0.5}),
                                   make_hypothesis(1, {1, 2, 3}, {-0.5, -0.5, -0.5})};
    auto survivors = select_survivors(cohort, {PolicyKind::CWSC, 0});
    CHECK(survivors == std::vector<int>{0});
}

TEST_CASE("a dominating high-confidence hypothesis survives alone") {
    std::vector<Hypothesis> cohort{
        make_hypothesis(0, {1, 2}, {-1.0, -1.0}),
        make_hypothesis(1, {1, 2, 3, 4}, {-0.01, -0.01, -0.01, -0.01}),
        make_hypothesis(2, {3, 4}, {-1.5, -1.5})};
    auto survivors = select_survivors(cohort, {PolicyKind::CWSC, 0});
    CHECK(survivors == std::vector<int>{1});
}

TEST_CASE("NONE keeps everyone") {
    std::vector<Hypothesis> cohort{make_hypothesis(0, {1}, {-1.0}),
                                   make_hypothesis(1, {1}, {-1.0}),
                                   make_hypothesis(2, {1}, {-1.0})};
    CHECK(select_survivors(cohort, {PolicyKind::None, 0}) == std::vector<int>{0, 1, 2});
}

TEST_CASE("CW keeps the CWSC count, by confidence") {
    std::vector<Hypothesis> cohort{
        make_hypothesis(0, {1, 2}, {-2.0, -2.0}),
        make_hypothesis(1, {1, 2}, {-0.1, -0.1}),
        make_hypothesis(2, {3}, {-1.0})};
    // CWSC keeps {1, 2}; CW keeps the 2 highest-confidence: indices 1 and 2
    CHECK(select_survivors(cohort, {PolicyKind::CWSC, 0}) == std::vector<int>{1, 2});
    CHECK(select_survivors(cohort, {PolicyKind::CW, 0}) == std::vector<int>{1, 2});
}

TEST_CASE("Random keeps the CWSC count with its own generator") {
    std::vector<Hypothesis> cohort;
    for (int i = 0; i < 12; ++i) {
        cohort.push_back(make_hypothesis(i, {1, 2, 3}, {-0.5, -0.5, -0.5}));
    }
    // CWSC would keep exactly one of these duplicates
    auto a = select_survivors(cohort, {PolicyKind::Random, 7});
    auto b = select_survivors(cohort, {PolicyKind::Random, 7});
    CHECK(a.size() == 1);
    CHECK(a == b);
    std::set<int> seen;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto c = select_survivors(cohort, {PolicyKind::Random, s});
        seen.insert(c.at(0));
    }
    CHECK(seen.size() > 1); // actually random across seeds
}

TEST_CASE("disjoint token sets force every policy to keep everyone") {
    std::vector<Hypothesis> cohort{make_hypothesis(0, {1, 2}, {-0.3, -0.3}),
                                   make_hypothesis(1, {3, 4}, {-0.9, -0.9}),
                                   make_hypothesis(2, {5, 6}, {-0.6, -0.6})};
    std::vector<int> all{0, 1, 2};
    for (PolicyKind kind : {PolicyKind::CWSC, PolicyKind::SC, PolicyKind::CW, PolicyKind::Random,
                            PolicyKind::None}) {
        CHECK(select_survivors(cohort, {kind, 5}) == all);
    }
}

TEST_CASE("CWSC and SC preserve the cohort's token-set union") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Hypothesis> cohort;
        int n = 2 + static_cast<int>(rand_below(rng, 24));
        for (int i = 0; i < n; ++i) {
            int len = 1 + static_cast<int>(rand_below(rng, 40));
            std::vector<TokenId> tokens;
            std::vector<double> logprobs;
            for (int j = 0; j < len; ++j) {
                tokens.push_back(static_cast<TokenId>(rand_below(rng, 30)));
                logprobs.push_back(-rand_unit(rng));
            }
            cohort.push_back(make_hypothesis(i, tokens, logprobs));
        }
        setcover::TokenSet before;
        for (const auto& h : cohort) {
            auto s = unique_tokens(h);
            before.insert(s.begin(), s.end());
        }
        for (PolicyKind kind : {PolicyKind::CWSC, PolicyKind::SC}) {
            setcover::TokenSet after;
            for (int idx : select_survivors(cohort, {kind, 0})) {
                auto s = unique_tokens(cohort[static_cast<std::size_t>(idx)]);
                after.insert(s.begin(), s.end());
            }
            CHECK(after == before);
        }
    }
}

TEST_CASE("run_problem: N=1 degenerates to a single completed stream") {
    SimulatedTask task = cohort_task();
    task.answer_distribution = {{"42", 1.0}};
    SimulatedBackend backend(task, 1, 9);
    auto result = run_problem("q", backend, 1, {64, 8, ScheduleMode::Halving},
                              {PolicyKind::CWSC, 0}, {});
    REQUIRE(result.voted_answer.has_value());
    CHECK(*result.voted_answer == "42");
    REQUIRE(result.final_answers.size() == 1);
    CHECK(result.final_answers[0].second == "42");
}

TEST_CASE("run_problem: CWSC saves tokens against NONE on a point-mass task") {
    SimulatedTask task = cohort_task();
    task.answer_distribution = {{"42", 1.0}};
    const std::uint64_t seed = 31;

    SimulatedBackend pruned_backend(task, 32, seed);
    auto pruned = run_problem("q", pruned_backend, 32, {64, 8, ScheduleMode::Halving},
                              {PolicyKind::CWSC, 0}, {});
    SimulatedBackend baseline_backend(task, 32, seed);
    auto baseline = run_problem("q", baseline_backend, 32, {64, 8, ScheduleMode::Halving},
                                {PolicyKind::None, 0}, {});
    REQUIRE(pruned.voted_answer.has_value());
    CHECK(*pruned.voted_answer == "42");
    CHECK(pruned.total_tokens < baseline.total_tokens);
}

TEST_CASE("run_problem: NONE accounting matches full stream lengths") {
    SimulatedTask task = cohort_task();
    const std::uint64_t seed = 17;
    SimulatedBackend backend(task, 8, seed);
    auto result = run_problem("q", backend, 8, {128, 8, ScheduleMode::Halving},
                              {PolicyKind::None, 0}, {});
    for (const auto& step : result.steps) {
        CHECK(step.survivors_before == 8);
        CHECK(step.survivors_after == 8);
    }
    long long step_total = 0;
    for (const auto& step : result.steps) step_total += step.tokens_generated;
    CHECK(result.total_tokens == step_total);

    auto reference = testref::reference_self_consistency(task, 8, seed, "q");
    CHECK(result.total_tokens == reference.total_tokens);
    CHECK(result.voted_answer == reference.voted_answer);
}

TEST_CASE("run_problem: survivor sets shrink monotonically and never empty") {
    SimulatedTask task = cohort_task();
    SimulatedBackend backend(task, 32, 23);
    std::vector<std::set<int>> survivor_history;
    auto observer = [&](int, const std::vector<Hypothesis>& cohort,
                        const std::vector<int>& survivors) {
        std::set<int> ids;
        for (int pos : survivors) ids.insert(cohort[static_cast<std::size_t>(pos)].index);
        survivor_history.push_back(std::move(ids));
    };
    auto result = run_problem("q", backend, 32, {256, 8, ScheduleMode::Halving},
                              {PolicyKind::CWSC, 0}, {}, observer);
    REQUIRE(!survivor_history.empty());
    for (std::size_t k = 0; k < survivor_history.size(); ++k) {
        CHECK(!survivor_history[k].empty());
        if (k > 0) {
            for (int id : survivor_history[k]) CHECK(survivor_history[k - 1].count(id) == 1);
        }
    }
    // confidences recorded per step stay in (0, 1]
    for (const auto& step : result.steps) {
        for (double c : step.confidences) {
            CHECK(c > 0.0);
            CHECK(c <= 1.0);
        }
    }
}

TEST_CASE("run_problem is deterministic for fixed seeds") {
    SimulatedTask task = cohort_task();
    auto run_once = [&](PolicyKind kind) {
        SimulatedBackend backend(task, 16, 41);
        return run_problem("q", backend, 16, {128, 8, ScheduleMode::Halving}, {kind, 99}, {});
    };
    for (PolicyKind kind : {PolicyKind::CWSC, PolicyKind::Random}) {
        auto a = run_once(kind);
        auto b = run_once(kind);
        CHECK(a.voted_answer == b.voted_answer);
        CHECK(a.total_tokens == b.total_tokens);
        REQUIRE(a.steps.size() == b.steps.size());
        for (std::size_t k = 0; k < a.steps.size(); ++k) {
            CHECK(a.steps[k].survivors_after == b.steps[k].survivors_after);
            CHECK(a.steps[k].confidences == b.steps[k].confidences);
        }
    }
}

TEST_CASE("policy name round-trip") {
    for (PolicyKind kind : {PolicyKind::CWSC, PolicyKind::SC, PolicyKind::CW, PolicyKind::Random,
                            PolicyKind::None}) {
        CHECK(parse_policy_kind(to_string(kind)) == kind);
    }
    CHECK(parse_policy_kind("CWSC") == PolicyKind::CWSC);
    CHECK_THROWS_AS(parse_policy_kind("bogus"), std::invalid_argument);
}
