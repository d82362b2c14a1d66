#include "covote/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace covote;
using namespace covote::eval;

TEST_CASE("extract_final_answer: boxed marker") {
    CHECK(extract_final_answer("so the answer is \\boxed{42}.") == "42");
    CHECK(extract_final_answer("no conclusion reached") == std::nullopt);
    CHECK(extract_final_answer("first \\boxed{\\frac{1}{2}} then later \\boxed{7}") == "7");
    CHECK(extract_final_answer("nested \\boxed{\\frac{1}{2}}") == "\\frac{1}{2}");
    // unbalanced last marker falls back to the previous balanced one
    CHECK(extract_final_answer("\\boxed{3} and then \\boxed{oops") == "3");
}

TEST_CASE("extract_final_answer: numeric fallback") {
    CHECK(extract_final_answer("values 3 then 5 then 12") == "12");
    CHECK(extract_final_answer("the result equals -7") == "-7");
    CHECK(extract_final_answer("version v2 has no standalone numbers... except 9") == "9");
}

TEST_CASE("normalize_answer rules") {
    CHECK(normalize_answer(" 42 ") == "42");
    CHECK(normalize_answer("\\frac{1}{2}") == "1/2");
    CHECK(normalize_answer("$ 42 $") == "42");
    CHECK(normalize_answer("A  B\tC") == "a b c");
}

TEST_CASE("normalize_answer is idempotent on random strings") {
    std::mt19937_64 rng(5);
    const std::string alphabet = " $\\{}fracABCxyz0123456789_/";
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        std::size_t len = rand_below(rng, 24);
        for (std::size_t i = 0; i < len; ++i) {
            s += alphabet[static_cast<std::size_t>(rand_below(rng, alphabet.size()))];
        }
        std::string once = normalize_answer(s);
        CHECK(normalize_answer(once) == once);
    }
}

TEST_CASE("majority_element") {
    CHECK(majority_element({"3", "3", "5"}) == "3");
    CHECK(majority_element({}) == std::nullopt);
    CHECK(majority_element({"a", "b"}, {0.9, 0.4}) == "a");
    CHECK(majority_element({"b", "a"}, {0.4, 0.9}) == "a");
    // residual tie -> lexicographic
    CHECK(majority_element({"b", "a"}, {0.5, 0.5}) == "a");
    CHECK(majority_element({"b", "a"}) == "a");
}

TEST_CASE("majority_element is permutation invariant") {
    std::vector<std::string> answers{"7", "9", "7", "3", "9", "7"};
    std::vector<double> confs{0.1, 0.9, 0.3, 0.2, 0.8, 0.4};
    auto expected = majority_element(answers, confs);
    std::mt19937_64 rng(3);
    std::vector<std::size_t> order(answers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int trial = 0; trial < 50; ++trial) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rand_below(rng, i)]);
        }
        std::vector<std::string> a2;
        std::vector<double> c2;
        for (std::size_t i : order) {
            a2.push_back(answers[i]);
            c2.push_back(confs[i]);
        }
        CHECK(majority_element(a2, c2) == expected);
    }
}

TEST_CASE("exact_match") {
    CHECK(exact_match(std::string("42"), "42") == 1);
    CHECK(exact_match(std::nullopt, "42") == 0);
    CHECK(exact_match(std::string("\\frac{1}{2}"), "1/2") == 1);
    CHECK(exact_match(std::string("41"), "42") == 0);
    // symmetric under normalization
    CHECK(exact_match(std::string("1/2"), "\\frac{1}{2}") == 1);
}

TEST_CASE("token_savings_delta") {
    AccuracyCurve pruned;
    pruned.points = {{700, 0.80}, {900, 0.83}};
    CHECK(token_savings_delta(pruned, 0.82, 1000.0) == doctest::Approx(10.0));

    AccuracyCurve below;
    below.points = {{700, 0.70}, {900, 0.75}};
    CHECK(token_savings_delta(below, 0.82, 1000.0) == std::nullopt);

    AccuracyCurve single;
    single.points = {{500, 0.85}};
    CHECK(token_savings_delta(single, 0.82, 1000.0) == doctest::Approx(50.0));

    // passes early but dips later: the early point does not qualify
    AccuracyCurve dip;
    dip.points = {{600, 0.85}, {800, 0.80}, {900, 0.84}};
    CHECK(token_savings_delta(dip, 0.82, 1000.0) == doctest::Approx(10.0));

    // final point below baseline -> no delta at all
    AccuracyCurve tail_below;
    tail_below.points = {{600, 0.85}, {900, 0.80}};
    CHECK(token_savings_delta(tail_below, 0.82, 1000.0) == std::nullopt);
}

TEST_CASE("prune_rate_series") {
    auto make_result = [](std::vector<std::pair<int, int>> transitions) {
        ProblemResult r;
        int k = 0;
        for (auto [before, after] : transitions) {
            StepRecord s;
            s.iteration = k++;
            s.survivors_before = before;
            s.survivors_after = after;
            r.steps.push_back(s);
        }
        return r;
    };
    auto series = prune_rate_series({make_result({{8, 4}, {4, 4}})});
    REQUIRE(series.size() == 2);
    CHECK(series[0] == std::pair<int, double>{0, 50.0});
    CHECK(series[1] == std::pair<int, double>{1, 0.0});

    auto mean_series = prune_rate_series({make_result({{8, 4}}), make_result({{8, 6}})});
    REQUIRE(mean_series.size() == 1);
    CHECK(mean_series[0].second == doctest::Approx(37.5));

    // NONE policy: all zeros
    auto none_series = prune_rate_series({make_result({{8, 8}, {8, 8}, {8, 8}})});
    for (const auto& [k, rate] : none_series) CHECK(rate == 0.0);
}

TEST_CASE("coverage_fraction") {
    auto h = [](int index, std::vector<TokenId> tokens) {
        Hypothesis x;
        x.index = index;
        std::vector<double> lps(tokens.size(), -0.1);
        x.append(tokens, lps, "");
        return x;
    };
    CHECK(coverage_fraction({h(0, {1, 2, 3}), h(1, {1, 2, 3})}) == doctest::Approx(1.0));
    CHECK(coverage_fraction({h(0, {1, 2}), h(1, {3, 4})}) == doctest::Approx(0.5));
    CHECK(coverage_fraction({h(0, {1, 2}), h(1, {2, 3}), h(2, {3, 4})}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(coverage_fraction({}), EmptyCohortError);
}

TEST_CASE("ablation_win_rate") {
    auto split = ablation_win_rate({0.8, 0.7}, {0.6, 0.9});
    CHECK(split.win_pct_a() == doctest::Approx(50.0));
    CHECK(split.win_pct_b() == doctest::Approx(50.0));

    auto ties = ablation_win_rate({0.5, 0.5}, {0.5, 0.5});
    CHECK(ties.win_pct_a() == 0.0);
    CHECK(ties.ties == 2);

    // 33 wins of 40 -> 82.5
    std::vector<double> a(40, 1.0), b(40, 0.0);
    for (int i = 0; i < 7; ++i) {
        a[static_cast<std::size_t>(i)] = 0.0;
        b[static_cast<std::size_t>(i)] = 1.0;
    }
    CHECK(ablation_win_rate(a, b).win_pct_a() == doctest::Approx(82.5));

    CHECK_THROWS_AS(ablation_win_rate({1.0}, {1.0, 2.0}), LengthMismatchError);
}
