#include "covote/backend.hpp"

#include <algorithm>
#include <cmath>

namespace covote {

namespace {
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}
} // namespace

void SimulatedTask::validate() const {
    if (vocab_size < 1) throw std::invalid_argument("SimulatedTask: vocab_size < 1");
    if (mean_length < 1) throw std::invalid_argument("SimulatedTask: mean_length < 1");
    if (length_jitter < 0) throw std::invalid_argument("SimulatedTask: negative length_jitter");
    if (shared_token_fraction < 0.0 || shared_token_fraction > 1.0) {
        throw std::invalid_argument("SimulatedTask: shared_token_fraction outside [0,1]");
    }
    double total = 0.0;
    bool has_gold = false;
    for (const auto& [answer, p] : answer_distribution) {
        if (p < 0.0) throw std::invalid_argument("SimulatedTask: negative answer probability");
        total += p;
        if (answer == gold_answer) has_gold = true;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("SimulatedTask: answer probabilities do not sum to 1");
    }
    if (!has_gold) throw std::invalid_argument("SimulatedTask: gold answer missing from distribution");
}

std::vector<StreamPlan> plant_cohort(const SimulatedTask& task, int n, std::uint64_t seed) {
    task.validate();
    if (n < 1) throw std::invalid_argument("plant_cohort: n < 1");

    std::vector<StreamPlan> plans;
    plans.reserve(static_cast<std::size_t>(n));
    std::mt19937_64 rng(mix_seed(seed, 0x706c616e74ULL));
    for (int i = 0; i < n; ++i) {
        StreamPlan plan;
        double u = rand_unit(rng);
        double acc = 0.0;
        plan.answer = task.answer_distribution.back().first;
        for (const auto& [answer, p] : task.answer_distribution) {
            acc += p;
            if (u < acc) { plan.answer = answer; break; }
        }
        plan.correct = (plan.answer == task.gold_answer);
        plan.seed = mix_seed(seed, static_cast<std::uint64_t>(i) + 1);
        int jitter = 0;
        if (task.length_jitter > 0) {
            jitter = static_cast<int>(rand_below(rng, 2ULL * task.length_jitter + 1)) - task.length_jitter;
        }
        plan.body_length = std::max(1, task.mean_length + jitter);
        plans.push_back(std::move(plan));
    }
    return plans;
}

SimulatedBackend::SimulatedBackend(SimulatedTask task, int n, std::uint64_t seed)
    : task_(std::move(task)), plans_(plant_cohort(task_, n, seed)) {
    transcripts_.resize(plans_.size());
}

const SimulatedBackend::Transcript& SimulatedBackend::transcript(int stream) {
    auto& slot = transcripts_.at(static_cast<std::size_t>(stream));
    if (slot) return *slot;

    const StreamPlan& plan = plans_[static_cast<std::size_t>(stream)];
    auto t = std::make_unique<Transcript>();
    std::mt19937_64 rng(plan.seed);

    const double penalty = plan.correct ? 0.0 : task_.confidence_bias;
    for (int p = 0; p < plan.body_length; ++p) {
        TokenId tok;
        if (rand_unit(rng) < task_.shared_token_fraction) {
            tok = kCanonicalBase + static_cast<TokenId>(p);
        } else {
            tok = static_cast<TokenId>(rand_below(rng, static_cast<std::uint64_t>(task_.vocab_size)));
        }
        t->tokens.push_back(tok);
        t->logprobs.push_back(-(0.05 + 0.1 * rand_unit(rng)) - penalty);
        t->texts.emplace_back();
    }

    // Answer suffix: "\boxed{<answer>}" spread across len(answer)+2 tokens.
    // Identical answers share answer-token ids, so streams that agree also
    // overlap on their suffix.
    const std::string& ans = plan.answer;
    std::uint64_t ah = fnv1a(ans);
    auto answer_token = [&](std::size_t j) {
        return kAnswerBase + static_cast<TokenId>(mix_seed(ah, j) % (1u << 20));
    };
    auto push_answer_token = [&](std::size_t j, std::string text) {
        t->tokens.push_back(answer_token(j));
        t->logprobs.push_back(-(0.05 + 0.1 * rand_unit(rng)) - penalty);
        t->texts.push_back(std::move(text));
    };
    push_answer_token(0, " \\boxed{");
    for (std::size_t j = 0; j < ans.size(); ++j) {
        push_answer_token(j + 1, std::string(1, ans[j]));
    }
    push_answer_token(ans.size() + 1, "}");

    slot = std::move(t);
    return *slot;
}

GenerationChunk SimulatedBackend::generate(const GenerationRequest& request) {
    if (request.prefix == nullptr) {
        throw std::invalid_argument("SimulatedBackend: null prefix");
    }
    if (request.prefix->complete) {
        throw std::invalid_argument("SimulatedBackend: prefix already complete");
    }
    if (request.max_new_tokens < 1) {
        throw std::invalid_argument("SimulatedBackend: max_new_tokens < 1");
    }
    const Transcript& t = transcript(request.prefix->index);
    std::size_t start = request.prefix->tokens.size();
    if (start > t.tokens.size()) {
        throw std::invalid_argument("SimulatedBackend: prefix longer than stream");
    }
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(request.max_new_tokens),
                                             t.tokens.size() - start);
    GenerationChunk chunk;
    chunk.new_tokens.assign(t.tokens.begin() + start, t.tokens.begin() + start + take);
    chunk.new_logprobs.assign(t.logprobs.begin() + start, t.logprobs.begin() + start + take);
    for (std::size_t i = start; i < start + take; ++i) chunk.new_text += t.texts[i];
    chunk.finished = (start + take == t.tokens.size());
    return chunk;
}

} // namespace covote
