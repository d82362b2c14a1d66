#pragma once

#include "covote/types.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace covote {

struct GenerationRequest {
    std::string prompt;
    const Hypothesis* prefix = nullptr; // tokens + text generated so far
    int max_new_tokens = 1;
    SamplingParams params;
    bool stop_on_answer = true;
};

struct GenerationChunk {
    std::vector<TokenId> new_tokens;
    std::vector<double> new_logprobs;
    std::string new_text;
    bool finished = false;
};

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BackendUnavailableError : public BackendError {
public:
    using BackendError::BackendError;
};

class Backend {
public:
    virtual ~Backend() = default;

    // Returns up to max_new_tokens continuation tokens with per-token
    // logprobs. The request's prefix must not be complete.
    virtual GenerationChunk generate(const GenerationRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Simulated backend
// ---------------------------------------------------------------------------

// Synthetic stand-in for a served model. Each stream of a cohort is planted
// with a final answer drawn from answer_distribution and a logprob profile
// tied to that answer's correctness. Token content mixes a per-problem
// canonical sequence (shared across streams with probability
// shared_token_fraction) with draws from a small divergence vocabulary, so
// that streams overlap lexically the way parallel solutions to one problem do.
struct SimulatedTask {
    int vocab_size = 48;                 // divergence vocabulary [0, vocab_size)
    std::string gold_answer;
    std::vector<std::pair<std::string, double>> answer_distribution; // sums to 1
    int mean_length = 640;               // body tokens before the answer suffix
    int length_jitter = 128;
    double confidence_bias = 0.8;        // extra per-token -logprob for incorrect streams
    double shared_token_fraction = 0.25;

    void validate() const; // throws std::invalid_argument
};

struct StreamPlan {
    std::string answer;
    bool correct = false;
    std::uint64_t seed = 0;
    int body_length = 0;
};

// Deterministically assigns each of the n streams an answer and a stream
// seed; same (task, n, seed) gives the same assignment.
std::vector<StreamPlan> plant_cohort(const SimulatedTask& task, int n, std::uint64_t seed);

class SimulatedBackend : public Backend {
public:
    SimulatedBackend(SimulatedTask task, int n, std::uint64_t seed);

    GenerationChunk generate(const GenerationRequest& request) override;

    const StreamPlan& plan(int stream) const { return plans_.at(stream); }
    int cohort_size() const { return static_cast<int>(plans_.size()); }

    // Token id layout. Canonical and answer tokens live above the divergence
    // vocabulary so the three regions never collide.
    static constexpr TokenId kCanonicalBase = 1u << 20;
    static constexpr TokenId kAnswerBase = 1u << 21;

private:
    struct Transcript {
        std::vector<TokenId> tokens;
        std::vector<double> logprobs;
        std::vector<std::string> texts; // per-token surface fragments
    };

    const Transcript& transcript(int stream);

    SimulatedTask task_;
    std::vector<StreamPlan> plans_;
    std::vector<std::unique_ptr<Transcript>> transcripts_; // built lazily
};

} // namespace covote
