#pragma once

#include "covote/backend.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace covote {

class LogprobsUnsupportedError : public BackendError {
public:
    LogprobsUnsupportedError()
        : BackendError("completion server did not return logprobs; confidence is required") {}
};

class TokenizationDriftError : public BackendError {
public:
    explicit TokenizationDriftError(const std::string& detail)
        : BackendError("tokenization drift: " + detail) {}
};

struct HttpBackendConfig {
    std::string base_url;   // e.g. http://localhost:8000
    std::string api_key;
    std::string model;
    std::string completions_path = "/v1/completions";
    std::vector<std::string> stop_sequences;
    int max_attempts = 3;        // transport errors and 5xx only
    int backoff_initial_ms = 100;
    int timeout_s = 120;

    // SC_BASE_URL, SC_API_KEY, SC_MODEL.
    static HttpBackendConfig from_env();
};

// Client for OpenAI-compatible completion servers. Continuation is prompt
// concatenation: question + hypothesis text so far. Token ids are interned
// per client instance over the token strings the server returns.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    GenerationChunk generate(const GenerationRequest& request) override;

    // Interned id for a token string; stable within this client.
    TokenId intern(const std::string& token_text);

private:
    HttpBackendConfig config_;
    std::unordered_map<std::string, TokenId> vocab_;
};

} // namespace covote
