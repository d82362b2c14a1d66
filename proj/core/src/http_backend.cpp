#include "covote/http_backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace covote {

using nlohmann::json;

HttpBackendConfig HttpBackendConfig::from_env() {
    HttpBackendConfig config;
    if (const char* v = std::getenv("SC_BASE_URL")) config.base_url = v;
    if (const char* v = std::getenv("SC_API_KEY")) config.api_key = v;
    if (const char* v = std::getenv("SC_MODEL")) config.model = v;
    return config;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw std::invalid_argument("HttpBackend: base_url not configured (SC_BASE_URL)");
    }
}

TokenId HttpBackend::intern(const std::string& token_text) {
    auto [it, inserted] = vocab_.emplace(token_text, static_cast<TokenId>(vocab_.size()));
    return it->second;
}

GenerationChunk HttpBackend::generate(const GenerationRequest& request) {
    if (request.prefix == nullptr) throw std::invalid_argument("HttpBackend: null prefix");
    if (request.prefix->complete) throw std::invalid_argument("HttpBackend: prefix already complete");

    json body;
    body["model"] = config_.model;
    body["prompt"] = request.prompt + request.prefix->text;
    body["max_tokens"] = request.max_new_tokens;
    body["temperature"] = request.params.temperature;
    body["top_p"] = request.params.top_p;
    body["seed"] = request.params.seed;
    body["logprobs"] = 1;
    if (request.stop_on_answer && !config_.stop_sequences.empty()) {
        body["stop"] = config_.stop_sequences;
    }

    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_connection_timeout(config_.timeout_s, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    httplib::Result response;
    int backoff_ms = config_.backoff_initial_ms;
    for (int attempt = 1;; ++attempt) {
        response = client.Post(config_.completions_path, headers, body.dump(), "application/json");
        bool retryable = !response || response->status >= 500;
        if (!retryable) break;
        if (attempt >= config_.max_attempts) {
            throw BackendUnavailableError(
                "completion server unavailable after " + std::to_string(attempt) + " attempts" +
                (response ? " (status " + std::to_string(response->status) + ")" : ""));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
    }
    if (response->status != 200) {
        throw BackendError("completion request failed with status " +
                           std::to_string(response->status) + ": " + response->body);
    }

    json payload;
    try {
        payload = json::parse(response->body);
    } catch (const json::parse_error& e) {
        throw BackendError(std::string("malformed completion response: ") + e.what());
    }
    if (!payload.contains("choices") || payload["choices"].empty()) {
        throw BackendError("completion response has no choices");
    }
    const json& choice = payload["choices"][0];

    if (!choice.contains("logprobs") || choice["logprobs"].is_null() ||
        !choice["logprobs"].contains("tokens") || !choice["logprobs"].contains("token_logprobs")) {
        throw LogprobsUnsupportedError();
    }
    const json& tokens = choice["logprobs"]["tokens"];
    const json& token_logprobs = choice["logprobs"]["token_logprobs"];
    if (tokens.size() != token_logprobs.size()) {
        throw BackendError("token/logprob arity mismatch in response");
    }

    GenerationChunk chunk;
    std::string concatenated;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string token_text = tokens[i].get<std::string>();
        if (token_logprobs[i].is_null()) throw LogprobsUnsupportedError();
        double lp = token_logprobs[i].get<double>();
        chunk.new_tokens.push_back(intern(token_text));
        chunk.new_logprobs.push_back(lp > 0.0 ? 0.0 : lp);
        concatenated += token_text;
    }
    chunk.new_text = choice.value("text", concatenated);
    if (chunk.new_text != concatenated) {
        throw TokenizationDriftError("choice text disagrees with concatenated tokens");
    }
    std::string finish = choice.value("finish_reason", "");
    chunk.finished = (finish == "stop" || finish == "eos");
    return chunk;
}

} // namespace covote
