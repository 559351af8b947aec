// SPDX-License-Identifier: Apache-2.0
#include "taskforge/http_llm.hpp"

#ifdef TASKFORGE_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <chrono>

#include "httplib.h"
#include "json.hpp"

namespace taskforge {

HttpLlmBackend::HttpLlmBackend(HttpLlmOptions options) : options_(std::move(options)) {
    if (options_.endpoint.empty()) throw ConfigError("LLM endpoint not configured");
}

CompletionResult HttpLlmBackend::complete(ModelRole role, const std::string& prompt,
                                          const DecodingParams& params) {
    std::size_t scheme_end = options_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("LLM endpoint must be a URL: " + options_.endpoint);
    }
    std::size_t path_start = options_.endpoint.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? options_.endpoint
                                                         : options_.endpoint.substr(0, path_start);
    std::string target = path_start == std::string::npos ? "/"
                                                         : options_.endpoint.substr(path_start);

    auto model_it = options_.models.find(to_string(role));
    std::string model = model_it == options_.models.end() ? "default" : model_it->second;

    nlohmann::json body{
        {"model", model},
        {"temperature", params.temperature},
        {"max_tokens", params.max_output_tokens},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };

    httplib::Client client(origin);
    client.set_connection_timeout(options_.timeout_seconds);
    client.set_read_timeout(options_.timeout_seconds);
    httplib::Headers headers;
    if (!options_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + options_.api_key);
    }

    auto start = std::chrono::steady_clock::now();
    auto response = client.Post(target, headers, body.dump(), "application/json");
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    if (!response) throw RetryableError("LLM transport failure");
    if (response->status == 429 || response->status >= 500) {
        throw RetryableError("LLM provider returned HTTP " + std::to_string(response->status));
    }
    if (response->status >= 400) {
        throw Error("LLM provider returned HTTP " + std::to_string(response->status) + ": " +
                    response->body.substr(0, 200));
    }

    auto doc = nlohmann::json::parse(response->body);
    CompletionResult result;
    result.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (doc.contains("usage")) {
        result.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
        result.output_tokens = doc["usage"].value("completion_tokens", 0);
    }
    result.latency_seconds = elapsed.count();
    return result;
}

}  // namespace taskforge
