// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "taskforge/gateway.hpp"

namespace taskforge {

struct HttpLlmOptions {
    std::string endpoint;                       // e.g. https://host/v1/chat/completions
    std::string api_key;                        // bearer token, usually from env
    std::map<std::string, std::string> models;  // role name -> model name
    int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions transport. One request per call;
/// HTTP 5xx and transport failures surface as RetryableError so the gateway
/// retry policy applies.
class HttpLlmBackend : public LlmBackend {
public:
    explicit HttpLlmBackend(HttpLlmOptions options);

    CompletionResult complete(ModelRole role, const std::string& prompt,
                              const DecodingParams& params) override;

private:
    HttpLlmOptions options_;
};

}  // namespace taskforge
