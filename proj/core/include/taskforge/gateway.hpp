// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taskforge/errors.hpp"

namespace taskforge {

/// Named model roles; every call declares exactly one.
enum class ModelRole { sampler, infer, judge, agent };

std::string to_string(ModelRole role);
ModelRole model_role_from_string(const std::string& name);

/// A prompt body with named {placeholder} slots plus an ordered exemplar
/// list injected before the instruction block.
struct PromptTemplate {
    std::string slot_name;
    std::string body;
    std::vector<std::string> exemplars;
};

/// Substitutes placeholders verbatim; exemplars render in order before the
/// body. Unbound placeholder -> TemplateError naming it.
std::string render(const PromptTemplate& tmpl,
                   const std::map<std::string, std::string>& bindings);

struct DecodingParams {
    double temperature = 0.0;
    int max_output_tokens = 1024;
};

struct CompletionResult {
    std::string text;
    int prompt_tokens = 0;
    int output_tokens = 0;
    double latency_seconds = 0.0;
    int attempts = 1;
};

/// Provider abstraction behind the gateway.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual CompletionResult complete(ModelRole role, const std::string& prompt,
                                      const DecodingParams& params) = 0;
};

/// Deterministic closed-world backend for tests and scripted runs.
/// Lookup order: exact prompt map, then substring rules in insertion order.
/// No match -> ScriptedMissError.
class ScriptedLlmBackend : public LlmBackend {
public:
    void add(const std::string& prompt, const std::string& reply);
    void add_rule(std::optional<ModelRole> role, std::vector<std::string> contains,
                  std::string reply);

    /// Loads fixtures from a directory: files named `<fnv1a64-hex>.txt` map a
    /// prompt hash to the reply; an optional `rules.json` holds an array of
    /// {"role"?, "contains": [..], "reply": ..} objects applied in order.
    void load_dir(const std::string& dir);

    CompletionResult complete(ModelRole role, const std::string& prompt,
                              const DecodingParams& params) override;

private:
    struct Rule {
        std::optional<ModelRole> role;
        std::vector<std::string> contains;
        std::string reply;
    };
    std::map<std::string, std::string> by_hash_;
    std::vector<Rule> rules_;
};

struct GatewayConfig {
    int max_attempts = 4;      // total tries per call, retrying RetryableError
    long max_calls = 0;        // 0 = unlimited
    long max_tokens = 0;       // prompt + output, 0 = unlimited
    double sampler_temperature = 0.7;
    int max_output_tokens = 1024;
};

struct CallRecord {
    ModelRole role;
    int tokens = 0;
    double latency_seconds = 0.0;
    int attempts = 1;
};

struct UsageTotals {
    long calls = 0;
    long tokens = 0;
    double latency_seconds = 0.0;
};

/// Single mediation point for all model calls: retries, budget caps, and
/// atomic usage accounting. Safe for concurrent callers.
class Gateway {
public:
    Gateway(std::shared_ptr<LlmBackend> backend, GatewayConfig config = {});

    /// Judge and infer roles decode at temperature 0; sampler and agent use
    /// the configured sampler temperature unless params are given.
    CompletionResult complete(ModelRole role, const std::string& prompt);
    CompletionResult complete(ModelRole role, const std::string& prompt,
                              const DecodingParams& params);

    /// Parses "field: value" delimited output into the named fields. One
    /// reprompt on a missing field, then StructuredParseError.
    std::map<std::string, std::string> complete_structured(
        ModelRole role, const std::string& prompt,
        const std::vector<std::string>& field_schema);

    UsageTotals usage() const;
    std::vector<CallRecord> call_records() const;

    DecodingParams default_params(ModelRole role) const;

private:
    void check_budget(long next_tokens);

    std::shared_ptr<LlmBackend> backend_;
    GatewayConfig config_;
    mutable std::mutex mu_;
    UsageTotals totals_;
    std::vector<CallRecord> records_;
};

}  // namespace taskforge
