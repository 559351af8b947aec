// SPDX-License-Identifier: Apache-2.0
#include "taskforge/gateway.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace fs = std::filesystem;

std::string to_string(ModelRole role) {
    switch (role) {
        case ModelRole::sampler: return "sampler";
        case ModelRole::infer: return "infer";
        case ModelRole::judge: return "judge";
        case ModelRole::agent: return "agent";
    }
    throw InvalidArgumentError("unknown ModelRole");
}

ModelRole model_role_from_string(const std::string& name) {
    if (name == "sampler") return ModelRole::sampler;
    if (name == "infer") return ModelRole::infer;
    if (name == "judge") return ModelRole::judge;
    if (name == "agent") return ModelRole::agent;
    throw InvalidArgumentError("unknown model role: " + name);
}

std::string render(const PromptTemplate& tmpl,
                   const std::map<std::string, std::string>& bindings) {
    std::string body;
    body.reserve(tmpl.body.size());
    std::size_t i = 0;
    while (i < tmpl.body.size()) {
        char c = tmpl.body[i];
        if (c == '{') {
            std::size_t close = tmpl.body.find('}', i + 1);
            if (close == std::string::npos) {
                throw TemplateError("unterminated placeholder in slot " + tmpl.slot_name);
            }
            std::string name = tmpl.body.substr(i + 1, close - i - 1);
            auto it = bindings.find(name);
            if (it == bindings.end()) {
                throw TemplateError("unbound placeholder '" + name + "' in slot " +
                                    tmpl.slot_name);
            }
            body += it->second;
            i = close + 1;
        } else {
            body.push_back(c);
            ++i;
        }
    }
    if (tmpl.exemplars.empty()) return body;

    std::string out;
    for (const auto& ex : tmpl.exemplars) {
        out += "Example:\n";
        out += ex;
        out += "\n\n";
    }
    out += body;
    return out;
}

void ScriptedLlmBackend::add(const std::string& prompt, const std::string& reply) {
    by_hash_[text::fnv1a64_hex(prompt)] = reply;
}

void ScriptedLlmBackend::add_rule(std::optional<ModelRole> role,
                                  std::vector<std::string> contains, std::string reply) {
    rules_.push_back(Rule{role, std::move(contains), std::move(reply)});
}

void ScriptedLlmBackend::load_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw ConfigError("scripted LLM fixture directory not found: " + dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        if (path.filename() == "rules.json") {
            auto doc = nlohmann::json::parse(buf.str());
            for (const auto& item : doc) {
                Rule rule;
                if (item.contains("role")) {
                    rule.role = model_role_from_string(item.at("role").get<std::string>());
                }
                rule.contains = item.at("contains").get<std::vector<std::string>>();
                rule.reply = item.at("reply").get<std::string>();
                rules_.push_back(std::move(rule));
            }
        } else if (path.extension() == ".txt") {
            by_hash_[path.stem().string()] = buf.str();
        }
    }
}

CompletionResult ScriptedLlmBackend::complete(ModelRole role, const std::string& prompt,
                                              const DecodingParams&) {
    auto exact = by_hash_.find(text::fnv1a64_hex(prompt));
    const std::string* reply = nullptr;
    if (exact != by_hash_.end()) {
        reply = &exact->second;
    } else {
        for (const auto& rule : rules_) {
            if (rule.role && *rule.role != role) continue;
            bool all = true;
            for (const auto& needle : rule.contains) {
                if (prompt.find(needle) == std::string::npos) {
                    all = false;
                    break;
                }
            }
            if (all) {
                reply = &rule.reply;
                break;
            }
        }
    }
    if (!reply) {
        throw ScriptedMissError("no scripted reply for " + to_string(role) +
                                " prompt: " + prompt.substr(0, 120));
    }
    CompletionResult result;
    result.text = *reply;
    // Crude but deterministic token accounting for scripted runs.
    result.prompt_tokens = static_cast<int>(prompt.size() / 4 + 1);
    result.output_tokens = static_cast<int>(reply->size() / 4 + 1);
    result.latency_seconds = 0.0;
    return result;
}

Gateway::Gateway(std::shared_ptr<LlmBackend> backend, GatewayConfig config)
    : backend_(std::move(backend)), config_(config) {
    if (!backend_) throw InvalidArgumentError("gateway requires a backend");
}

DecodingParams Gateway::default_params(ModelRole role) const {
    DecodingParams params;
    params.max_output_tokens = config_.max_output_tokens;
    params.temperature = (role == ModelRole::judge || role == ModelRole::infer)
                             ? 0.0
                             : config_.sampler_temperature;
    return params;
}

void Gateway::check_budget(long next_tokens) {
    std::lock_guard lock(mu_);
    if (config_.max_calls > 0 && totals_.calls >= config_.max_calls) {
        throw BudgetError("call budget exhausted (" + std::to_string(config_.max_calls) + ")");
    }
    if (config_.max_tokens > 0 && totals_.tokens + next_tokens > config_.max_tokens) {
        throw BudgetError("token budget exhausted (" + std::to_string(config_.max_tokens) + ")");
    }
}

CompletionResult Gateway::complete(ModelRole role, const std::string& prompt) {
    return complete(role, prompt, default_params(role));
}

CompletionResult Gateway::complete(ModelRole role, const std::string& prompt,
                                   const DecodingParams& params) {
    if (text::trim(prompt).empty()) throw InvalidArgumentError("empty prompt");
    check_budget(0);

    CompletionResult result;
    int attempt = 0;
    for (;;) {
        ++attempt;
        try {
            result = backend_->complete(role, prompt, params);
            break;
        } catch (const RetryableError&) {
            if (attempt >= config_.max_attempts) throw;
        }
    }
    result.attempts = attempt;
    if (result.text.empty()) {
        throw EmptyOutputError("backend returned empty output for role " + to_string(role));
    }

    const int tokens = result.prompt_tokens + result.output_tokens;
    {
        std::lock_guard lock(mu_);
        totals_.calls += 1;
        totals_.tokens += tokens;
        totals_.latency_seconds += result.latency_seconds;
        records_.push_back(CallRecord{role, tokens, result.latency_seconds, attempt});
    }
    return result;
}

std::map<std::string, std::string> Gateway::complete_structured(
    ModelRole role, const std::string& prompt, const std::vector<std::string>& field_schema) {
    if (field_schema.empty()) throw InvalidArgumentError("empty field schema");

    auto missing_fields = [&](const std::map<std::string, std::string>& fields) {
        std::vector<std::string> missing;
        for (const auto& name : field_schema) {
            if (!fields.contains(text::normalize(name))) missing.push_back(name);
        }
        return missing;
    };

    auto fields = text::parse_record(complete(role, prompt).text);
    auto missing = missing_fields(fields);
    if (missing.empty()) return fields;

    std::string reprompt = prompt + "\n\nYour previous reply was missing fields:";
    for (const auto& name : missing) reprompt += " " + name;
    reprompt += ". Reply again with every required field as 'name: value'.";

    fields = text::parse_record(complete(role, reprompt).text);
    missing = missing_fields(fields);
    if (!missing.empty()) {
        throw StructuredParseError("missing field '" + missing.front() + "' after reprompt");
    }
    return fields;
}

UsageTotals Gateway::usage() const {
    std::lock_guard lock(mu_);
    return totals_;
}

std::vector<CallRecord> Gateway::call_records() const {
    std::lock_guard lock(mu_);
    return records_;
}

}  // namespace taskforge
