// SPDX-License-Identifier: Apache-2.0
#include "taskforge/extend.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace {

std::string limit_keywords(const std::string& raw, int max_keywords) {
    std::istringstream in(raw);
    std::string word;
    std::string out;
    int count = 0;
    while (in >> word && count < max_keywords) {
        if (!out.empty()) out += ' ';
        out += word;
        ++count;
    }
    return out;
}

std::string join_relations(const std::vector<Relation>& relations) {
    std::string out;
    for (const auto& r : relations) {
        if (!out.empty()) out += "; ";
        out += r.description;
    }
    return out.empty() ? "(none)" : out;
}

}  // namespace

TaskExtender::TaskExtender(Gateway& gateway, ToolAdapters& tools, Verifier& verifier,
                           const PromptLibrary& prompts, ExtenderConfig config)
    : gateway_(gateway), tools_(tools), verifier_(verifier), prompts_(prompts),
      config_(config) {}

SupersetCandidate TaskExtender::find_superset(const InputIndex& inner) {
    if (text::trim(inner.value).empty()) throw InvalidArgumentError("inner index is empty");

    auto keyword_fields = gateway_.complete_structured(
        ModelRole::agent,
        "Propose search queries (at most 3 keywords each) to find a superset source\n"
        "that contains the element below: a series, section, category, or parent\n"
        "page it belongs to.\nElement: " + inner.value +
        "\nReply with one or more lines of: keywords: <up to 3 keywords>",
        {"keywords"});

    // Multiple queries allowed; each trimmed to the 3-keyword budget.
    std::vector<std::string> queries;
    for (const auto& line : text::split_lines(keyword_fields.at("keywords"))) {
        std::string q = limit_keywords(text::trim(line), 3);
        if (!q.empty()) queries.push_back(q);
    }

    std::string candidate_text;
    for (const auto& query : queries) {
        for (const auto& result : tools_.search(query, config_.search_k)) {
            if (!candidate_text.empty()) candidate_text += '\n';
            candidate_text += result.title + " - " + result.snippet;
        }
        if (!candidate_text.empty()) break;
    }
    if (candidate_text.empty()) {
        throw ExtensionExhaustedError("no superset candidates found for: " + inner.value);
    }

    auto superset_fields = gateway_.complete_structured(
        ModelRole::sampler,
        render(prompts_.superset_guidance,
               {{"inner", inner.value}, {"candidates", candidate_text}}),
        {"superset"});
    std::string outer_value = text::trim(superset_fields.at("superset"));
    if (outer_value.empty()) {
        throw ExtensionExhaustedError("sampler returned no superset identifier");
    }
    if (text::contains_normalized(outer_value, inner.value)) {
        throw ExtensionExhaustedError("cycle guard: superset identifier contains inner value");
    }

    auto relation_fields = gateway_.complete_structured(
        ModelRole::sampler,
        render(prompts_.relation_articulation, {{"inner", inner.value},
                                                {"outer", outer_value},
                                                {"candidates", candidate_text}}),
        {"relation"});

    SupersetCandidate candidate;
    candidate.outer = InputIndex{outer_value, ToolKind::web_browse};
    candidate.relation = Relation{text::trim(relation_fields.at("relation"))};
    candidate.context = ToolContext{candidate_text, candidate.outer, 0};
    return candidate;
}

HopLink TaskExtender::compose_intermediate(const InputIndex& outer, const Relation& relation,
                                           const std::string& expected) {
    std::string prompt =
        "Compose one natural-language question asking for the element identified\n"
        "within '" + outer.value + "' by: " + relation.description +
        "\nThe question must name '" + outer.value +
        "' and must not mention or hint at the element itself.\n"
        "Reply with the question text only.";
    for (int attempt = 0; attempt <= config_.compose_retries; ++attempt) {
        auto reply = gateway_.complete(ModelRole::sampler, prompt);
        auto fields = text::parse_record(reply.text);
        std::string question =
            fields.contains("question") ? fields.at("question") : text::trim(reply.text);
        if (question.empty()) continue;
        if (!text::contains_answer(question, expected)) {
            HopLink hop;
            hop.superset_index = outer;
            hop.relation = relation;
            hop.intermediate_question = question;
            hop.expected_intermediate_answer = expected;
            return hop;
        }
        prompt += "\n\nYour previous question revealed the element. Rephrase without it.";
    }
    throw ComposeError("intermediate question keeps leaking the expected answer");
}

std::string TaskExtender::merge_depth(const std::string& prior_question, const HopLink& hop,
                                      const std::vector<Relation>& relation_history) {
    try {
        auto reply = gateway_.complete(
            ModelRole::sampler,
            render(prompts_.logical_substitution,
                   {{"core_question", prior_question},
                    {"auxiliary_question", hop.intermediate_question},
                    {"relations", join_relations(relation_history)}}));
        auto fields = text::parse_record(reply.text);
        std::string merged =
            fields.contains("question") ? fields.at("question") : text::trim(reply.text);
        if (merged.empty()) throw MergeError("sampler produced an empty merged question");
        return merged;
    } catch (const MergeError&) {
        throw;
    } catch (const Error& e) {
        throw MergeError(std::string("depth merge failed: ") + e.what());
    }
}

ExtensionOutcome TaskExtender::extend_depth(const ExtendedTask& task, int target_hops) {
    return extend_depth(task, target_hops, config_.n_k);
}

ExtensionOutcome TaskExtender::extend_depth(const ExtendedTask& task, int target_hops,
                                            int n_k) {
    if (task.kind != TaskKind::depth) {
        throw InvalidArgumentError("depth extension requires a depth-kind task");
    }
    if (n_k < 1) throw InvalidArgumentError("n_k must be >= 1");
    if (target_hops <= hop_count(task)) {
        throw InvalidArgumentError("target_hops must exceed the current hop count");
    }

    ExtensionOutcome outcome;
    outcome.task = task;

    for (int hop_target = hop_count(task) + 1; hop_target <= target_hops; ++hop_target) {
        bool hop_done = false;
        for (int attempt = 1; attempt <= n_k && !hop_done; ++attempt) {
            auto start = std::chrono::steady_clock::now();
            ExtensionAttempt record;
            record.hop_target = hop_target;
            record.attempt_index = attempt;

            try {
                const InputIndex& inner = current_index(outcome.task);
                SupersetCandidate candidate = find_superset(inner);

                Verdict superset_verdict =
                    verifier_.verify_superset(inner, candidate.outer, candidate.relation);
                if (!superset_verdict.accepted) {
                    record.outcome = superset_verdict;
                } else {
                    HopLink hop = compose_intermediate(candidate.outer, candidate.relation,
                                                       inner.value);
                    hop.level = hop_count(outcome.task);

                    std::string merged = merge_depth(outcome.task.question, hop,
                                                     outcome.task.relation_history);
                    Verdict substitution_verdict = verifier_.verify_substitution(
                        outcome.task.question, hop.intermediate_question, merged, inner);
                    if (!substitution_verdict.accepted) {
                        record.outcome = substitution_verdict;
                    } else {
                        Verdict leakage_verdict =
                            verifier_.verify_leakage(merged, outcome.task.golden_answer);
                        if (!leakage_verdict.accepted) {
                            record.outcome = leakage_verdict;
                        } else {
                            outcome.task.question = merged;
                            outcome.task.chain.push_back(hop);
                            outcome.task.relation_history.push_back(hop.relation);
                            outcome.task.hop_count = hop_count(outcome.task);
                            if (std::find(outcome.task.tool_kinds.begin(),
                                          outcome.task.tool_kinds.end(),
                                          hop.superset_index.tool) ==
                                outcome.task.tool_kinds.end()) {
                                outcome.task.tool_kinds.push_back(hop.superset_index.tool);
                            }
                            outcome.task.id =
                                derive_task_id(outcome.task.source_document, merged);
                            record.outcome = Verdict::accept("extend_depth");
                            hop_done = true;
                        }
                    }
                }
            } catch (const BudgetError&) {
                throw;
            } catch (const Error& e) {
                record.outcome = Verdict::reject("extend_depth", e.what());
            }

            record.elapsed_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            outcome.attempts.push_back(std::move(record));
        }
        if (!hop_done) {
            outcome.reached_target = false;
            return outcome;
        }
    }
    outcome.reached_target = true;
    return outcome;
}

ExtendedTask TaskExtender::merge_width(const ExtendedTask& a, const ExtendedTask& b) {
    if (a.id == b.id) throw InvalidArgumentError("width merge requires distinct tasks");
    if (text::contains_answer(b.question, a.golden_answer) ||
        text::contains_answer(a.question, b.golden_answer)) {
        throw InvalidArgumentError("one parent's answer appears in the other's question");
    }

    std::string merged;
    try {
        auto reply = gateway_.complete(
            ModelRole::sampler,
            "Merge the two questions below into one fluent compound question that\n"
            "asks for both answers, in order. Do not drop any constraint and do not\n"
            "reveal either answer.\nQuestion 1: " + a.question +
            "\nQuestion 2: " + b.question + "\nReply with the merged question text only.");
        auto fields = text::parse_record(reply.text);
        merged = fields.contains("question") ? fields.at("question") : text::trim(reply.text);
        if (merged.empty()) throw MergeError("sampler produced an empty merged question");
    } catch (const MergeError&) {
        throw;
    } catch (const Error& e) {
        throw MergeError(std::string("width merge failed: ") + e.what());
    }

    for (const auto* parent : {&a, &b}) {
        Verdict leak = verifier_.verify_leakage(merged, parent->golden_answer);
        if (!leak.accepted) {
            throw MergeError("width merge rejected: " + leak.reason);
        }
    }

    ExtendedTask out;
    out.question = merged;
    out.golden_answer = a.golden_answer + "; " + b.golden_answer;
    out.hop_count = hop_count(a) + hop_count(b);
    out.kind = TaskKind::width;
    out.parents = {a.id, b.id};
    out.source_document = a.source_document + "+" + b.source_document;
    out.tool_kinds = a.tool_kinds;
    for (ToolKind t : b.tool_kinds) {
        if (std::find(out.tool_kinds.begin(), out.tool_kinds.end(), t) ==
            out.tool_kinds.end()) {
            out.tool_kinds.push_back(t);
        }
    }
    out.id = derive_task_id(out.source_document, merged);
    return out;
}

}  // namespace taskforge
