// SPDX-License-Identifier: Apache-2.0
#include "taskforge/verify.hpp"

#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace {

constexpr const char* kJudgePrompt =
    "Score the consistency of a candidate answer against the golden answer.\n"
    "Scoring:\n"
    "2 = fully consistent: semantically equivalent, even if phrased differently\n"
    "    (treat light unit or formatting differences of the same value as equivalent).\n"
    "1 = partially consistent: the candidate includes all golden information plus\n"
    "    valid extra details.\n"
    "0 = inconsistent: the candidate omits key golden information or contradicts it.\n";

std::string verdict_reason(const std::map<std::string, std::string>& fields) {
    auto it = fields.find("reason");
    return it == fields.end() ? std::string{} : it->second;
}

}  // namespace

std::string observe_tool(ToolAdapters& tools, ToolKind tool, const std::string& input,
                         int search_k) {
    if (tool == ToolKind::search) {
        auto results = tools.search(input, search_k);
        if (results.empty()) return "no results";
        std::string out;
        for (const auto& r : results) {
            if (!out.empty()) out += '\n';
            out += r.title + " - " + r.snippet + " (" + r.locator + ")";
        }
        return out;
    }
    return tools.execute_tool(InputIndex{input, tool}).content;
}

Verifier::Verifier(Gateway& gateway, ToolAdapters& tools, VerifierConfig config)
    : gateway_(gateway), tools_(tools), config_(config) {}

bool Verifier::retention_accepts(int agent_score, int llm_score) {
    return agent_score > llm_score && agent_score > 0;
}

AgentRun Verifier::run_task_agent(const std::string& question) {
    return run_task_agent(question, config_.max_agent_steps);
}

AgentRun Verifier::run_task_agent(const std::string& question, int max_steps) {
    if (max_steps < 1) throw InvalidArgumentError("max_steps must be >= 1");

    AgentRun run;
    std::string transcript;
    for (int step = 1; step <= max_steps; ++step) {
        std::string prompt =
            "You are a task agent answering a question with tools.\n"
            "Available tools: search, web_browse, pdf_read, image_understand.\n"
            "Question: " + question + "\n" + transcript +
            "Respond with one of:\n"
            "action: tool | tool: <name> | input: <value> | plan: <short note>\n"
            "action: final | answer: <text>";
        auto fields = gateway_.complete_structured(ModelRole::agent, prompt, {"action"});
        const std::string action = text::normalize(fields.at("action"));

        if (action == "final") {
            auto it = fields.find("answer");
            run.answer = it == fields.end() ? std::string{} : it->second;
            break;
        }
        if (!fields.contains("tool") || !fields.contains("input")) {
            throw StructuredParseError("agent proposed a tool step without tool/input");
        }
        ToolKind tool = tool_kind_from_string(text::normalize(fields.at("tool")));
        const std::string& input = fields.at("input");

        std::string observation;
        try {
            observation = observe_tool(tools_, tool, input, config_.search_k);
        } catch (const Error& e) {
            observation = std::string("error: ") + e.what();
        }

        TrajectoryStep traj_step;
        traj_step.ordinal = step;
        traj_step.tool = tool;
        traj_step.tool_input = input;
        traj_step.observation = observation;
        if (auto it = fields.find("plan"); it != fields.end()) traj_step.plan_note = it->second;
        run.trajectory.steps.push_back(traj_step);

        transcript += "Step " + std::to_string(step) + ": tool=" + to_string(tool) +
                      " input=" + input + " observation=" + observation + "\n";
    }
    run.steps_used = static_cast<int>(run.trajectory.steps.size());
    run.trajectory.final_answer = run.answer;
    return run;
}

int Verifier::judge_consistency(const std::string& golden, const std::string& candidate) {
    if (text::trim(golden).empty()) throw InvalidArgumentError("golden answer is empty");

    std::string prompt = std::string(kJudgePrompt) + "golden: " + golden +
                         "\ncandidate: " + candidate + "\nReply as: score: <0|1|2>";
    std::map<std::string, std::string> fields;
    try {
        fields = gateway_.complete_structured(ModelRole::judge, prompt, {"score"});
    } catch (const StructuredParseError& e) {
        throw VerificationError(std::string("judge output unparseable: ") + e.what());
    }
    const std::string& raw = fields.at("score");
    if (raw == "0") return 0;
    if (raw == "1") return 1;
    if (raw == "2") return 2;
    throw VerificationError("judge score out of range: " + raw);
}

std::string Verifier::direct_answer(const std::string& question) {
    auto fields = gateway_.complete_structured(
        ModelRole::infer,
        "Answer the question directly from your own knowledge, without any tools.\n"
        "If you cannot, reply 'answer: unknown'.\nQuestion: " + question +
        "\nReply as: answer: <text>",
        {"answer"});
    return fields.at("answer");
}

AtomicVerification Verifier::verify_atomic(const AtomicTask& task) {
    AtomicVerification out;
    out.verdict.check_name = "verify_atomic";
    try {
        AgentRun run = run_task_agent(task.question);
        int agent_score = text::trim(run.answer).empty()
                              ? 0
                              : judge_consistency(task.golden_answer, run.answer);
        int llm_score = judge_consistency(task.golden_answer, direct_answer(task.question));

        out.verdict.agent_score = agent_score;
        out.verdict.llm_score = llm_score;
        if (retention_accepts(agent_score, llm_score)) {
            out.verdict.accepted = true;
            run.trajectory.task_id = task.id;
            out.run = std::move(run);
        } else {
            out.verdict.accepted = false;
            out.verdict.reason = agent_score == 0
                                     ? "agent failed"
                                     : "agent score does not strictly exceed LLM score";
        }
    } catch (const Error& e) {
        out.verdict.accepted = false;
        out.verdict.reason = e.what();
    }
    return out;
}

Verdict Verifier::verify_superset(const InputIndex& inner, const InputIndex& outer,
                                  const Relation& relation) {
    if (inner.value == outer.value) {
        return Verdict::reject("verify_superset", "outer index equals inner index");
    }
    try {
        std::string prompt =
            "Check whether an index is a strict superset of another.\n"
            "Criteria, all required:\n"
            "1. The outer index names a superset that properly contains the inner one\n"
            "   (series, section, category, parent page).\n"
            "2. The outer index is not a synonym or rewording of the inner index.\n"
            "3. The relation uniquely identifies the inner element within the outer\n"
            "   one; no many-to-one mapping.\n"
            "Inner: " + inner.value + "\nOuter: " + outer.value +
            "\nRelation: " + relation.description +
            "\nReply as: verdict: <accept|reject> | reason: <short reason>";
        auto fields = gateway_.complete_structured(ModelRole::judge, prompt, {"verdict"});
        if (text::normalize(fields.at("verdict")) != "accept") {
            return Verdict::reject("verify_superset", verdict_reason(fields).empty()
                                                          ? "judge rejected superset"
                                                          : verdict_reason(fields));
        }

        // Knowledge-closed derivability guard: if the infer model names the
        // inner index from (outer, relation) alone, the hop adds no tool step.
        auto infer_fields = gateway_.complete_structured(
            ModelRole::infer,
            "From your own knowledge only, name the exact item identified within\n'" +
                outer.value + "' by the relation: " + relation.description +
                "\nIf unsure, reply 'answer: unknown'.\nReply as: answer: <text>",
            {"answer"});
        if (text::contains_normalized(infer_fields.at("answer"), inner.value)) {
            return Verdict::reject("verify_superset",
                                   "inner index derivable without tool use");
        }
        return Verdict::accept("verify_superset", verdict_reason(fields));
    } catch (const Error& e) {
        return Verdict::reject("verify_superset", std::string("check failed: ") + e.what());
    }
}

Verdict Verifier::verify_substitution(const std::string& original_q,
                                      const std::string& intermediate_q,
                                      const std::string& merged_q,
                                      const InputIndex& inner_index) {
    if (text::trim(original_q).empty() || text::trim(intermediate_q).empty() ||
        text::trim(merged_q).empty()) {
        throw InvalidArgumentError("verify_substitution: empty question");
    }
    if (text::contains_normalized(merged_q, inner_index.value)) {
        return Verdict::reject("verify_substitution",
                               "merged question still names the inner index");
    }
    try {
        std::string prompt =
            "Check a question substitution.\n"
            "The merged question must semantically embed the intermediate question\n"
            "in place of the original index reference, preserving the original ask.\n"
            "Original question: " + original_q + "\nIntermediate question: " + intermediate_q +
            "\nMerged question: " + merged_q +
            "\nReply as: verdict: <accept|reject> | reason: <short reason>";
        auto fields = gateway_.complete_structured(ModelRole::judge, prompt, {"verdict"});
        if (text::normalize(fields.at("verdict")) != "accept") {
            return Verdict::reject("verify_substitution",
                                   verdict_reason(fields).empty() ? "judge rejected substitution"
                                                                  : verdict_reason(fields));
        }
        return Verdict::accept("verify_substitution", verdict_reason(fields));
    } catch (const Error& e) {
        return Verdict::reject("verify_substitution", std::string("check failed: ") + e.what());
    }
}

Verdict Verifier::verify_leakage(const std::string& question, const std::string& golden) {
    if (text::trim(question).empty() || text::trim(golden).empty()) {
        throw InvalidArgumentError("verify_leakage: empty input");
    }
    if (text::contains_answer(question, golden)) {
        return Verdict::reject("verify_leakage", "golden answer appears in the question");
    }
    try {
        int score = judge_consistency(golden, direct_answer(question));
        if (score >= 1) {
            return Verdict::reject("verify_leakage",
                                   "answer inferable without tools (score " +
                                       std::to_string(score) + ")");
        }
        return Verdict::accept("verify_leakage");
    } catch (const Error& e) {
        return Verdict::reject("verify_leakage", std::string("check failed: ") + e.what());
    }
}

}  // namespace taskforge
