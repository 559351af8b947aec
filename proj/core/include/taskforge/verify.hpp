// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "taskforge/gateway.hpp"
#include "taskforge/model.hpp"
#include "taskforge/tools.hpp"

namespace taskforge {

/// Result of one bounded tool-using agent run.
struct AgentRun {
    std::string answer;  // empty when the step budget ran out
    Trajectory trajectory;
    int steps_used = 0;
};

struct AtomicVerification {
    Verdict verdict;
    std::optional<AgentRun> run;  // attached when accepted
};

struct VerifierConfig {
    int max_agent_steps = 3;
    int search_k = 3;
};

/// Renders a tool observation as the agent sees it; replay uses the same
/// rendering so stored and replayed observations compare byte-for-byte.
std::string observe_tool(ToolAdapters& tools, ToolKind tool, const std::string& input,
                         int search_k);

/// Judge rubric, retention rule, and the extension checks. Stateless given
/// the gateway and tool adapters; safe to share across threads.
class Verifier {
public:
    Verifier(Gateway& gateway, ToolAdapters& tools, VerifierConfig config = {});

    /// True exactly when agent_score > llm_score and agent_score > 0.
    static bool retention_accepts(int agent_score, int llm_score);

    /// Bounded agent loop: the agent-role model proposes (tool, input) or a
    /// final answer; tool errors become observations.
    AgentRun run_task_agent(const std::string& question, int max_steps);
    AgentRun run_task_agent(const std::string& question);

    /// 2 = equivalent, 1 = golden plus valid extras, 0 = omission or
    /// contradiction. Unparseable judge output after one reprompt ->
    /// VerificationError.
    int judge_consistency(const std::string& golden, const std::string& candidate);

    /// Agent-vs-infer retention check; the only check that runs tools.
    AtomicVerification verify_atomic(const AtomicTask& task);

    /// Strict-superset check: genuine containment, no synonym, relation
    /// uniquely identifies the inner index, and the inner index is not
    /// derivable knowledge-closed from (outer, relation).
    Verdict verify_superset(const InputIndex& inner, const InputIndex& outer,
                            const Relation& relation);

    /// The merged question must drop the inner index reference and embed the
    /// intermediate question in its place.
    Verdict verify_substitution(const std::string& original_q, const std::string& intermediate_q,
                                const std::string& merged_q, const InputIndex& inner_index);

    /// Information-sealing check: substring short-circuit first, then a
    /// tool-free infer attempt scored by the judge (score >= 1 rejects).
    Verdict verify_leakage(const std::string& question, const std::string& golden);

private:
    std::string direct_answer(const std::string& question);

    Gateway& gateway_;
    ToolAdapters& tools_;
    VerifierConfig config_;
};

}  // namespace taskforge
