// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "taskforge/gateway.hpp"
#include "taskforge/model.hpp"
#include "taskforge/prompts.hpp"
#include "taskforge/tools.hpp"
#include "taskforge/verify.hpp"

namespace taskforge {

/// One logged extension attempt for a hop.
struct ExtensionAttempt {
    int hop_target = 0;
    int attempt_index = 0;  // 1..n_k
    Verdict outcome;
    double elapsed_seconds = 0.0;
};

/// Superset candidate produced by the search agent.
struct SupersetCandidate {
    InputIndex outer;
    Relation relation;
    ToolContext context;
};

/// Result of a depth extension: the best task achieved, whether the target
/// hop count was reached, and the full attempt log.
struct ExtensionOutcome {
    ExtendedTask task;
    bool reached_target = false;
    std::vector<ExtensionAttempt> attempts;
};

struct ExtenderConfig {
    int n_k = 6;              // total attempts per hop
    int search_k = 3;
    int compose_retries = 2;
};

/// Depth-based recursive extension and width-based merging.
class TaskExtender {
public:
    TaskExtender(Gateway& gateway, ToolAdapters& tools, Verifier& verifier,
                 const PromptLibrary& prompts, ExtenderConfig config = {});

    /// Search-agent loop: propose <=3 keywords per query, gather candidate
    /// contexts, derive the superset identifier and its relation. Candidates
    /// whose identifier contains the inner value are discarded (cycle guard).
    SupersetCandidate find_superset(const InputIndex& inner);

    /// Intermediate question asking for the entity identified by the relation
    /// within the outer index; must not contain the expected answer.
    HopLink compose_intermediate(const InputIndex& outer, const Relation& relation,
                                 const std::string& expected);

    /// Rewrites the prior question, replacing the inner index reference with
    /// the hop's intermediate question while preserving the relation history.
    std::string merge_depth(const std::string& prior_question, const HopLink& hop,
                            const std::vector<Relation>& relation_history);

    /// Per hop: find_superset -> verify_superset -> compose_intermediate ->
    /// merge_depth -> verify_substitution -> verify_leakage, retried up to
    /// n_k attempts. The golden answer is never altered. Returns the task at
    /// the highest hop count achieved.
    ExtensionOutcome extend_depth(const ExtendedTask& task, int target_hops, int n_k);
    ExtensionOutcome extend_depth(const ExtendedTask& task, int target_hops);

    /// Merges two tasks into one compound question whose golden answer is the
    /// ordered composite "a1; a2". Cross-answer leakage between the parents
    /// is a precondition violation; post-merge leakage throws MergeError.
    ExtendedTask merge_width(const ExtendedTask& a, const ExtendedTask& b);

private:
    Gateway& gateway_;
    ToolAdapters& tools_;
    Verifier& verifier_;
    const PromptLibrary& prompts_;
    ExtenderConfig config_;
};

}  // namespace taskforge
