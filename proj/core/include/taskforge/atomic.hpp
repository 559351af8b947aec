// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "taskforge/gateway.hpp"
#include "taskforge/model.hpp"
#include "taskforge/prompts.hpp"
#include "taskforge/tools.hpp"

namespace taskforge {

/// A corpus document to mine for atomic tasks.
struct CorpusDocument {
    std::string id;
    ToolKind tool = ToolKind::web_browse;
    std::string locator;
    std::string index_value;  // optional; derived from locator when empty

    InputIndex index() const;
};

/// Candidate answer extracted from a tool context, with its grounding span
/// and inferred relation.
struct CandidateConclusion {
    std::string answer;
    std::string evidence_span;
    Relation relation;
};

struct AtomicGeneratorConfig {
    int candidate_cap = 8;     // per document, pre-verification
    int chunk_size = 4000;     // characters
    int chunk_overlap = 200;   // characters
    int compose_retries = 2;   // extra attempts when a composition leaks
};

/// Splits content into overlapping character chunks.
std::vector<std::string> chunk_text(const std::string& content, int chunk_size, int overlap);

/// Turns corpus documents into candidate atomic tasks: tool execution,
/// answer/relation extraction, question composition.
class AtomicGenerator {
public:
    AtomicGenerator(Gateway& gateway, ToolAdapters& tools, const PromptLibrary& prompts,
                    AtomicGeneratorConfig config = {});

    /// Candidates grounded in the context: answers must appear verbatim in
    /// the content, evidence spans must occur in it. Duplicates (by answer +
    /// relation) collapse to the first occurrence.
    std::vector<CandidateConclusion> extract_candidates(const ToolContext& context);

    /// Composes a question naming the index and asking for the entity
    /// satisfying the relation. Retries on answer leakage, then ComposeError.
    std::string compose_question(const InputIndex& index, const Relation& relation,
                                 const std::string& answer);

    /// Full per-document pipeline. Candidate-level failures drop the
    /// candidate only; tool errors propagate to the caller.
    std::vector<AtomicTask> generate_atomic(const CorpusDocument& document);

private:
    Gateway& gateway_;
    ToolAdapters& tools_;
    const PromptLibrary& prompts_;
    AtomicGeneratorConfig config_;
};

}  // namespace taskforge
