// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "taskforge/gateway.hpp"

namespace taskforge {

/// The prompt templates the pipeline stages render. Four of them
/// (candidate_extraction, superset_guidance, relation_articulation,
/// logical_substitution) are optimizable via exemplar selection; the rest
/// are fixed.
struct PromptLibrary {
    PromptTemplate candidate_extraction;   // {chunk}
    PromptTemplate question_composition;   // {index}, {relation}
    PromptTemplate superset_guidance;      // {inner}, {candidates}
    PromptTemplate relation_articulation;  // {inner}, {outer}, {candidates}
    PromptTemplate logical_substitution;   // {core_question}, {auxiliary_question}, {relations}

    static PromptLibrary defaults();

    /// Optimizable slot names, in canonical order.
    static const std::vector<std::string>& optimizable_slots();

    PromptTemplate& slot(const std::string& name);
    const PromptTemplate& slot(const std::string& name) const;

    /// One JSON file per slot: {"body": .., "exemplars": [..]}. Missing
    /// files keep the default template.
    void load_dir(const std::string& dir);
    void save_dir(const std::string& dir) const;

    /// fnv1a64 hex of each rendered base template, for the dataset manifest.
    std::map<std::string, std::string> hashes() const;
};

}  // namespace taskforge
