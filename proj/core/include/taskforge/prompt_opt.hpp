// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "taskforge/gateway.hpp"

namespace taskforge {

/// An optimizable prompt slot: its base template plus the exemplar pool the
/// bootstrap search samples from.
struct PromptSlot {
    std::string name;
    PromptTemplate base_template;
    std::vector<std::string> example_pool;
};

enum class Objective { pass_rate, hop_count };

/// Outcome of running one pipeline-stage input under a candidate config.
struct StageOutcome {
    bool accepted = false;
    double hops = 0.0;
    double elapsed_seconds = 0.0;
};

/// Runs the slot's stage over one input with the candidate template
/// installed. Stage errors must be reported as rejections, not thrown.
using StageRunner =
    std::function<StageOutcome(const PromptTemplate& config, const std::string& input)>;

struct ConfigEvaluation {
    int config_index = 0;
    double score = 0.0;
    double mean_time_seconds = 0.0;
};

struct OptimizationReport {
    std::string slot_name;
    std::vector<ConfigEvaluation> evaluations;
    int winner_index = 0;
    std::uint64_t seed = 0;
};

/// Each configuration = base template + k pool exemplars sampled without
/// replacement under the seeded generator; configurations are pairwise
/// distinct sets. Deterministic for a fixed seed.
std::vector<PromptTemplate> propose_configs(const PromptSlot& slot, int k, int num_configs,
                                            std::uint64_t seed);

/// pass_rate = accepted/attempted; hop_count = mean hops achieved.
double evaluate_config(const PromptTemplate& config, const std::vector<std::string>& eval_batch,
                       Objective objective, const StageRunner& runner,
                       double* mean_time_seconds = nullptr);

/// Argmax by objective; ties break to lower mean time, then lower index.
std::pair<PromptTemplate, OptimizationReport> optimize(
    const PromptSlot& slot, int k, int num_configs, const std::vector<std::string>& eval_batch,
    Objective objective, std::uint64_t seed, const StageRunner& runner);

}  // namespace taskforge
