// SPDX-License-Identifier: Apache-2.0
#include "taskforge/prompt_opt.hpp"

#include <random>
#include <set>

#include "taskforge/errors.hpp"

namespace taskforge {

namespace {

// Fisher-Yates over index vector; avoids std::shuffle so results are
// identical across standard library implementations.
std::vector<std::size_t> sample_without_replacement(std::size_t pool_size, std::size_t k,
                                                    std::mt19937_64& rng) {
    std::vector<std::size_t> indices(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) indices[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (pool_size - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k);
    std::sort(indices.begin(), indices.end());
    return indices;
}

}  // namespace

std::vector<PromptTemplate> propose_configs(const PromptSlot& slot, int k, int num_configs,
                                            std::uint64_t seed) {
    if (k < 1) throw InvalidArgumentError("k must be >= 1");
    if (num_configs < 1) throw InvalidArgumentError("num_configs must be >= 1");
    if (static_cast<int>(slot.example_pool.size()) < k) {
        throw InvalidArgumentError("exemplar pool smaller than k for slot " + slot.name);
    }

    std::mt19937_64 rng(seed);
    std::vector<PromptTemplate> configs;
    std::set<std::vector<std::size_t>> seen;
    int stale = 0;
    while (static_cast<int>(configs.size()) < num_configs) {
        auto indices = sample_without_replacement(slot.example_pool.size(),
                                                  static_cast<std::size_t>(k), rng);
        if (!seen.insert(indices).second) {
            if (++stale > 1000) {
                throw InvalidArgumentError("cannot draw " + std::to_string(num_configs) +
                                           " distinct exemplar sets for slot " + slot.name);
            }
            continue;
        }
        PromptTemplate config = slot.base_template;
        config.exemplars.clear();
        for (std::size_t idx : indices) config.exemplars.push_back(slot.example_pool[idx]);
        configs.push_back(std::move(config));
    }
    return configs;
}

double evaluate_config(const PromptTemplate& config, const std::vector<std::string>& eval_batch,
                       Objective objective, const StageRunner& runner,
                       double* mean_time_seconds) {
    if (eval_batch.empty()) throw InvalidArgumentError("evaluation batch is empty");

    long accepted = 0;
    double hops_total = 0.0;
    double time_total = 0.0;
    for (const auto& input : eval_batch) {
        StageOutcome outcome = runner(config, input);
        if (outcome.accepted) ++accepted;
        hops_total += outcome.hops;
        time_total += outcome.elapsed_seconds;
    }
    if (mean_time_seconds) {
        *mean_time_seconds = time_total / static_cast<double>(eval_batch.size());
    }
    if (objective == Objective::pass_rate) {
        return static_cast<double>(accepted) / static_cast<double>(eval_batch.size());
    }
    return hops_total / static_cast<double>(eval_batch.size());
}

std::pair<PromptTemplate, OptimizationReport> optimize(
    const PromptSlot& slot, int k, int num_configs, const std::vector<std::string>& eval_batch,
    Objective objective, std::uint64_t seed, const StageRunner& runner) {
    auto configs = propose_configs(slot, k, num_configs, seed);

    OptimizationReport report;
    report.slot_name = slot.name;
    report.seed = seed;

    int winner = 0;
    for (int i = 0; i < static_cast<int>(configs.size()); ++i) {
        ConfigEvaluation eval;
        eval.config_index = i;
        eval.score = evaluate_config(configs[static_cast<std::size_t>(i)], eval_batch,
                                     objective, runner, &eval.mean_time_seconds);
        report.evaluations.push_back(eval);

        const auto& best = report.evaluations[static_cast<std::size_t>(winner)];
        if (eval.score > best.score ||
            (eval.score == best.score && eval.mean_time_seconds < best.mean_time_seconds)) {
            winner = i;
        }
    }
    report.winner_index = winner;
    return {configs[static_cast<std::size_t>(winner)], report};
}

}  // namespace taskforge
