// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <set>

#include "doctest.h"
#include "taskforge/errors.hpp"
#include "taskforge/prompt_opt.hpp"

using namespace taskforge;

namespace {

PromptSlot make_slot(int pool_size) {
    PromptSlot slot;
    slot.name = "candidate_extraction";
    slot.base_template.slot_name = slot.name;
    slot.base_template.body = "extract from {chunk}";
    for (int i = 0; i < pool_size; ++i) {
        slot.example_pool.push_back("exemplar_" + std::to_string(i));
    }
    return slot;
}

}  // namespace

TEST_CASE("propose_configs: k exemplars each, pairwise-distinct sets, deterministic") {
    PromptSlot slot = make_slot(30);
    auto configs = propose_configs(slot, 20, 10, 7);
    REQUIRE(configs.size() == 10);

    std::set<std::vector<std::string>> seen;
    for (const auto& config : configs) {
        CHECK(config.exemplars.size() == 20);
        CHECK(config.body == slot.base_template.body);
        // Every exemplar comes from the pool, without repetition.
        std::set<std::string> unique(config.exemplars.begin(), config.exemplars.end());
        CHECK(unique.size() == 20);
        for (const auto& ex : config.exemplars) {
            CHECK(std::find(slot.example_pool.begin(), slot.example_pool.end(), ex) !=
                  slot.example_pool.end());
        }
        CHECK(seen.insert(config.exemplars).second);  // pairwise distinct
    }

    auto again = propose_configs(slot, 20, 10, 7);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        CHECK(configs[i].exemplars == again[i].exemplars);
    }
    auto other_seed = propose_configs(slot, 20, 10, 8);
    bool any_difference = false;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (configs[i].exemplars != other_seed[i].exemplars) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("propose_configs validates the pool and parameters") {
    PromptSlot slot = make_slot(5);
    CHECK_THROWS_AS(propose_configs(slot, 6, 2, 1), InvalidArgumentError);
    CHECK_THROWS_AS(propose_configs(slot, 0, 2, 1), InvalidArgumentError);
    CHECK_THROWS_AS(propose_configs(slot, 2, 0, 1), InvalidArgumentError);
    // More distinct sets than C(2,1)=2 exist cannot be drawn.
    PromptSlot tiny = make_slot(2);
    CHECK_THROWS_AS(propose_configs(tiny, 1, 3, 1), InvalidArgumentError);
}

TEST_CASE("evaluate_config computes pass rate and mean hops exactly") {
    PromptTemplate config;
    std::vector<std::string> batch = {"a", "b", "c", "d"};
    StageRunner runner = [](const PromptTemplate&, const std::string& input) {
        StageOutcome out;
        out.accepted = input == "a" || input == "b" || input == "c";
        out.hops = input == "a" ? 4.0 : 2.0;
        out.elapsed_seconds = 0.5;
        return out;
    };

    double mean_time = 0.0;
    CHECK(evaluate_config(config, batch, Objective::pass_rate, runner, &mean_time) ==
          doctest::Approx(0.75).epsilon(1e-12));
    CHECK(mean_time == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(evaluate_config(config, batch, Objective::hop_count, runner) ==
          doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate_config(config, {}, Objective::pass_rate, runner),
                    InvalidArgumentError);
}

TEST_CASE("optimize recovers a planted exemplar on a monotone landscape") {
    PromptSlot slot = make_slot(6);
    slot.example_pool[3] = "PLANTED";

    StageRunner runner = [](const PromptTemplate& config, const std::string&) {
        StageOutcome out;
        out.accepted = std::find(config.exemplars.begin(), config.exemplars.end(),
                                 "PLANTED") != config.exemplars.end();
        out.hops = 1.0;
        return out;
    };

    // k=1 over all 6 singleton sets: exactly one candidate scores 1.0.
    auto [winner, report] = optimize(slot, 1, 6, {"x"}, Objective::pass_rate, 11, runner);
    REQUIRE(winner.exemplars.size() == 1);
    CHECK(winner.exemplars[0] == "PLANTED");

    double best = 0.0;
    for (const auto& eval : report.evaluations) best = std::max(best, eval.score);
    CHECK(report.evaluations[static_cast<std::size_t>(report.winner_index)].score == best);
    CHECK(best == 1.0);
}

TEST_CASE("optimize is deterministic for a fixed seed and ties break to faster configs") {
    PromptSlot slot = make_slot(8);
    StageRunner flat = [](const PromptTemplate& config, const std::string&) {
        StageOutcome out;
        out.accepted = true;
        // Configs holding exemplar_0 evaluate faster.
        out.elapsed_seconds = std::find(config.exemplars.begin(), config.exemplars.end(),
                                        "exemplar_0") != config.exemplars.end()
                                  ? 0.1
                                  : 1.0;
        return out;
    };

    auto [w1, r1] = optimize(slot, 2, 5, {"x", "y"}, Objective::pass_rate, 99, flat);
    auto [w2, r2] = optimize(slot, 2, 5, {"x", "y"}, Objective::pass_rate, 99, flat);
    CHECK(w1.exemplars == w2.exemplars);
    CHECK(r1.winner_index == r2.winner_index);

    // All scores tie at 1.0, so the winner must be one of the fast configs if
    // any exists among the candidates.
    bool any_fast = false;
    auto configs = propose_configs(slot, 2, 5, 99);
    for (const auto& c : configs) {
        if (std::find(c.exemplars.begin(), c.exemplars.end(), "exemplar_0") !=
            c.exemplars.end()) {
            any_fast = true;
        }
    }
    if (any_fast) {
        CHECK(std::find(w1.exemplars.begin(), w1.exemplars.end(), "exemplar_0") !=
              w1.exemplars.end());
    }
}
