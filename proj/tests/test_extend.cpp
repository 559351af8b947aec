// SPDX-License-Identifier: Apache-2.0
#include <memory>

#include "doctest.h"
#include "taskforge/errors.hpp"
#include "taskforge/extend.hpp"
#include "taskforge/text.hpp"

using namespace taskforge;

namespace {

/// Scripted world supporting repeated depth hops: Item Page sits inside a
/// chain of containers Level1 -> Level2 -> Level3.
struct Harness {
    std::shared_ptr<ScriptedLlmBackend> llm = std::make_shared<ScriptedLlmBackend>();
    std::shared_ptr<ScriptedToolBackend> tool_backend = std::make_shared<ScriptedToolBackend>();
    Gateway gateway{llm};
    ToolAdapters tools{tool_backend};
    Verifier verifier{gateway, tools};
    PromptLibrary prompts = PromptLibrary::defaults();
    TaskExtender extender{gateway, tools, verifier, prompts};

    Harness() {
        for (int level = 0; level < 3; ++level) {
            std::string inner = level == 0 ? "Item Page" : "Level" + std::to_string(level);
            std::string outer = "Level" + std::to_string(level + 1);
            tool_backend->add_search("find " + inner,
                                     {{outer, "container of " + inner, "https://x/" + outer}});
            llm->add_rule(ModelRole::agent, {"Propose search queries", inner + "\n"},
                          "keywords: find " + inner);
            llm->add_rule(ModelRole::sampler, {"minimal unique superset", "Input: " + inner},
                          "superset: " + outer);
            llm->add_rule(ModelRole::sampler, {"State the relationship", "Inner: " + inner},
                          "relation: the entry under " + outer);
            llm->add_rule(ModelRole::sampler,
                          {"Compose one natural-language question", "'" + outer + "'"},
                          "question: Which entry does '" + outer + "' list?");
        }
        llm->add_rule(ModelRole::judge, {"strict superset"}, "verdict: accept | reason: ok");
        llm->add_rule(ModelRole::judge, {"Check a question substitution"},
                      "verdict: accept | reason: ok");
        llm->add_rule(ModelRole::judge, {"Score the consistency"}, "score: 0");
        llm->add_rule(ModelRole::infer, {}, "answer: unknown");
        // Merged question per hop: name the outermost container only.
        llm->add_rule(ModelRole::sampler, {"Substitute elements", "Level3"},
                      "What is the launch year of the item listed by the entry under Level3?");
        llm->add_rule(ModelRole::sampler, {"Substitute elements", "Level2"},
                      "What is the launch year of the item listed by the entry under Level2?");
        llm->add_rule(ModelRole::sampler, {"Substitute elements", "Level1"},
                      "What is the launch year of the item listed by the entry under Level1?");
    }

    ExtendedTask base_task() const {
        AtomicTask atomic;
        atomic.question = "According to 'Item Page', what is the launch year?";
        atomic.golden_answer = "1997";
        atomic.index = InputIndex{"Item Page", ToolKind::web_browse};
        atomic.relation = Relation{"the launch year"};
        atomic.source_document = "doc";
        atomic.id = derive_task_id("doc", atomic.question);
        return promote(atomic);
    }
};

}  // namespace

TEST_CASE("find_superset derives outer index and relation from search results") {
    Harness h;
    auto candidate = h.extender.find_superset({"Item Page", ToolKind::web_browse});
    CHECK(candidate.outer.value == "Level1");
    CHECK(candidate.relation.description == "the entry under Level1");
    CHECK(candidate.context.content.find("container of Item Page") != std::string::npos);
}

TEST_CASE("find_superset: no results or cyclic identifiers exhaust the attempt") {
    Harness h;
    h.llm->add_rule(ModelRole::agent, {"Propose search queries"}, "keywords: nothing here");
    CHECK_THROWS_AS(h.extender.find_superset({"Unknown Thing", ToolKind::web_browse}),
                    ExtensionExhaustedError);

    // A superset whose identifier still contains the inner value is a cycle.
    // Built from scratch so no other rule can offer a valid alternative.
    auto llm = std::make_shared<ScriptedLlmBackend>();
    llm->add_rule(ModelRole::agent, {"Propose search queries"}, "keywords: find item");
    llm->add_rule(ModelRole::sampler, {"minimal unique superset"},
                  "superset: The Widget Page Archive");
    auto tool_backend = std::make_shared<ScriptedToolBackend>();
    tool_backend->add_search("find item", {{"t", "s", "l"}});
    Gateway gateway{llm};
    ToolAdapters tools{tool_backend};
    Verifier verifier{gateway, tools};
    PromptLibrary prompts = PromptLibrary::defaults();
    TaskExtender extender{gateway, tools, verifier, prompts};
    CHECK_THROWS_AS(extender.find_superset({"Widget Page", ToolKind::web_browse}),
                    ExtensionExhaustedError);
}

TEST_CASE("search keyword budget: each query line is capped at 3 keywords") {
    Harness h;
    // Oracle through the tool layer: the only query the backend can answer is
    // the 3-keyword prefix, so a longer query would return nothing.
    h.llm->add_rule(ModelRole::agent, {"Propose search queries", "Wordy"},
                    "keywords: alpha beta gamma delta epsilon");
    h.tool_backend->add_search("alpha beta gamma", {{"Outer Page", "snippet", "loc"}});
    h.llm->add_rule(ModelRole::sampler, {"minimal unique superset", "Wordy"},
                    "superset: Outer Page");
    h.llm->add_rule(ModelRole::sampler, {"State the relationship", "Wordy"},
                    "relation: the wordy entry");
    auto candidate = h.extender.find_superset({"Wordy Thing", ToolKind::web_browse});
    CHECK(candidate.outer.value == "Outer Page");
}

TEST_CASE("compose_intermediate refuses questions that reveal the expected answer") {
    Harness h;
    auto hop = h.extender.compose_intermediate({"Level1", ToolKind::web_browse},
                                               Relation{"the entry under Level1"},
                                               "Item Page");
    CHECK(hop.intermediate_question == "Which entry does 'Level1' list?");
    CHECK(hop.expected_intermediate_answer == "Item Page");
    CHECK_FALSE(text::contains_answer(hop.intermediate_question,
                                      hop.expected_intermediate_answer));

    Harness h2;
    h2.llm->add_rule(ModelRole::sampler, {"Compose one natural-language question"},
                     "question: Is 'Item Page' the entry listed by the Archive Page?");
    CHECK_THROWS_AS(h2.extender.compose_intermediate({"Archive Page", ToolKind::web_browse},
                                                     Relation{"the entry"}, "Item Page"),
                    ComposeError);
}

TEST_CASE("extend_depth bookkeeping for targets 2 through 4") {
    for (int target = 2; target <= 4; ++target) {
        Harness h;
        ExtendedTask task = h.base_task();
        auto outcome = h.extender.extend_depth(task, target, 6);
        REQUIRE(outcome.reached_target);
        const auto& t = outcome.task;
        CHECK(hop_count(t) == target);
        CHECK(t.chain.size() == static_cast<std::size_t>(target - 1));
        CHECK(t.relation_history.size() == static_cast<std::size_t>(target));
        CHECK(t.golden_answer == "1997");  // never altered by extension
        CHECK(t.id == derive_task_id(t.source_document, t.question));
        CHECK(current_index(t).value == "Level" + std::to_string(target - 1));
        // Hop levels were recorded in ascending order.
        for (std::size_t i = 0; i < t.chain.size(); ++i) {
            CHECK(t.chain[i].level == static_cast<int>(i) + 1);
            CHECK(t.chain[i].expected_intermediate_answer ==
                  (i == 0 ? "Item Page" : "Level" + std::to_string(i)));
        }
        // One successful attempt per hop in this scripted world.
        CHECK(outcome.attempts.size() == static_cast<std::size_t>(target - 1));
    }
}

TEST_CASE("extend_depth failure consumes exactly n_k attempts and keeps the best task") {
    Harness h;
    // Break the world: no search results for anything.
    auto llm = std::make_shared<ScriptedLlmBackend>();
    llm->add_rule(ModelRole::agent, {"Propose search queries"}, "keywords: nothing");
    Gateway gateway{llm};
    ToolAdapters tools{std::make_shared<ScriptedToolBackend>()};
    Verifier verifier{gateway, tools};
    PromptLibrary prompts = PromptLibrary::defaults();
    TaskExtender extender{gateway, tools, verifier, prompts};

    ExtendedTask task = h.base_task();
    auto outcome = extender.extend_depth(task, 2, 6);
    CHECK_FALSE(outcome.reached_target);
    CHECK(outcome.attempts.size() == 6);
    for (const auto& attempt : outcome.attempts) {
        CHECK(attempt.hop_target == 2);
        CHECK_FALSE(attempt.outcome.accepted);
    }
    CHECK(outcome.attempts.front().attempt_index == 1);
    CHECK(outcome.attempts.back().attempt_index == 6);
    // The task is returned unchanged at its best achieved depth.
    CHECK(hop_count(outcome.task) == 1);
    CHECK(outcome.task.question == task.question);
}

TEST_CASE("extend_depth validates its inputs") {
    Harness h;
    ExtendedTask task = h.base_task();
    CHECK_THROWS_AS(h.extender.extend_depth(task, 1, 6), InvalidArgumentError);
    CHECK_THROWS_AS(h.extender.extend_depth(task, 2, 0), InvalidArgumentError);
    ExtendedTask width;
    width.kind = TaskKind::width;
    CHECK_THROWS_AS(h.extender.extend_depth(width, 2, 6), InvalidArgumentError);
}

TEST_CASE("merge_width composes the ordered composite answer and sums hops") {
    Harness h;
    h.llm->add_rule(ModelRole::sampler, {"Merge the two questions"},
                    "What is the launch year according to the item listing, and what is the "
                    "model name according to the catalog?");

    ExtendedTask a = h.base_task();
    ExtendedTask b = h.base_task();
    b.question = "According to 'Catalog Page', what is the model name?";
    b.golden_answer = "ZX-9";
    b.id = derive_task_id("doc2", b.question);
    b.source_document = "doc2";
    b.tool_kinds = {ToolKind::pdf_read};
    HopLink hop;
    hop.superset_index = {"Catalog Archive", ToolKind::web_browse};
    b.chain.push_back(hop);

    auto merged = h.extender.merge_width(a, b);
    CHECK(merged.kind == TaskKind::width);
    CHECK(merged.golden_answer == "1997; ZX-9");
    CHECK(hop_count(merged) == hop_count(a) + hop_count(b));
    CHECK(merged.parents == std::vector<std::string>{a.id, b.id});
    CHECK(merged.source_document == "doc+doc2");
    // Union of parent tool kinds, first-seen order.
    CHECK(merged.tool_kinds ==
          std::vector<ToolKind>{ToolKind::web_browse, ToolKind::pdf_read});
    CHECK(merged.id == derive_task_id("doc+doc2", merged.question));
}

TEST_CASE("merge_width rejects cross-answer leakage as a precondition") {
    Harness h;
    ExtendedTask a = h.base_task();
    ExtendedTask b = h.base_task();
    b.question = "Which page mentions the 1997 launch?";  // leaks a's answer
    b.golden_answer = "Item Page";
    b.id = derive_task_id("doc2", b.question);
    CHECK_THROWS_AS(h.extender.merge_width(a, b), InvalidArgumentError);
    CHECK_THROWS_AS(h.extender.merge_width(a, a), InvalidArgumentError);
}

TEST_CASE("merge_width rejects merged questions that leak either answer") {
    Harness h;
    h.llm->add_rule(ModelRole::sampler, {"Merge the two questions"},
                    "Did the 1997 launch precede the catalog model?");

    ExtendedTask a = h.base_task();
    ExtendedTask b = h.base_task();
    b.question = "According to 'Catalog Page', what is the model name?";
    b.golden_answer = "ZX-9";
    b.id = derive_task_id("doc2", b.question);
    CHECK_THROWS_AS(h.extender.merge_width(a, b), MergeError);
}
