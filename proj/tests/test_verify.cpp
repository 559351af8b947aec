// SPDX-License-Identifier: Apache-2.0
#include <memory>

#include "doctest.h"
#include "taskforge/errors.hpp"
#include "taskforge/verify.hpp"

using namespace taskforge;

namespace {

struct Harness {
    std::shared_ptr<ScriptedLlmBackend> llm = std::make_shared<ScriptedLlmBackend>();
    std::shared_ptr<ScriptedToolBackend> tool_backend = std::make_shared<ScriptedToolBackend>();
    Gateway gateway{llm};
    ToolAdapters tools{tool_backend};
    Verifier verifier{gateway, tools};
};

AtomicTask sample_task() {
    AtomicTask task;
    task.question = "According to 'Page X', what is the launch year?";
    task.golden_answer = "1997";
    task.index = InputIndex{"Page X", ToolKind::web_browse};
    task.relation = Relation{"the launch year"};
    task.source_document = "doc";
    task.id = derive_task_id("doc", task.question);
    return task;
}

}  // namespace

TEST_CASE("retention rule accepts exactly agent > llm with agent > 0") {
    int accepted = 0;
    for (int agent = 0; agent <= 2; ++agent) {
        for (int llm = 0; llm <= 2; ++llm) {
            bool expect = agent > llm && agent > 0;  // independent restatement
            CHECK(Verifier::retention_accepts(agent, llm) == expect);
            if (expect) ++accepted;
        }
    }
    CHECK(accepted == 3);
    CHECK(Verifier::retention_accepts(1, 0));
    CHECK(Verifier::retention_accepts(2, 0));
    CHECK(Verifier::retention_accepts(2, 1));
    CHECK_FALSE(Verifier::retention_accepts(2, 2));
    CHECK_FALSE(Verifier::retention_accepts(0, 0));
}

TEST_CASE("task agent: tool steps then a final answer, with a trajectory") {
    Harness h;
    h.tool_backend->add_context(ToolKind::web_browse, "Page X", "Launched in 1997.");
    h.llm->add_rule(ModelRole::agent, {"launch year", "observation="},
                    "action: final | answer: 1997");
    h.llm->add_rule(ModelRole::agent, {"launch year"},
                    "action: tool | tool: web_browse | input: Page X | plan: open the page");

    auto run = h.verifier.run_task_agent("what is the launch year?", 3);
    CHECK(run.answer == "1997");
    CHECK(run.steps_used == 1);
    REQUIRE(run.trajectory.steps.size() == 1);
    CHECK(run.trajectory.steps[0].tool == ToolKind::web_browse);
    CHECK(run.trajectory.steps[0].observation == "Launched in 1997.");
    CHECK(run.trajectory.steps[0].plan_note == "open the page");
    CHECK(run.trajectory.final_answer == "1997");
}

TEST_CASE("task agent: tool failures become observations; budget exhaustion yields no answer") {
    Harness h;
    h.llm->add_rule(ModelRole::agent, {},
                    "action: tool | tool: web_browse | input: Nowhere | plan: try");
    auto run = h.verifier.run_task_agent("q", 2);
    CHECK(run.answer.empty());
    CHECK(run.steps_used == 2);
    for (const auto& step : run.trajectory.steps) {
        CHECK(step.observation.rfind("error:", 0) == 0);
    }
    CHECK_THROWS_AS(h.verifier.run_task_agent("q", 0), InvalidArgumentError);
}

TEST_CASE("judge_consistency maps rubric replies to scores and rejects garbage") {
    Harness h;
    h.llm->add_rule(ModelRole::judge, {"candidate: two"}, "score: 2");
    h.llm->add_rule(ModelRole::judge, {"candidate: seven"}, "score: 7");
    h.llm->add_rule(ModelRole::judge, {"candidate: words"}, "that is inconsistent");

    CHECK(h.verifier.judge_consistency("golden", "two") == 2);
    CHECK_THROWS_AS(h.verifier.judge_consistency("golden", "seven"), VerificationError);
    CHECK_THROWS_AS(h.verifier.judge_consistency("golden", "words"), VerificationError);
    CHECK_THROWS_AS(h.verifier.judge_consistency("  ", "x"), InvalidArgumentError);
}

TEST_CASE("verify_atomic retains exactly when the agent beats the tool-free answer") {
    Harness h;
    h.tool_backend->add_context(ToolKind::web_browse, "Page X", "Launched in 1997.");
    h.llm->add_rule(ModelRole::agent, {"launch year", "observation="},
                    "action: final | answer: 1997");
    h.llm->add_rule(ModelRole::agent, {"launch year"},
                    "action: tool | tool: web_browse | input: Page X | plan: open");
    h.llm->add_rule(ModelRole::infer, {"Answer the question directly"}, "answer: unknown");
    h.llm->add_rule(ModelRole::judge, {"candidate: 1997"}, "score: 2");
    h.llm->add_rule(ModelRole::judge, {}, "score: 0");

    auto result = h.verifier.verify_atomic(sample_task());
    CHECK(result.verdict.accepted);
    CHECK(result.verdict.agent_score == 2);
    CHECK(result.verdict.llm_score == 0);
    REQUIRE(result.run.has_value());
    CHECK(result.run->trajectory.task_id == sample_task().id);
    CHECK(result.run->steps_used == 1);
}

TEST_CASE("verify_atomic: an empty agent answer scores 0 and is rejected as agent failure") {
    Harness h;
    // Agent burns its steps on a missing page; infer answers confidently.
    h.llm->add_rule(ModelRole::agent, {},
                    "action: tool | tool: web_browse | input: Nowhere | plan: try");
    h.llm->add_rule(ModelRole::infer, {"Answer the question directly"}, "answer: 1997");
    h.llm->add_rule(ModelRole::judge, {}, "score: 2");

    auto result = h.verifier.verify_atomic(sample_task());
    CHECK_FALSE(result.verdict.accepted);
    CHECK(result.verdict.agent_score == 0);
    CHECK(result.verdict.llm_score == 2);
    CHECK(result.verdict.reason == "agent failed");
    CHECK_FALSE(result.run.has_value());
}

TEST_CASE("verify_atomic: ties reject because the tool added nothing") {
    Harness h;
    h.tool_backend->add_context(ToolKind::web_browse, "Page X", "Launched in 1997.");
    h.llm->add_rule(ModelRole::agent, {"launch year", "observation="},
                    "action: final | answer: 1997");
    h.llm->add_rule(ModelRole::agent, {"launch year"},
                    "action: tool | tool: web_browse | input: Page X | plan: open");
    h.llm->add_rule(ModelRole::infer, {"Answer the question directly"}, "answer: 1997");
    h.llm->add_rule(ModelRole::judge, {"candidate: 1997"}, "score: 2");

    auto result = h.verifier.verify_atomic(sample_task());
    CHECK_FALSE(result.verdict.accepted);
    CHECK(result.verdict.agent_score == 2);
    CHECK(result.verdict.llm_score == 2);
}

TEST_CASE("verify_superset rejects identical indices without any model call") {
    Harness h;  // no scripted replies: a model call would throw ScriptedMissError
    InputIndex idx{"Same Page", ToolKind::web_browse};
    auto verdict = h.verifier.verify_superset(idx, idx, Relation{"contains"});
    CHECK_FALSE(verdict.accepted);
    CHECK(h.gateway.usage().calls == 0);
}

TEST_CASE("verify_superset: judge rejection and derivability guard both reject") {
    Harness h;
    h.llm->add_rule(ModelRole::judge, {"strict superset", "Synonym Page"},
                    "verdict: reject | reason: synonym, not a superset");
    h.llm->add_rule(ModelRole::judge, {"strict superset"},
                    "verdict: accept | reason: genuine container");
    h.llm->add_rule(ModelRole::infer, {"From your own knowledge only", "Guessable"},
                    "answer: Inner Page");
    h.llm->add_rule(ModelRole::infer, {"From your own knowledge only"}, "answer: unknown");

    InputIndex inner{"Inner Page", ToolKind::web_browse};
    auto synonym = h.verifier.verify_superset(
        inner, {"Synonym Page", ToolKind::web_browse}, Relation{"same thing"});
    CHECK_FALSE(synonym.accepted);

    auto guessable = h.verifier.verify_superset(
        inner, {"Guessable Container", ToolKind::web_browse}, Relation{"the first item"});
    CHECK_FALSE(guessable.accepted);
    CHECK(guessable.reason == "inner index derivable without tool use");

    auto genuine = h.verifier.verify_superset(
        inner, {"Container Page", ToolKind::web_browse}, Relation{"the first item"});
    CHECK(genuine.accepted);
}

TEST_CASE("verify_substitution requires the inner index to disappear") {
    Harness h;
    h.llm->add_rule(ModelRole::judge, {"Check a question substitution"},
                    "verdict: accept | reason: embedded");

    InputIndex inner{"Inner Page", ToolKind::web_browse};
    auto leaky = h.verifier.verify_substitution("orig q", "intermediate q",
                                                "what does Inner Page say?", inner);
    CHECK_FALSE(leaky.accepted);

    auto clean = h.verifier.verify_substitution(
        "orig q", "intermediate q", "what does the page found above say?", inner);
    CHECK(clean.accepted);
    CHECK_THROWS_AS(h.verifier.verify_substitution("", "b", "c", inner),
                    InvalidArgumentError);
}

TEST_CASE("verify_leakage short-circuits on substring before any model call") {
    Harness h;  // unscripted: any model call would throw
    auto verdict = h.verifier.verify_leakage(
        "The merger is valued at approximately $34.5 billion. What is the exact amount?",
        "34.5B USD");
    CHECK_FALSE(verdict.accepted);
    CHECK(verdict.reason == "golden answer appears in the question");
    CHECK(h.gateway.usage().calls == 0);
}

TEST_CASE("verify_leakage: inferable answers reject, sealed questions pass") {
    Harness h;
    h.llm->add_rule(ModelRole::infer, {"capital of France"}, "answer: Paris");
    h.llm->add_rule(ModelRole::infer, {}, "answer: unknown");
    h.llm->add_rule(ModelRole::judge, {"candidate: Paris"}, "score: 2");
    h.llm->add_rule(ModelRole::judge, {}, "score: 0");

    auto inferable = h.verifier.verify_leakage("What is the capital of France?", "Paris");
    CHECK_FALSE(inferable.accepted);

    auto sealed = h.verifier.verify_leakage("What does the page report?", "42 units");
    CHECK(sealed.accepted);
}
