// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "taskforge/errors.hpp"
#include "taskforge/pipeline.hpp"
#include "test_support.hpp"

using namespace taskforge;
namespace fs = std::filesystem;

namespace {

std::string write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("ingest keeps valid rows and reports line-numbered warnings") {
    auto dir = test_support::temp_dir("ingest");
    std::string manifest = write_text(
        dir / "corpus.jsonl",
        R"({"id":"d1","modality":"webpage","locator":"https://x","index":"Page"})"
        "\n"
        "not json at all\n"
        "\n"  // blank lines are fine
        R"({"id":"d2","modality":"hologram","locator":"x"})"
        "\n"
        R"({"id":"","modality":"pdf","locator":"x.pdf"})"
        "\n"
        R"({"id":"d3","modality":"pdf","locator":"report.pdf"})"
        "\n");

    std::vector<std::string> warnings;
    auto entries = ingest(manifest, &warnings);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].id == "d1");
    CHECK(entries[1].id == "d3");
    REQUIRE(warnings.size() == 3);
    CHECK(warnings[0].rfind("line 2:", 0) == 0);
    CHECK(warnings[1].rfind("line 4:", 0) == 0);
    CHECK(warnings[2].rfind("line 5:", 0) == 0);

    CHECK_THROWS_AS(ingest((dir / "missing.jsonl").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("modalities map onto their target tools") {
    CHECK(tool_for_modality("webpage") == ToolKind::web_browse);
    CHECK(tool_for_modality("pdf") == ToolKind::pdf_read);
    CHECK(tool_for_modality("image") == ToolKind::image_understand);
    CHECK_THROWS_AS(tool_for_modality("hologram"), InvalidArgumentError);
}

TEST_CASE("config loads from JSON, honors env overrides, hides credentials") {
    auto dir = test_support::temp_dir("config");
    std::string path = write_text(dir / "config.json", R"({
        "mode": "scripted",
        "budgets": {"max_calls": 100, "agent_steps": 4, "n_k": 5},
        "hop_target": 3,
        "width_pairs": 2,
        "parallelism": 2,
        "seed": 7,
        "corpus": "c.jsonl",
        "fixtures": "fx",
        "output": "out_dir"
    })");

    setenv("TASKFORGE_API_KEY", "sekrit", 1);
    setenv("TASKFORGE_LLM_ENDPOINT", "https://llm.example", 1);
    auto config = PipelineConfig::from_file(path);
    unsetenv("TASKFORGE_API_KEY");
    unsetenv("TASKFORGE_LLM_ENDPOINT");

    CHECK(config.budgets.max_calls == 100);
    CHECK(config.budgets.agent_steps == 4);
    CHECK(config.budgets.n_k == 5);
    CHECK(config.hop_target == 3);
    CHECK(config.seed == 7);
    CHECK(config.api_key == "sekrit");
    CHECK(config.llm_endpoint == "https://llm.example");

    // The manifest snapshot must never carry credentials or endpoints.
    std::string snapshot = config.snapshot().dump();
    CHECK(snapshot.find("sekrit") == std::string::npos);
    CHECK(snapshot.find("llm.example") == std::string::npos);
    CHECK(config.snapshot().at("seed") == 7);

    CHECK_THROWS_AS(PipelineConfig::from_file((dir / "missing.json").string()), ConfigError);
    write_text(dir / "bad.json", "{nope");
    CHECK_THROWS_AS(PipelineConfig::from_file((dir / "bad.json").string()), ConfigError);
    write_text(dir / "neg.json", R"({"parallelism": 0})");
    CHECK_THROWS_AS(PipelineConfig::from_file((dir / "neg.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("scripted end-to-end run emits a verified multi-hop dataset") {
    auto dir = test_support::temp_dir("e2e");
    Pipeline pipeline(test_support::e2e_config(dir));
    RunReport report = pipeline.run();

    CHECK_FALSE(report.partial);
    CHECK(report.tasks_emitted == 3);
    CHECK_FALSE(report.checksum.empty());

    auto records = load_dataset((dir / "dataset.jsonl").string());
    REQUIRE(records.size() == 3);
    int depth = 0;
    int width = 0;
    for (const auto& rec : records) {
        if (rec.kind == "depth") {
            ++depth;
            CHECK(rec.hop_count == 2);
            CHECK(rec.parents.size() == 1);
        } else {
            ++width;
            CHECK(rec.hop_count == 4);
            CHECK(rec.parents.size() == 2);
        }
        REQUIRE(rec.trajectory.has_value());
        CHECK(rec.trajectory->final_answer == rec.answer);
        CHECK_FALSE(rec.verdicts.empty());
        // Each depth task replays with one synthesized hop plus the base step.
        if (rec.kind == "depth") CHECK(rec.trajectory->steps.size() == 2);
    }
    CHECK(depth == 2);
    CHECK(width == 1);

    // Every stage reported and every stage passed everything in this world.
    std::set<std::string> stages;
    for (const auto& m : report.stages) {
        stages.insert(m.stage);
        CHECK(m.pass_rate == 1.0);
    }
    CHECK(stages == std::set<std::string>{"atomic_generation", "atomic_verification",
                                          "depth_extension", "width_merge"});

    // Stage files and the human-readable report all landed.
    for (const char* name :
         {"corpus_validated.jsonl", "atomic_tasks.jsonl", "verified_tasks.jsonl",
          "trajectories_atomic.jsonl", "verdict_log.jsonl", "extended_tasks.jsonl",
          "trajectories.jsonl", "dataset.jsonl", "dataset.jsonl.manifest.json",
          "report.json"}) {
        CHECK(fs::exists(dir / name));
    }
    std::string rendered = render_report(report);
    CHECK(rendered.find("atomic_verification") != std::string::npos);
    CHECK(rendered.find("PARTIAL") == std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("dataset bytes are identical across reruns and parallelism levels") {
    auto d1 = test_support::temp_dir("det1");
    auto d2 = test_support::temp_dir("det2");
    auto d4 = test_support::temp_dir("det4");
    Pipeline(test_support::e2e_config(d1, 1)).run();
    Pipeline(test_support::e2e_config(d2, 1)).run();
    Pipeline(test_support::e2e_config(d4, 4)).run();

    std::string bytes1 = read_text(d1 / "dataset.jsonl");
    CHECK_FALSE(bytes1.empty());
    CHECK(bytes1 == read_text(d2 / "dataset.jsonl"));
    CHECK(bytes1 == read_text(d4 / "dataset.jsonl"));
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d4);
}

TEST_CASE("budget exhaustion aborts cleanly into a partial dataset") {
    auto dir = test_support::temp_dir("budget");
    auto config = test_support::e2e_config(dir);
    config.budgets.max_calls = 2;  // dies during atomic generation
    Pipeline pipeline(config);
    RunReport report = pipeline.run();

    CHECK(report.partial);
    CHECK(report.tasks_emitted == 0);
    nlohmann::json manifest =
        nlohmann::json::parse(std::ifstream(dir / "dataset.jsonl.manifest.json"));
    CHECK(manifest.at("partial") == true);
    CHECK(render_report(report).find("PARTIAL: budget abort") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("command line runs the pipeline and maps outcomes to exit codes") {
    auto dir = test_support::temp_dir("cli");
    auto fixtures = test_support::e2e_fixtures();
    std::string config_path = write_text(dir / "config.json", nlohmann::json{
        {"mode", "scripted"},
        {"corpus", fixtures + "/corpus.jsonl"},
        {"fixtures", fixtures},
        {"output", (dir / "out").string()},
        {"hop_target", 2},
        {"width_pairs", 1},
        {"seed", 42}}.dump(2));

    auto run_cli = [&](const std::string& args) {
        std::string cmd = std::string(TASKFORGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };

    CHECK(run_cli("-c " + config_path + " run") == 0);
    CHECK(fs::exists(dir / "out" / "dataset.jsonl"));

    // Stage-by-stage invocation over the same outputs also works.
    CHECK(run_cli("-c " + config_path + " ingest") == 0);
    CHECK(run_cli("-c " + config_path + " report") == 0);

    // Broken config -> fatal.
    std::string bad = write_text(dir / "bad.json", "{nope");
    CHECK(run_cli("-c " + bad + " run") == 1);

    // Budget-truncated run -> partial exit code.
    nlohmann::json partial_config = nlohmann::json::parse(std::ifstream(config_path));
    partial_config["budgets"] = {{"max_calls", 2}};
    partial_config["output"] = (dir / "out_partial").string();
    std::string partial_path = write_text(dir / "partial.json", partial_config.dump(2));
    CHECK(run_cli("-c " + partial_path + " run") == 2);
    fs::remove_all(dir);
}
