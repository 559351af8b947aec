// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "taskforge/atomic.hpp"
#include "taskforge/extend.hpp"
#include "taskforge/gateway.hpp"
#include "taskforge/metrics.hpp"
#include "taskforge/prompts.hpp"
#include "taskforge/tools.hpp"
#include "taskforge/trajectory.hpp"
#include "taskforge/verify.hpp"

namespace taskforge {

/// One corpus manifest row.
struct CorpusEntry {
    std::string id;
    std::string modality;  // webpage | pdf | image
    std::string locator;
    std::string index_value;  // optional
};

void to_json(nlohmann::json& j, const CorpusEntry& v);
void from_json(const nlohmann::json& j, CorpusEntry& v);

/// Validated entries; invalid rows are skipped with a line-numbered warning.
/// Unreadable manifest -> ConfigError.
std::vector<CorpusEntry> ingest(const std::string& manifest_path,
                                std::vector<std::string>* warnings = nullptr);

ToolKind tool_for_modality(const std::string& modality);

struct Budgets {
    long max_calls = 0;   // 0 = unlimited
    long max_tokens = 0;  // 0 = unlimited
    int agent_steps = 3;
    int n_k = 6;
};

struct PipelineConfig {
    std::string mode = "scripted";  // scripted | live
    std::map<std::string, std::string> models;  // role -> model name
    Budgets budgets;
    int hop_target = 1;
    int width_pairs = 0;  // max width merges per run
    std::string width_pairing = "random";
    int parallelism = 1;
    int search_k = 3;
    std::uint64_t seed = 0;
    std::string corpus_path;
    std::string fixtures_dir;  // scripted mode: llm/ subdir + tools.json
    std::string prompts_dir;   // optional template overrides
    std::string output_dir = "out";
    std::string llm_endpoint;     // live mode
    std::string search_endpoint;  // live mode
    std::string api_key;          // usually injected from the environment

    /// JSON config file; TASKFORGE_API_KEY, TASKFORGE_LLM_ENDPOINT and
    /// TASKFORGE_SEARCH_ENDPOINT environment variables override.
    static PipelineConfig from_file(const std::string& path);
    void apply_env_overrides();

    /// Snapshot for the dataset manifest (credentials excluded).
    nlohmann::json snapshot() const;
};

struct RunReport {
    std::vector<StageMetrics> stages;
    UsageTotals usage;
    bool partial = false;
    std::string dataset_path;
    std::string checksum;
    long tasks_emitted = 0;
};

nlohmann::json report_to_json(const RunReport& report);

/// Aligned text table for terminal output.
std::string render_report(const RunReport& report);

/// Wires the whole pipeline: ingest -> atomic generation -> atomic
/// verification -> depth/width extension -> trajectories -> dedup -> emit ->
/// metrics. Stages are externally sequential and internally parallel; each
/// stage commits its output file via atomic rename.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);

    /// All stages end to end. Budget exhaustion aborts cleanly: whatever is
    /// committed is emitted and the manifest is flagged partial.
    RunReport run();

    // Individual stage commands, file-backed under output_dir.
    void cmd_ingest();
    void cmd_atomic();
    void cmd_verify();
    void cmd_extend();
    void cmd_trajectories();
    void cmd_emit(bool partial = false);
    RunReport cmd_report();

    Gateway& gateway() { return *gateway_; }
    ToolAdapters& tools() { return *tools_; }
    Verifier& verifier() { return *verifier_; }
    PromptLibrary& prompts() { return prompts_; }
    const PipelineConfig& config() const { return config_; }

private:
    std::string out_path(const std::string& name) const;
    void append_metrics(const std::string& stage, const std::vector<VerdictRecord>& verdicts,
                        const std::vector<TimingRecord>& timings);

    PipelineConfig config_;
    PromptLibrary prompts_;
    std::shared_ptr<Gateway> gateway_;
    std::shared_ptr<ToolAdapters> tools_;
    std::unique_ptr<Verifier> verifier_;
    std::unique_ptr<AtomicGenerator> atomic_;
    std::unique_ptr<TaskExtender> extender_;
};

}  // namespace taskforge
