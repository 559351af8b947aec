// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "taskforge/model.hpp"

namespace taskforge {

/// One verification outcome in the metrics stream.
struct VerdictRecord {
    std::string stage;
    std::string task_id;
    std::string document;  // empty when not document-scoped
    bool accepted = false;
    int tool_calls = 0;  // tool invocations spent on this task
};

struct TimingRecord {
    std::string stage;
    std::string task_id;
    double seconds = 0.0;
};

struct StageMetrics {
    std::string stage;
    long attempted = 0;
    long accepted = 0;
    double pass_rate = 0.0;       // accepted / attempted, 0 when attempted = 0
    long documents = 0;           // distinct documents seen
    double task_density = 0.0;    // accepted / documents
    double mean_sampling_time = 0.0;
    double tool_use_mean = 0.0;       // over accepted tasks
    double tool_use_variance = 0.0;   // population variance over accepted tasks
};

/// Exact stage ratios; timings lacking a matching (stage, task_id) verdict
/// raise AccountingError listing the orphan ids.
std::vector<StageMetrics> compute_metrics(const std::vector<VerdictRecord>& verdicts,
                                          const std::vector<TimingRecord>& timings);

void to_json(nlohmann::json& j, const VerdictRecord& v);
void from_json(const nlohmann::json& j, VerdictRecord& v);
void to_json(nlohmann::json& j, const TimingRecord& v);
void from_json(const nlohmann::json& j, TimingRecord& v);
void to_json(nlohmann::json& j, const StageMetrics& v);
void from_json(const nlohmann::json& j, StageMetrics& v);

/// One emitted dataset row, mirroring the on-disk line schema exactly.
struct DatasetRecord {
    int schema_version = 1;
    std::string id;
    std::string question;
    std::string answer;
    std::string kind;  // "depth" | "width"
    int hop_count = 1;
    std::vector<std::string> tool_kinds;
    std::string source_document;
    std::vector<std::string> relation_history;
    std::vector<std::string> parents;
    std::optional<Trajectory> trajectory;
    bool no_trajectory = false;  // explicit flag when trajectory is absent
    std::vector<Verdict> verdicts;

    static DatasetRecord from_task(const ExtendedTask& task);
};

void to_json(nlohmann::json& j, const DatasetRecord& v);
void from_json(const nlohmann::json& j, DatasetRecord& v);

struct DatasetManifest {
    int schema_version = 1;
    long total = 0;
    std::map<std::string, long> by_kind;
    std::map<int, long> by_hop;
    std::string checksum;  // fnv1a64 of the emitted file bytes
    bool partial = false;
    nlohmann::json config_snapshot;
    std::map<std::string, std::string> prompt_hashes;
};

nlohmann::json manifest_to_json(const DatasetManifest& manifest);

/// Writes one UTF-8 JSON record per line, sorted by id, via temp file plus
/// atomic rename. Records missing both a trajectory and the no-trajectory
/// flag raise EmitError. The manifest lands next to the dataset as
/// `<path>.manifest.json`.
DatasetManifest emit_dataset(std::vector<DatasetRecord> records, const std::string& path,
                             const nlohmann::json& config_snapshot,
                             const std::map<std::string, std::string>& prompt_hashes,
                             bool partial = false);

std::vector<DatasetRecord> load_dataset(const std::string& path);

/// Removes exact duplicates by (normalized question, answer); keeps the
/// first occurrence in id order.
std::vector<DatasetRecord> dedup(std::vector<DatasetRecord> records);

}  // namespace taskforge
