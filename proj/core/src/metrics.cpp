// SPDX-License-Identifier: Apache-2.0
#include "taskforge/metrics.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace fs = std::filesystem;

std::vector<StageMetrics> compute_metrics(const std::vector<VerdictRecord>& verdicts,
                                          const std::vector<TimingRecord>& timings) {
    std::set<std::string> verdict_keys;
    for (const auto& v : verdicts) verdict_keys.insert(v.stage + '\x1f' + v.task_id);

    std::vector<std::string> orphans;
    for (const auto& t : timings) {
        if (!verdict_keys.contains(t.stage + '\x1f' + t.task_id)) {
            orphans.push_back(t.stage + "/" + t.task_id);
        }
    }
    if (!orphans.empty()) {
        std::string list;
        for (const auto& o : orphans) list += (list.empty() ? "" : ", ") + o;
        throw AccountingError("timings without matching verdicts: " + list);
    }

    struct Accumulator {
        long attempted = 0;
        long accepted = 0;
        std::set<std::string> documents;
        std::vector<int> accepted_tool_calls;
        double time_total = 0.0;
        long time_count = 0;
    };
    std::map<std::string, Accumulator> by_stage;
    for (const auto& v : verdicts) {
        auto& acc = by_stage[v.stage];
        ++acc.attempted;
        if (v.accepted) {
            ++acc.accepted;
            acc.accepted_tool_calls.push_back(v.tool_calls);
        }
        if (!v.document.empty()) acc.documents.insert(v.document);
    }
    for (const auto& t : timings) {
        auto& acc = by_stage[t.stage];
        acc.time_total += t.seconds;
        ++acc.time_count;
    }

    std::vector<StageMetrics> out;
    for (const auto& [stage, acc] : by_stage) {
        StageMetrics m;
        m.stage = stage;
        m.attempted = acc.attempted;
        m.accepted = acc.accepted;
        m.pass_rate = acc.attempted == 0
                          ? 0.0
                          : static_cast<double>(acc.accepted) / static_cast<double>(acc.attempted);
        m.documents = static_cast<long>(acc.documents.size());
        m.task_density = m.documents == 0
                             ? 0.0
                             : static_cast<double>(acc.accepted) / static_cast<double>(m.documents);
        m.mean_sampling_time =
            acc.time_count == 0 ? 0.0 : acc.time_total / static_cast<double>(acc.time_count);

        const auto& calls = acc.accepted_tool_calls;
        if (!calls.empty()) {
            double sum = 0.0;
            for (int c : calls) sum += c;
            m.tool_use_mean = sum / static_cast<double>(calls.size());
            double ss = 0.0;
            for (int c : calls) {
                double d = static_cast<double>(c) - m.tool_use_mean;
                ss += d * d;
            }
            m.tool_use_variance = ss / static_cast<double>(calls.size());
        }
        out.push_back(std::move(m));
    }
    return out;
}

void to_json(nlohmann::json& j, const VerdictRecord& v) {
    j = nlohmann::json{{"stage", v.stage},
                       {"task_id", v.task_id},
                       {"document", v.document},
                       {"accepted", v.accepted},
                       {"tool_calls", v.tool_calls}};
}

void from_json(const nlohmann::json& j, VerdictRecord& v) {
    v.stage = j.at("stage").get<std::string>();
    v.task_id = j.at("task_id").get<std::string>();
    v.document = j.value("document", std::string{});
    v.accepted = j.at("accepted").get<bool>();
    v.tool_calls = j.value("tool_calls", 0);
}

void to_json(nlohmann::json& j, const TimingRecord& v) {
    j = nlohmann::json{{"stage", v.stage}, {"task_id", v.task_id}, {"seconds", v.seconds}};
}

void from_json(const nlohmann::json& j, TimingRecord& v) {
    v.stage = j.at("stage").get<std::string>();
    v.task_id = j.at("task_id").get<std::string>();
    v.seconds = j.at("seconds").get<double>();
}

void to_json(nlohmann::json& j, const StageMetrics& v) {
    j = nlohmann::json{{"stage", v.stage},
                       {"attempted", v.attempted},
                       {"accepted", v.accepted},
                       {"pass_rate", v.pass_rate},
                       {"documents", v.documents},
                       {"task_density", v.task_density},
                       {"mean_sampling_time", v.mean_sampling_time},
                       {"tool_use_mean", v.tool_use_mean},
                       {"tool_use_variance", v.tool_use_variance}};
}

void from_json(const nlohmann::json& j, StageMetrics& v) {
    v.stage = j.at("stage").get<std::string>();
    v.attempted = j.at("attempted").get<long>();
    v.accepted = j.at("accepted").get<long>();
    v.pass_rate = j.at("pass_rate").get<double>();
    v.documents = j.at("documents").get<long>();
    v.task_density = j.at("task_density").get<double>();
    v.mean_sampling_time = j.at("mean_sampling_time").get<double>();
    v.tool_use_mean = j.at("tool_use_mean").get<double>();
    v.tool_use_variance = j.at("tool_use_variance").get<double>();
}

DatasetRecord DatasetRecord::from_task(const ExtendedTask& task) {
    DatasetRecord rec;
    rec.id = task.id;
    rec.question = task.question;
    rec.answer = task.golden_answer;
    rec.kind = to_string(task.kind);
    rec.hop_count = taskforge::hop_count(task);
    for (ToolKind t : task.tool_kinds) rec.tool_kinds.push_back(to_string(t));
    rec.source_document = task.source_document;
    for (const auto& r : task.relation_history) rec.relation_history.push_back(r.description);
    rec.parents = task.parents;
    return rec;
}

void to_json(nlohmann::json& j, const DatasetRecord& v) {
    j = nlohmann::json{{"schema_version", v.schema_version},
                       {"id", v.id},
                       {"question", v.question},
                       {"answer", v.answer},
                       {"kind", v.kind},
                       {"hop_count", v.hop_count},
                       {"tool_kinds", v.tool_kinds},
                       {"source_document", v.source_document},
                       {"relation_history", v.relation_history},
                       {"parents", v.parents},
                       {"verdicts", v.verdicts}};
    if (v.trajectory) {
        j["trajectory"] = *v.trajectory;
    } else {
        j["trajectory"] = nullptr;
        j["no_trajectory"] = v.no_trajectory;
    }
}

void from_json(const nlohmann::json& j, DatasetRecord& v) {
    v.schema_version = j.at("schema_version").get<int>();
    v.id = j.at("id").get<std::string>();
    v.question = j.at("question").get<std::string>();
    v.answer = j.at("answer").get<std::string>();
    v.kind = j.at("kind").get<std::string>();
    v.hop_count = j.at("hop_count").get<int>();
    v.tool_kinds = j.at("tool_kinds").get<std::vector<std::string>>();
    v.source_document = j.at("source_document").get<std::string>();
    v.relation_history = j.at("relation_history").get<std::vector<std::string>>();
    v.parents = j.at("parents").get<std::vector<std::string>>();
    v.verdicts = j.at("verdicts").get<std::vector<Verdict>>();
    v.trajectory.reset();
    v.no_trajectory = j.value("no_trajectory", false);
    if (j.contains("trajectory") && !j.at("trajectory").is_null()) {
        v.trajectory = j.at("trajectory").get<Trajectory>();
    }
}

nlohmann::json manifest_to_json(const DatasetManifest& manifest) {
    nlohmann::json by_hop = nlohmann::json::object();
    for (const auto& [hop, count] : manifest.by_hop) by_hop[std::to_string(hop)] = count;
    return nlohmann::json{{"schema_version", manifest.schema_version},
                          {"total", manifest.total},
                          {"by_kind", manifest.by_kind},
                          {"by_hop", by_hop},
                          {"checksum", manifest.checksum},
                          {"partial", manifest.partial},
                          {"config", manifest.config_snapshot},
                          {"prompt_hashes", manifest.prompt_hashes}};
}

DatasetManifest emit_dataset(std::vector<DatasetRecord> records, const std::string& path,
                             const nlohmann::json& config_snapshot,
                             const std::map<std::string, std::string>& prompt_hashes,
                             bool partial) {
    for (const auto& rec : records) {
        if (!rec.trajectory && !rec.no_trajectory) {
            throw EmitError("record " + rec.id +
                            " has neither a trajectory nor the no-trajectory flag");
        }
    }
    std::sort(records.begin(), records.end(),
              [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });

    std::string body;
    DatasetManifest manifest;
    manifest.partial = partial;
    manifest.config_snapshot = config_snapshot;
    manifest.prompt_hashes = prompt_hashes;
    for (const auto& rec : records) {
        nlohmann::json j = rec;
        body += j.dump();
        body += '\n';
        ++manifest.total;
        ++manifest.by_kind[rec.kind];
        ++manifest.by_hop[rec.hop_count];
    }
    manifest.checksum = text::fnv1a64_hex(body);

    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw EmitError("cannot write dataset file: " + tmp.string());
        out << body;
    }
    fs::rename(tmp, target);

    fs::path manifest_tmp = target;
    manifest_tmp += ".manifest.json.tmp";
    {
        std::ofstream out(manifest_tmp, std::ios::binary | std::ios::trunc);
        out << manifest_to_json(manifest).dump(2) << '\n';
    }
    fs::rename(manifest_tmp, target.string() + ".manifest.json");
    return manifest;
}

std::vector<DatasetRecord> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("dataset file not found: " + path);
    std::vector<DatasetRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        out.push_back(nlohmann::json::parse(line).get<DatasetRecord>());
    }
    return out;
}

std::vector<DatasetRecord> dedup(std::vector<DatasetRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });
    std::set<std::string> seen;
    std::vector<DatasetRecord> out;
    for (auto& rec : records) {
        std::string key = text::normalize(rec.question) + '\x1f' + rec.answer;
        if (!seen.insert(key).second) continue;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace taskforge
