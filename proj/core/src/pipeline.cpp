// SPDX-License-Identifier: Apache-2.0
#include "taskforge/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "taskforge/errors.hpp"
#include "taskforge/http_llm.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace fs = std::filesystem;

void to_json(nlohmann::json& j, const CorpusEntry& v) {
    j = nlohmann::json{{"id", v.id},
                       {"modality", v.modality},
                       {"locator", v.locator},
                       {"index", v.index_value}};
}

void from_json(const nlohmann::json& j, CorpusEntry& v) {
    v.id = j.at("id").get<std::string>();
    v.modality = j.at("modality").get<std::string>();
    v.locator = j.at("locator").get<std::string>();
    v.index_value = j.value("index", std::string{});
}

namespace {

CorpusEntry entry_from_json(const nlohmann::json& j) {
    return j.get<CorpusEntry>();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

template <typename T>
void write_jsonl(const std::string& path, const std::vector<T>& items) {
    std::string body;
    for (const auto& item : items) {
        nlohmann::json j = item;
        body += j.dump();
        body += '\n';
    }
    write_file_atomic(path, body);
}

template <typename T>
std::vector<T> read_jsonl(const std::string& path) {
    std::vector<T> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        out.push_back(nlohmann::json::parse(line).get<T>());
    }
    return out;
}

// Runs f(i) for i in [0, n) on `workers` threads. The first exception wins
// and is rethrown after all threads join.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
    if (n == 0) return;
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct VerifiedAtomicRow {
    AtomicTask task;
    Verdict verdict;
};

void to_json(nlohmann::json& j, const VerifiedAtomicRow& v) {
    j = nlohmann::json{{"task", v.task}, {"verdict", v.verdict}};
}

void from_json(const nlohmann::json& j, VerifiedAtomicRow& v) {
    v.task = j.at("task").get<AtomicTask>();
    v.verdict = j.at("verdict").get<Verdict>();
}

struct VerdictLogRow {
    std::string id;
    Verdict verdict;
};

void to_json(nlohmann::json& j, const VerdictLogRow& v) {
    j = nlohmann::json{{"id", v.id}, {"verdict", v.verdict}};
}

void from_json(const nlohmann::json& j, VerdictLogRow& v) {
    v.id = j.at("id").get<std::string>();
    v.verdict = j.at("verdict").get<Verdict>();
}

}  // namespace

ToolKind tool_for_modality(const std::string& modality) {
    if (modality == "webpage") return ToolKind::web_browse;
    if (modality == "pdf") return ToolKind::pdf_read;
    if (modality == "image") return ToolKind::image_understand;
    throw InvalidArgumentError("unknown modality: " + modality);
}

std::vector<CorpusEntry> ingest(const std::string& manifest_path,
                                std::vector<std::string>* warnings) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot read corpus manifest: " + manifest_path);

    std::vector<CorpusEntry> out;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (text::trim(line).empty()) continue;
        auto warn = [&](const std::string& what) {
            if (warnings) {
                warnings->push_back("line " + std::to_string(line_number) + ": " + what);
            }
        };
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            warn(std::string("unparseable row: ") + e.what());
            continue;
        }
        try {
            CorpusEntry entry = entry_from_json(j);
            tool_for_modality(entry.modality);  // validates
            if (text::trim(entry.id).empty()) throw InvalidArgumentError("empty id");
            if (text::trim(entry.locator).empty()) throw InvalidArgumentError("empty locator");
            out.push_back(std::move(entry));
        } catch (const std::exception& e) {
            warn(std::string("invalid row skipped: ") + e.what());
        }
    }
    return out;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    PipelineConfig c;
    c.mode = j.value("mode", c.mode);
    if (j.contains("models")) {
        c.models = j.at("models").get<std::map<std::string, std::string>>();
    }
    if (j.contains("budgets")) {
        const auto& b = j.at("budgets");
        c.budgets.max_calls = b.value("max_calls", c.budgets.max_calls);
        c.budgets.max_tokens = b.value("max_tokens", c.budgets.max_tokens);
        c.budgets.agent_steps = b.value("agent_steps", c.budgets.agent_steps);
        c.budgets.n_k = b.value("n_k", c.budgets.n_k);
    }
    c.hop_target = j.value("hop_target", c.hop_target);
    c.width_pairs = j.value("width_pairs", c.width_pairs);
    c.width_pairing = j.value("width_pairing", c.width_pairing);
    c.parallelism = j.value("parallelism", c.parallelism);
    c.search_k = j.value("search_k", c.search_k);
    c.seed = j.value("seed", c.seed);
    c.corpus_path = j.value("corpus", c.corpus_path);
    c.fixtures_dir = j.value("fixtures", c.fixtures_dir);
    c.prompts_dir = j.value("prompts", c.prompts_dir);
    c.output_dir = j.value("output", c.output_dir);
    c.llm_endpoint = j.value("llm_endpoint", c.llm_endpoint);
    c.search_endpoint = j.value("search_endpoint", c.search_endpoint);
    c.apply_env_overrides();

    if (c.budgets.agent_steps < 1 || c.budgets.n_k < 1 || c.parallelism < 1 ||
        c.hop_target < 1) {
        throw ConfigError("budgets, parallelism and hop_target must be positive");
    }
    return c;
}

void PipelineConfig::apply_env_overrides() {
    if (const char* v = std::getenv("TASKFORGE_API_KEY")) api_key = v;
    if (const char* v = std::getenv("TASKFORGE_LLM_ENDPOINT")) llm_endpoint = v;
    if (const char* v = std::getenv("TASKFORGE_SEARCH_ENDPOINT")) search_endpoint = v;
}

nlohmann::json PipelineConfig::snapshot() const {
    return nlohmann::json{{"mode", mode},
                          {"models", models},
                          {"budgets",
                           {{"max_calls", budgets.max_calls},
                            {"max_tokens", budgets.max_tokens},
                            {"agent_steps", budgets.agent_steps},
                            {"n_k", budgets.n_k}}},
                          {"hop_target", hop_target},
                          {"width_pairs", width_pairs},
                          {"width_pairing", width_pairing},
                          {"parallelism", parallelism},
                          {"search_k", search_k},
                          {"seed", seed}};
}

nlohmann::json report_to_json(const RunReport& report) {
    return nlohmann::json{{"stages", report.stages},
                          {"usage",
                           {{"calls", report.usage.calls},
                            {"tokens", report.usage.tokens},
                            {"latency_seconds", report.usage.latency_seconds}}},
                          {"partial", report.partial},
                          {"dataset", report.dataset_path},
                          {"checksum", report.checksum},
                          {"tasks_emitted", report.tasks_emitted}};
}

std::string render_report(const RunReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(22) << "stage" << std::right << std::setw(10) << "attempted"
        << std::setw(10) << "accepted" << std::setw(11) << "pass_rate" << std::setw(9) << "docs"
        << std::setw(10) << "density" << std::setw(10) << "time_s" << std::setw(10) << "tools"
        << std::setw(10) << "var" << '\n';
    out << std::string(102, '-') << '\n';
    out << std::fixed << std::setprecision(3);
    for (const auto& m : report.stages) {
        out << std::left << std::setw(22) << m.stage << std::right << std::setw(10)
            << m.attempted << std::setw(10) << m.accepted << std::setw(11) << m.pass_rate
            << std::setw(9) << m.documents << std::setw(10) << m.task_density << std::setw(10)
            << m.mean_sampling_time << std::setw(10) << m.tool_use_mean << std::setw(10)
            << m.tool_use_variance << '\n';
    }
    out << std::string(102, '-') << '\n';
    out << "model calls: " << report.usage.calls << ", tokens: " << report.usage.tokens
        << ", tasks emitted: " << report.tasks_emitted
        << (report.partial ? " (PARTIAL: budget abort)" : "") << '\n';
    if (!report.dataset_path.empty()) {
        out << "dataset: " << report.dataset_path << " checksum: " << report.checksum << '\n';
    }
    return out.str();
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
    prompts_ = PromptLibrary::defaults();
    if (!config_.prompts_dir.empty() && fs::is_directory(config_.prompts_dir)) {
        prompts_.load_dir(config_.prompts_dir);
    }

    GatewayConfig gw_config;
    gw_config.max_calls = config_.budgets.max_calls;
    gw_config.max_tokens = config_.budgets.max_tokens;

    std::shared_ptr<LlmBackend> backend;
    std::shared_ptr<ToolBackend> tool_backend;
    if (config_.mode == "scripted") {
        auto scripted = std::make_shared<ScriptedLlmBackend>();
        if (!config_.fixtures_dir.empty()) {
            fs::path llm_dir = fs::path(config_.fixtures_dir) / "llm";
            if (fs::is_directory(llm_dir)) scripted->load_dir(llm_dir.string());
        }
        backend = scripted;

        auto scripted_tools = std::make_shared<ScriptedToolBackend>();
        if (!config_.fixtures_dir.empty()) {
            fs::path tools_file = fs::path(config_.fixtures_dir) / "tools.json";
            if (fs::exists(tools_file)) scripted_tools->load_file(tools_file.string());
        }
        tool_backend = scripted_tools;
    } else if (config_.mode == "live") {
        HttpLlmOptions llm_options;
        llm_options.endpoint = config_.llm_endpoint;
        llm_options.api_key = config_.api_key;
        llm_options.models = config_.models;
        backend = std::make_shared<HttpLlmBackend>(llm_options);
    } else {
        throw ConfigError("unknown mode: " + config_.mode);
    }

    gateway_ = std::make_shared<Gateway>(backend, gw_config);
    if (!tool_backend) {
        LiveToolOptions tool_options;
        tool_options.search_endpoint = config_.search_endpoint;
        tool_backend = std::make_shared<LiveToolBackend>(tool_options, gateway_);
    }
    tools_ = std::make_shared<ToolAdapters>(tool_backend);

    VerifierConfig verifier_config;
    verifier_config.max_agent_steps = config_.budgets.agent_steps;
    verifier_config.search_k = config_.search_k;
    verifier_ = std::make_unique<Verifier>(*gateway_, *tools_, verifier_config);

    atomic_ = std::make_unique<AtomicGenerator>(*gateway_, *tools_, prompts_);

    ExtenderConfig extender_config;
    extender_config.n_k = config_.budgets.n_k;
    extender_config.search_k = config_.search_k;
    extender_ = std::make_unique<TaskExtender>(*gateway_, *tools_, *verifier_, prompts_,
                                               extender_config);
}

std::string Pipeline::out_path(const std::string& name) const {
    return (fs::path(config_.output_dir) / name).string();
}

void Pipeline::append_metrics(const std::string& stage,
                              const std::vector<VerdictRecord>& verdicts,
                              const std::vector<TimingRecord>& timings) {
    write_jsonl(out_path("metrics_" + stage + ".verdicts.jsonl"), verdicts);
    write_jsonl(out_path("metrics_" + stage + ".timings.jsonl"), timings);
}

void Pipeline::cmd_ingest() {
    std::vector<std::string> warnings;
    auto entries = ingest(config_.corpus_path, &warnings);
    write_jsonl(out_path("corpus_validated.jsonl"), entries);
    if (!warnings.empty()) {
        std::string body;
        for (const auto& w : warnings) body += w + '\n';
        write_file_atomic(out_path("ingest_warnings.txt"), body);
    }
}

void Pipeline::cmd_atomic() {
    auto entries = read_jsonl<nlohmann::json>(out_path("corpus_validated.jsonl"));
    std::vector<CorpusDocument> documents;
    for (const auto& j : entries) {
        CorpusEntry entry = entry_from_json(j);
        documents.push_back(CorpusDocument{entry.id, tool_for_modality(entry.modality),
                                           entry.locator, entry.index_value});
    }

    std::vector<std::vector<AtomicTask>> results(documents.size());
    std::vector<VerdictRecord> verdicts(documents.size());
    std::vector<TimingRecord> timings(documents.size());
    parallel_for(documents.size(), config_.parallelism, [&](std::size_t i) {
        auto start = std::chrono::steady_clock::now();
        const auto& doc = documents[i];
        bool produced = false;
        try {
            results[i] = atomic_->generate_atomic(doc);
            produced = !results[i].empty();
        } catch (const BudgetError&) {
            throw;
        } catch (const Error&) {
            // document skipped; it still counts in the density denominator
        }
        verdicts[i] = VerdictRecord{"atomic_generation", doc.id, doc.id, produced, 1};
        timings[i] = TimingRecord{"atomic_generation", doc.id, seconds_since(start)};
    });

    std::vector<AtomicTask> tasks;
    for (auto& batch : results) {
        tasks.insert(tasks.end(), batch.begin(), batch.end());
    }
    write_jsonl(out_path("atomic_tasks.jsonl"), tasks);
    append_metrics("atomic_generation", verdicts, timings);
}

void Pipeline::cmd_verify() {
    auto tasks = read_jsonl<AtomicTask>(out_path("atomic_tasks.jsonl"));

    TrajectoryStore store;
    std::vector<VerifiedAtomicRow> rows(tasks.size());
    std::vector<VerdictRecord> verdicts(tasks.size());
    std::vector<TimingRecord> timings(tasks.size());
    parallel_for(tasks.size(), config_.parallelism, [&](std::size_t i) {
        auto start = std::chrono::steady_clock::now();
        const auto& task = tasks[i];
        AtomicVerification result = verifier_->verify_atomic(task);
        rows[i] = VerifiedAtomicRow{task, result.verdict};
        int tool_calls = 0;
        if (result.verdict.accepted && result.run) {
            tool_calls = result.run->steps_used;
            store.capture_atomic(*result.run, task.id);
        }
        verdicts[i] = VerdictRecord{"atomic_verification", task.id, task.source_document,
                                    result.verdict.accepted, tool_calls};
        timings[i] = TimingRecord{"atomic_verification", task.id, seconds_since(start)};
    });

    std::vector<VerifiedAtomicRow> accepted;
    std::vector<VerdictLogRow> verdict_log;
    for (auto& row : rows) {
        verdict_log.push_back(VerdictLogRow{row.task.id, row.verdict});
        if (row.verdict.accepted) accepted.push_back(row);
    }
    write_jsonl(out_path("verified_tasks.jsonl"), accepted);
    write_jsonl(out_path("trajectories_atomic.jsonl"), store.all());
    write_jsonl(out_path("verdict_log.jsonl"), verdict_log);
    append_metrics("atomic_verification", verdicts, timings);
}

void Pipeline::cmd_extend() {
    auto rows = read_jsonl<VerifiedAtomicRow>(out_path("verified_tasks.jsonl"));

    std::vector<ExtendedTask> depth_tasks(rows.size());
    std::vector<VerdictRecord> verdicts;
    std::vector<TimingRecord> timings;
    std::mutex metrics_mu;
    std::vector<ExtensionAttempt> attempt_log;

    parallel_for(rows.size(), config_.parallelism, [&](std::size_t i) {
        auto start = std::chrono::steady_clock::now();
        ExtendedTask task = promote(rows[i].task);
        bool reached = true;
        std::vector<ExtensionAttempt> attempts;
        if (config_.hop_target > 1) {
            ExtensionOutcome outcome =
                extender_->extend_depth(task, config_.hop_target, config_.budgets.n_k);
            reached = outcome.reached_target;
            attempts = std::move(outcome.attempts);
            if (outcome.task.id != task.id) {
                outcome.task.parents = {task.id};
            }
            task = std::move(outcome.task);
        }
        depth_tasks[i] = task;
        std::lock_guard lock(metrics_mu);
        verdicts.push_back(VerdictRecord{"depth_extension", task.id, task.source_document,
                                         reached, 0});
        timings.push_back(TimingRecord{"depth_extension", task.id, seconds_since(start)});
        attempt_log.insert(attempt_log.end(), attempts.begin(), attempts.end());
    });

    // Restore a deterministic metric order regardless of worker interleaving.
    std::sort(verdicts.begin(), verdicts.end(),
              [](const VerdictRecord& a, const VerdictRecord& b) { return a.task_id < b.task_id; });
    std::sort(timings.begin(), timings.end(),
              [](const TimingRecord& a, const TimingRecord& b) { return a.task_id < b.task_id; });

    std::vector<ExtendedTask> all_tasks = depth_tasks;

    // Width merges: random pairing within the batch under the run seed.
    std::vector<VerdictRecord> width_verdicts;
    std::vector<TimingRecord> width_timings;
    if (config_.width_pairs > 0 && depth_tasks.size() >= 2) {
        std::vector<std::size_t> order(depth_tasks.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return depth_tasks[a].id < depth_tasks[b].id;
        });
        std::mt19937_64 rng(config_.seed ^ 0x9e3779b97f4a7c15ull);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
            std::swap(order[i], order[j]);
        }
        int merges = 0;
        for (std::size_t i = 0; i + 1 < order.size() && merges < config_.width_pairs; i += 2) {
            const auto& a = depth_tasks[order[i]];
            const auto& b = depth_tasks[order[i + 1]];
            auto start = std::chrono::steady_clock::now();
            std::string merged_id = a.id + "+" + b.id;
            bool ok = false;
            try {
                ExtendedTask merged = extender_->merge_width(a, b);
                merged_id = merged.id;
                all_tasks.push_back(std::move(merged));
                ok = true;
                ++merges;
            } catch (const BudgetError&) {
                throw;
            } catch (const Error&) {
                ok = false;
            }
            width_verdicts.push_back(VerdictRecord{"width_merge", merged_id, "", ok, 0});
            width_timings.push_back(TimingRecord{"width_merge", merged_id,
                                                 seconds_since(start)});
        }
    }

    write_jsonl(out_path("extended_tasks.jsonl"), all_tasks);
    {
        std::vector<nlohmann::json> attempt_rows;
        for (const auto& a : attempt_log) {
            attempt_rows.push_back(nlohmann::json{{"hop_target", a.hop_target},
                                                  {"attempt_index", a.attempt_index},
                                                  {"outcome", a.outcome},
                                                  {"elapsed_seconds", a.elapsed_seconds}});
        }
        write_jsonl(out_path("extension_attempts.jsonl"), attempt_rows);
    }
    append_metrics("depth_extension", verdicts, timings);
    append_metrics("width_merge", width_verdicts, width_timings);
}

void Pipeline::cmd_trajectories() {
    auto tasks = read_jsonl<ExtendedTask>(out_path("extended_tasks.jsonl"));
    auto atomic_trajectories = read_jsonl<Trajectory>(out_path("trajectories_atomic.jsonl"));

    std::map<std::string, Trajectory> by_id;
    for (auto& t : atomic_trajectories) by_id[t.task_id] = t;

    TrajectoryStore store;
    std::map<std::string, Trajectory> final_by_id;
    // Depth first so width merges can pick up their parents' trajectories.
    for (const auto& task : tasks) {
        if (task.kind != TaskKind::depth) continue;
        std::string root = task.parents.empty() ? task.id : task.parents.front();
        auto it = by_id.find(root);
        if (it == by_id.end()) {
            throw DependencyError("no atomic trajectory for task " + task.id);
        }
        Trajectory result = task.chain.empty() ? it->second
                                               : store.assemble_depth(task, it->second);
        final_by_id[task.id] = result;
    }
    for (const auto& task : tasks) {
        if (task.kind != TaskKind::width) continue;
        std::vector<Trajectory> parts;
        for (const auto& parent : task.parents) {
            auto it = final_by_id.find(parent);
            if (it == final_by_id.end()) {
                throw DependencyError("no parent trajectory for width task " + task.id);
            }
            parts.push_back(it->second);
        }
        final_by_id[task.id] = store.assemble_width(task, parts);
    }

    std::vector<Trajectory> out;
    for (const auto& [_, t] : final_by_id) out.push_back(t);
    write_jsonl(out_path("trajectories.jsonl"), out);
}

void Pipeline::cmd_emit(bool partial) {
    auto tasks = read_jsonl<ExtendedTask>(out_path("extended_tasks.jsonl"));
    auto trajectories = read_jsonl<Trajectory>(out_path("trajectories.jsonl"));
    auto verdict_log = read_jsonl<VerdictLogRow>(out_path("verdict_log.jsonl"));

    std::map<std::string, Trajectory> trajectory_by_id;
    for (auto& t : trajectories) trajectory_by_id[t.task_id] = t;
    std::map<std::string, std::vector<Verdict>> verdicts_by_id;
    for (auto& row : verdict_log) verdicts_by_id[row.id].push_back(row.verdict);
    std::map<std::string, std::vector<std::string>> parents_by_id;
    for (const auto& task : tasks) parents_by_id[task.id] = task.parents;

    std::vector<DatasetRecord> records;
    for (const auto& task : tasks) {
        DatasetRecord rec = DatasetRecord::from_task(task);
        if (auto it = trajectory_by_id.find(task.id); it != trajectory_by_id.end()) {
            rec.trajectory = it->second;
        } else {
            rec.no_trajectory = true;
        }
        // Verdicts accumulate through the whole ancestry: a width merge of two
        // extended tasks still carries the atomic verification verdicts.
        std::set<std::string> seen;
        std::vector<std::string> frontier{task.id};
        while (!frontier.empty()) {
            std::string id = frontier.front();
            frontier.erase(frontier.begin());
            if (!seen.insert(id).second) continue;
            if (auto it = verdicts_by_id.find(id); it != verdicts_by_id.end()) {
                for (const auto& v : it->second) rec.verdicts.push_back(v);
            }
            if (auto it = parents_by_id.find(id); it != parents_by_id.end()) {
                frontier.insert(frontier.end(), it->second.begin(), it->second.end());
            }
        }
        records.push_back(std::move(rec));
    }
    records = dedup(std::move(records));
    emit_dataset(records, out_path("dataset.jsonl"), config_.snapshot(), prompts_.hashes(),
                 partial);
}

RunReport Pipeline::cmd_report() {
    std::vector<VerdictRecord> verdicts;
    std::vector<TimingRecord> timings;
    for (const char* stage :
         {"atomic_generation", "atomic_verification", "depth_extension", "width_merge"}) {
        auto v = read_jsonl<VerdictRecord>(
            out_path(std::string("metrics_") + stage + ".verdicts.jsonl"));
        auto t = read_jsonl<TimingRecord>(
            out_path(std::string("metrics_") + stage + ".timings.jsonl"));
        verdicts.insert(verdicts.end(), v.begin(), v.end());
        timings.insert(timings.end(), t.begin(), t.end());
    }

    RunReport report;
    report.stages = compute_metrics(verdicts, timings);
    report.usage = gateway_->usage();
    report.dataset_path = out_path("dataset.jsonl");

    fs::path manifest_path = report.dataset_path + ".manifest.json";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        auto j = nlohmann::json::parse(in);
        report.checksum = j.value("checksum", std::string{});
        report.partial = j.value("partial", false);
        report.tasks_emitted = j.value("total", 0L);
    }
    write_file_atomic(out_path("report.json"), report_to_json(report).dump(2) + "\n");
    return report;
}

RunReport Pipeline::run() {
    bool partial = false;
    try {
        cmd_ingest();
        cmd_atomic();
        cmd_verify();
        cmd_extend();
        cmd_trajectories();
    } catch (const BudgetError&) {
        partial = true;
        // Commit empty stage files for anything that never ran so emission
        // and reporting stay consistent.
        for (const char* name : {"atomic_tasks.jsonl", "verified_tasks.jsonl",
                                 "trajectories_atomic.jsonl", "verdict_log.jsonl",
                                 "extended_tasks.jsonl", "trajectories.jsonl"}) {
            if (!fs::exists(out_path(name))) write_file_atomic(out_path(name), "");
        }
    }
    cmd_emit(partial);
    return cmd_report();
}

}  // namespace taskforge
