// SPDX-License-Identifier: Apache-2.0
//
// Command-line frontend for the task-generation pipeline. Subcommands mirror
// the pipeline stages so runs can be driven end-to-end or stage by stage,
// with every stage committing its output under the configured output dir.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "taskforge/errors.hpp"
#include "taskforge/pipeline.hpp"
#include "taskforge/prompt_opt.hpp"
#include "taskforge/text.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

struct OptimizeArgs {
    std::string slot = "candidate_extraction";
    int k = 20;
    int num_configs = 10;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string objective = "pass_rate";
};

taskforge::StageOutcome timed_outcome(bool accepted, double hops,
                                      std::chrono::steady_clock::time_point start) {
    taskforge::StageOutcome out;
    out.accepted = accepted;
    out.hops = hops;
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

int run_optimize(taskforge::Pipeline& pipeline, const OptimizeArgs& args) {
    using namespace taskforge;
    const auto& slots = PromptLibrary::optimizable_slots();
    if (std::find(slots.begin(), slots.end(), args.slot) == slots.end()) {
        std::string names;
        for (const auto& s : slots) names += (names.empty() ? "" : ", ") + s;
        throw ConfigError("unknown optimizable slot '" + args.slot + "' (one of: " + names + ")");
    }

    const PipelineConfig& config = pipeline.config();
    std::uint64_t seed = args.seed_set ? args.seed : config.seed;

    PromptSlot slot;
    slot.name = args.slot;
    slot.base_template = pipeline.prompts().slot(args.slot);
    slot.example_pool = slot.base_template.exemplars;
    if (static_cast<int>(slot.example_pool.size()) < args.k) {
        throw ConfigError("slot '" + args.slot + "' has " +
                          std::to_string(slot.example_pool.size()) +
                          " pool exemplars but k=" + std::to_string(args.k) +
                          "; pass a smaller --k or extend the pool via --prompts");
    }

    // Evaluation batch: document ids for the extraction slot, verified task
    // ids for the extension slots.
    std::vector<std::string> batch;
    Objective objective =
        args.objective == "hop_count" ? Objective::hop_count : Objective::pass_rate;
    bool extraction = args.slot == "candidate_extraction";

    std::map<std::string, AtomicTask> tasks_by_id;
    std::map<std::string, CorpusDocument> docs_by_id;
    if (extraction) {
        std::vector<std::string> warnings;
        for (const auto& entry : ingest(config.corpus_path, &warnings)) {
            docs_by_id[entry.id] = CorpusDocument{entry.id, tool_for_modality(entry.modality),
                                                  entry.locator, entry.index_value};
            batch.push_back(entry.id);
        }
    } else {
        std::ifstream in(std::filesystem::path(config.output_dir) / "verified_tasks.jsonl");
        if (!in) throw ConfigError("no verified_tasks.jsonl yet; run the verify stage first");
        std::string line;
        while (std::getline(in, line)) {
            if (taskforge::text::trim(line).empty()) continue;
            auto task = nlohmann::json::parse(line).at("task").get<AtomicTask>();
            batch.push_back(task.id);
            tasks_by_id[task.id] = std::move(task);
        }
    }
    if (batch.empty()) throw ConfigError("empty evaluation batch for slot " + args.slot);

    TaskExtender extender(pipeline.gateway(), pipeline.tools(), pipeline.verifier(),
                          pipeline.prompts());
    AtomicGenerator generator(pipeline.gateway(), pipeline.tools(), pipeline.prompts());

    StageRunner runner = [&](const PromptTemplate& candidate,
                             const std::string& input) -> StageOutcome {
        auto start = std::chrono::steady_clock::now();
        pipeline.prompts().slot(args.slot) = candidate;  // generator/extender hold a reference
        try {
            if (extraction) {
                auto tasks = generator.generate_atomic(docs_by_id.at(input));
                return timed_outcome(!tasks.empty(), static_cast<double>(tasks.size()), start);
            }
            ExtendedTask task = promote(tasks_by_id.at(input));
            int target = std::max(config.hop_target, hop_count(task) + 1);
            ExtensionOutcome outcome =
                extender.extend_depth(task, target, config.budgets.n_k);
            return timed_outcome(outcome.reached_target,
                                 static_cast<double>(hop_count(outcome.task)), start);
        } catch (const BudgetError&) {
            throw;
        } catch (const Error&) {
            return timed_outcome(false, 0.0, start);
        }
    };

    auto [winner, report] =
        optimize(slot, args.k, args.num_configs, batch, objective, seed, runner);
    pipeline.prompts().slot(args.slot) = winner;

    std::filesystem::path prompts_out =
        std::filesystem::path(config.output_dir) / "prompts";
    pipeline.prompts().save_dir(prompts_out.string());

    nlohmann::json evals = nlohmann::json::array();
    for (const auto& e : report.evaluations) {
        evals.push_back({{"config_index", e.config_index},
                         {"score", e.score},
                         {"mean_time_seconds", e.mean_time_seconds}});
    }
    nlohmann::json j{{"slot", report.slot_name},
                     {"seed", report.seed},
                     {"winner_index", report.winner_index},
                     {"evaluations", evals}};
    std::filesystem::path report_path =
        std::filesystem::path(config.output_dir) / ("prompt_opt_" + args.slot + ".json");
    std::ofstream out(report_path);
    out << j.dump(2) << '\n';
    std::cout << "slot " << args.slot << ": winner config " << report.winner_index << " of "
              << report.evaluations.size() << ", templates saved to " << prompts_out.string()
              << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agentic task generation pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "Pipeline config JSON file")
        ->required()
        ->check(CLI::ExistingFile);

    auto* ingest_cmd = app.add_subcommand("ingest", "Validate the corpus manifest");
    auto* atomic_cmd = app.add_subcommand("atomic", "Generate candidate atomic tasks");
    auto* verify_cmd = app.add_subcommand("verify", "Verify atomic tasks (agent vs direct)");
    auto* extend_cmd = app.add_subcommand("extend", "Depth-extend and width-merge tasks");
    auto* traj_cmd = app.add_subcommand("trajectories", "Assemble per-task trajectories");
    auto* emit_cmd = app.add_subcommand("emit", "Dedup and emit the dataset + manifest");
    auto* run_cmd = app.add_subcommand("run", "All stages end to end");
    auto* report_cmd = app.add_subcommand("report", "Print the stage metrics table");

    auto* opt_cmd =
        app.add_subcommand("optimize-prompts", "Exemplar search over one prompt slot");
    OptimizeArgs opt_args;
    opt_cmd->add_option("--slot", opt_args.slot, "Optimizable slot name");
    opt_cmd->add_option("--k", opt_args.k, "Exemplars per candidate config");
    opt_cmd->add_option("--configs", opt_args.num_configs, "Number of candidate configs");
    opt_cmd->add_option("--seed", opt_args.seed, "Sampling seed (defaults to config seed)")
        ->each([&](const std::string&) { opt_args.seed_set = true; });
    opt_cmd->add_option("--objective", opt_args.objective, "pass_rate or hop_count")
        ->check(CLI::IsMember({"pass_rate", "hop_count"}));

    bool emit_partial = false;
    emit_cmd->add_flag("--partial", emit_partial, "Flag the dataset manifest as partial");

    CLI11_PARSE(app, argc, argv);

    try {
        taskforge::PipelineConfig config = taskforge::PipelineConfig::from_file(config_path);
        taskforge::Pipeline pipeline(std::move(config));

        if (ingest_cmd->parsed()) {
            pipeline.cmd_ingest();
        } else if (atomic_cmd->parsed()) {
            pipeline.cmd_atomic();
        } else if (verify_cmd->parsed()) {
            pipeline.cmd_verify();
        } else if (extend_cmd->parsed()) {
            pipeline.cmd_extend();
        } else if (traj_cmd->parsed()) {
            pipeline.cmd_trajectories();
        } else if (emit_cmd->parsed()) {
            pipeline.cmd_emit(emit_partial);
        } else if (opt_cmd->parsed()) {
            return run_optimize(pipeline, opt_args);
        } else if (report_cmd->parsed()) {
            std::cout << taskforge::render_report(pipeline.cmd_report());
        } else if (run_cmd->parsed()) {
            taskforge::RunReport report = pipeline.run();
            std::cout << taskforge::render_report(report);
            return report.partial ? kExitPartial : kExitOk;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFatal;
    }
}
