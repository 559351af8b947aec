// SPDX-License-Identifier: Apache-2.0
#include "taskforge/trajectory.hpp"

#include "json.hpp"
#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace {

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
    nlohmann::json ja = a, jb = b;
    return ja == jb;
}

void renumber(Trajectory& trajectory) {
    int ordinal = 1;
    for (auto& step : trajectory.steps) step.ordinal = ordinal++;
}

std::vector<std::string> answer_parts(const std::string& answer) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= answer.size()) {
        std::size_t sep = answer.find("; ", start);
        std::string part = sep == std::string::npos ? answer.substr(start)
                                                    : answer.substr(start, sep - start);
        if (!text::trim(part).empty()) parts.push_back(text::trim(part));
        if (sep == std::string::npos) break;
        start = sep + 2;
    }
    return parts;
}

}  // namespace

Trajectory TrajectoryStore::store(Trajectory trajectory) {
    std::lock_guard lock(mu_);
    auto it = by_id_.find(trajectory.task_id);
    if (it != by_id_.end()) {
        if (!same_trajectory(it->second, trajectory)) {
            throw ConflictError("conflicting trajectory already stored for task " +
                                trajectory.task_id);
        }
        return it->second;
    }
    return by_id_.emplace(trajectory.task_id, std::move(trajectory)).first->second;
}

Trajectory TrajectoryStore::capture_atomic(const AgentRun& run, const std::string& task_id) {
    if (text::trim(task_id).empty()) throw InvalidArgumentError("empty task id");
    {
        std::lock_guard lock(mu_);
        if (by_id_.contains(task_id)) {
            throw ConflictError("trajectory already stored for task " + task_id);
        }
    }
    Trajectory trajectory = run.trajectory;
    trajectory.task_id = task_id;
    trajectory.final_answer = run.answer;
    renumber(trajectory);
    return store(std::move(trajectory));
}

Trajectory TrajectoryStore::assemble_depth(const ExtendedTask& task, const Trajectory& base) {
    if (task.kind != TaskKind::depth) {
        throw InvalidArgumentError("assemble_depth requires a depth task");
    }
    if (base.steps.empty()) throw DependencyError("base trajectory is missing or empty");

    Trajectory out;
    out.task_id = task.id;
    for (auto it = task.chain.rbegin(); it != task.chain.rend(); ++it) {
        TrajectoryStep step;
        step.tool = it->superset_index.tool;
        step.tool_input = it->superset_index.value;
        step.observation = it->expected_intermediate_answer;
        step.plan_note = it->relation.description;
        out.steps.push_back(std::move(step));
    }
    out.steps.insert(out.steps.end(), base.steps.begin(), base.steps.end());
    renumber(out);
    out.final_answer = task.golden_answer;
    return store(std::move(out));
}

Trajectory TrajectoryStore::assemble_width(const ExtendedTask& task,
                                           const std::vector<Trajectory>& parts) {
    if (task.kind != TaskKind::width) {
        throw InvalidArgumentError("assemble_width requires a width task");
    }
    if (parts.empty() || parts.size() != task.parents.size()) {
        throw DependencyError("expected one trajectory per parent");
    }
    Trajectory out;
    out.task_id = task.id;
    for (const auto& part : parts) {
        if (part.steps.empty()) throw DependencyError("parent trajectory is empty");
        out.steps.insert(out.steps.end(), part.steps.begin(), part.steps.end());
    }
    renumber(out);
    out.final_answer = task.golden_answer;
    return store(std::move(out));
}

std::optional<Trajectory> TrajectoryStore::get(const std::string& task_id) const {
    std::lock_guard lock(mu_);
    auto it = by_id_.find(task_id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<Trajectory> TrajectoryStore::all() const {
    std::lock_guard lock(mu_);
    std::vector<Trajectory> out;
    out.reserve(by_id_.size());
    for (const auto& [_, trajectory] : by_id_) out.push_back(trajectory);
    return out;
}

std::size_t TrajectoryStore::size() const {
    std::lock_guard lock(mu_);
    return by_id_.size();
}

Verdict replay_trajectory(const Trajectory& trajectory, ToolAdapters& tools, int search_k) {
    if (trajectory.steps.empty()) {
        return Verdict::reject("replay", "trajectory has no steps");
    }
    for (const auto& step : trajectory.steps) {
        std::string observed;
        try {
            observed = observe_tool(tools, step.tool, step.tool_input, search_k);
        } catch (const Error& e) {
            return Verdict::reject("replay", "step " + std::to_string(step.ordinal) +
                                                 " failed: " + e.what());
        }
        if (observed != step.observation) {
            return Verdict::reject("replay", "observation mismatch at step " +
                                                 std::to_string(step.ordinal));
        }
    }
    for (const auto& part : answer_parts(trajectory.final_answer)) {
        bool supported = false;
        for (const auto& step : trajectory.steps) {
            if (text::contains_normalized(step.observation, part)) {
                supported = true;
                break;
            }
        }
        if (!supported) {
            return Verdict::reject("replay", "final answer part not supported: " + part);
        }
    }
    return Verdict::accept("replay");
}

}  // namespace taskforge
