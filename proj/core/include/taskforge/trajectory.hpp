// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taskforge/model.hpp"
#include "taskforge/tools.hpp"
#include "taskforge/verify.hpp"

namespace taskforge {

/// Persists trajectories keyed by task id. Appends for distinct ids may run
/// concurrently; re-storing identical content is idempotent, conflicting
/// content for an existing id is an error.
class TrajectoryStore {
public:
    /// Stores an accepted agent run's steps verbatim.
    Trajectory capture_atomic(const AgentRun& run, const std::string& task_id);

    /// Prepends one synthesized step per hop link (outermost hop first):
    /// tool and input from the hop's superset index, observation = the
    /// expected intermediate answer, plan note = the hop relation. Base
    /// steps follow; ordinals renumber contiguously.
    Trajectory assemble_depth(const ExtendedTask& task, const Trajectory& base);

    /// Concatenates parent trajectories in parent order.
    Trajectory assemble_width(const ExtendedTask& task, const std::vector<Trajectory>& parts);

    std::optional<Trajectory> get(const std::string& task_id) const;
    std::vector<Trajectory> all() const;  // sorted by task id
    std::size_t size() const;

private:
    Trajectory store(Trajectory trajectory);

    mutable std::mutex mu_;
    std::map<std::string, Trajectory> by_id_;
};

/// Replays the (tool, input) sequence against the given adapters and checks
/// observation equality plus that every composite answer part is supported
/// by some observation.
Verdict replay_trajectory(const Trajectory& trajectory, ToolAdapters& tools, int search_k = 3);

}  // namespace taskforge
