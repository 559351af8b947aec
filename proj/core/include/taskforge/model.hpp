// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace taskforge {

/// Target tools a task may require.
enum class ToolKind { search, web_browse, pdf_read, image_understand };

std::string to_string(ToolKind kind);
ToolKind tool_kind_from_string(const std::string& name);

/// Minimal identifier that lets a tool retrieve its context
/// (webpage title, PDF name, image path).
struct InputIndex {
    std::string value;
    ToolKind tool = ToolKind::web_browse;

    bool operator==(const InputIndex&) const = default;
};

/// Natural-language relationship between a context (or index) and the
/// expected answer.
struct Relation {
    std::string description;

    bool operator==(const Relation&) const = default;
};

/// Textual content a tool returned for an input index.
struct ToolContext {
    std::string content;
    InputIndex source_index;
    std::int64_t fetched_at = 0;  // unix seconds; 0 in scripted mode
};

/// A question solvable by a single target tool invocation, paired with a
/// golden answer grounded in the source context.
struct AtomicTask {
    std::string id;
    std::string question;
    std::string golden_answer;
    InputIndex index;
    Relation relation;
    std::string source_document;
    bool index_referenced = false;  // composer saw the index named or paraphrased
};

/// One depth-extension step: the superset index, its relation to the inner
/// index, and the intermediate question whose answer is the inner index.
struct HopLink {
    int level = 1;
    InputIndex superset_index;
    Relation relation;
    std::string intermediate_question;
    std::string expected_intermediate_answer;
};

enum class TaskKind { depth, width };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

/// A multi-hop task: the final question, its golden answer, the ordered hop
/// chain and the relation history accumulated during extension.
struct ExtendedTask {
    std::string id;
    std::string question;
    std::string golden_answer;
    int hop_count = 1;
    std::vector<HopLink> chain;
    std::vector<Relation> relation_history;
    TaskKind kind = TaskKind::depth;
    std::vector<std::string> parents;
    std::string source_document;
    std::vector<ToolKind> tool_kinds;
    InputIndex base_index;  // root atomic index; meaningful for depth tasks
};

/// The index the next depth hop must wrap: the root atomic index while the
/// chain is empty, otherwise the outermost superset so far.
const InputIndex& current_index(const ExtendedTask& task);

struct TrajectoryStep {
    int ordinal = 1;
    ToolKind tool = ToolKind::search;
    std::string tool_input;
    std::string observation;
    std::string plan_note;
};

/// Ordered tool-invocation record proving a task's answer.
struct Trajectory {
    std::string task_id;
    std::vector<TrajectoryStep> steps;
    std::string final_answer;
};

/// Accept/reject outcome of a verification check.
struct Verdict {
    bool accepted = false;
    std::string check_name;
    std::optional<int> agent_score;
    std::optional<int> llm_score;
    std::string reason;

    static Verdict accept(std::string check, std::string reason = "") {
        return Verdict{true, std::move(check), std::nullopt, std::nullopt, std::move(reason)};
    }
    static Verdict reject(std::string check, std::string reason) {
        return Verdict{false, std::move(check), std::nullopt, std::nullopt, std::move(reason)};
    }
};

/// Content-hash id over (source document, question); deterministic and
/// stable across runs.
std::string derive_task_id(const std::string& source_document, const std::string& question);

/// Depth: 1 + chain length. Width: sum of parent hop counts, fixed at merge
/// time and carried on the task.
int hop_count(const ExtendedTask& task);

/// Promotes a verified atomic task to a 1-hop depth task (empty chain,
/// relation history seeded with the atomic relation).
ExtendedTask promote(const AtomicTask& task);

// Canonical JSON encoding. Keys are emitted in nlohmann's sorted order so
// serialization is byte-stable.
void to_json(nlohmann::json& j, const InputIndex& v);
void from_json(const nlohmann::json& j, InputIndex& v);
void to_json(nlohmann::json& j, const Relation& v);
void from_json(const nlohmann::json& j, Relation& v);
void to_json(nlohmann::json& j, const ToolContext& v);
void from_json(const nlohmann::json& j, ToolContext& v);
void to_json(nlohmann::json& j, const AtomicTask& v);
void from_json(const nlohmann::json& j, AtomicTask& v);
void to_json(nlohmann::json& j, const HopLink& v);
void from_json(const nlohmann::json& j, HopLink& v);
void to_json(nlohmann::json& j, const ExtendedTask& v);
void from_json(const nlohmann::json& j, ExtendedTask& v);
void to_json(nlohmann::json& j, const TrajectoryStep& v);
void from_json(const nlohmann::json& j, TrajectoryStep& v);
void to_json(nlohmann::json& j, const Trajectory& v);
void from_json(const nlohmann::json& j, Trajectory& v);
void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

}  // namespace taskforge
