// SPDX-License-Identifier: Apache-2.0
#include "taskforge/model.hpp"

#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

std::string to_string(ToolKind kind) {
    switch (kind) {
        case ToolKind::search: return "search";
        case ToolKind::web_browse: return "web_browse";
        case ToolKind::pdf_read: return "pdf_read";
        case ToolKind::image_understand: return "image_understand";
    }
    throw InvalidArgumentError("unknown ToolKind");
}

ToolKind tool_kind_from_string(const std::string& name) {
    if (name == "search") return ToolKind::search;
    if (name == "web_browse") return ToolKind::web_browse;
    if (name == "pdf_read") return ToolKind::pdf_read;
    if (name == "image_understand") return ToolKind::image_understand;
    throw InvalidArgumentError("unknown tool kind: " + name);
}

std::string to_string(TaskKind kind) {
    return kind == TaskKind::depth ? "depth" : "width";
}

TaskKind task_kind_from_string(const std::string& name) {
    if (name == "depth") return TaskKind::depth;
    if (name == "width") return TaskKind::width;
    throw InvalidArgumentError("unknown task kind: " + name);
}

std::string derive_task_id(const std::string& source_document, const std::string& question) {
    if (text::trim(source_document).empty() || text::trim(question).empty()) {
        throw InvalidArgumentError("derive_task_id: empty input");
    }
    // \x1f keeps ("a","bc") and ("ab","c") from colliding.
    return text::fnv1a64_hex(source_document + '\x1f' + question);
}

int hop_count(const ExtendedTask& task) {
    if (task.kind == TaskKind::depth) {
        return 1 + static_cast<int>(task.chain.size());
    }
    return task.hop_count;
}

ExtendedTask promote(const AtomicTask& task) {
    ExtendedTask out;
    out.id = task.id;
    out.question = task.question;
    out.golden_answer = task.golden_answer;
    out.hop_count = 1;
    out.relation_history = {task.relation};
    out.kind = TaskKind::depth;
    out.source_document = task.source_document;
    out.tool_kinds = {task.index.tool};
    out.base_index = task.index;
    return out;
}

const InputIndex& current_index(const ExtendedTask& task) {
    if (task.kind != TaskKind::depth) {
        throw InvalidArgumentError("width tasks have no single current index");
    }
    return task.chain.empty() ? task.base_index : task.chain.back().superset_index;
}

void to_json(nlohmann::json& j, const InputIndex& v) {
    j = nlohmann::json{{"value", v.value}, {"tool", to_string(v.tool)}};
}

void from_json(const nlohmann::json& j, InputIndex& v) {
    v.value = j.at("value").get<std::string>();
    v.tool = tool_kind_from_string(j.at("tool").get<std::string>());
}

void to_json(nlohmann::json& j, const Relation& v) {
    j = nlohmann::json{{"description", v.description}};
}

void from_json(const nlohmann::json& j, Relation& v) {
    v.description = j.at("description").get<std::string>();
}

void to_json(nlohmann::json& j, const ToolContext& v) {
    j = nlohmann::json{
        {"content", v.content}, {"source_index", v.source_index}, {"fetched_at", v.fetched_at}};
}

void from_json(const nlohmann::json& j, ToolContext& v) {
    v.content = j.at("content").get<std::string>();
    v.source_index = j.at("source_index").get<InputIndex>();
    v.fetched_at = j.at("fetched_at").get<std::int64_t>();
}

void to_json(nlohmann::json& j, const AtomicTask& v) {
    j = nlohmann::json{{"id", v.id},
                       {"question", v.question},
                       {"golden_answer", v.golden_answer},
                       {"index", v.index},
                       {"relation", v.relation},
                       {"source_document", v.source_document},
                       {"index_referenced", v.index_referenced}};
}

void from_json(const nlohmann::json& j, AtomicTask& v) {
    v.id = j.at("id").get<std::string>();
    v.question = j.at("question").get<std::string>();
    v.golden_answer = j.at("golden_answer").get<std::string>();
    v.index = j.at("index").get<InputIndex>();
    v.relation = j.at("relation").get<Relation>();
    v.source_document = j.at("source_document").get<std::string>();
    v.index_referenced = j.value("index_referenced", false);
}

void to_json(nlohmann::json& j, const HopLink& v) {
    j = nlohmann::json{{"level", v.level},
                       {"superset_index", v.superset_index},
                       {"relation", v.relation},
                       {"intermediate_question", v.intermediate_question},
                       {"expected_intermediate_answer", v.expected_intermediate_answer}};
}

void from_json(const nlohmann::json& j, HopLink& v) {
    v.level = j.at("level").get<int>();
    v.superset_index = j.at("superset_index").get<InputIndex>();
    v.relation = j.at("relation").get<Relation>();
    v.intermediate_question = j.at("intermediate_question").get<std::string>();
    v.expected_intermediate_answer = j.at("expected_intermediate_answer").get<std::string>();
}

void to_json(nlohmann::json& j, const ExtendedTask& v) {
    std::vector<std::string> tools;
    tools.reserve(v.tool_kinds.size());
    for (ToolKind t : v.tool_kinds) tools.push_back(to_string(t));
    j = nlohmann::json{{"id", v.id},
                       {"question", v.question},
                       {"golden_answer", v.golden_answer},
                       {"hop_count", v.hop_count},
                       {"chain", v.chain},
                       {"relation_history", v.relation_history},
                       {"kind", to_string(v.kind)},
                       {"parents", v.parents},
                       {"source_document", v.source_document},
                       {"tool_kinds", tools},
                       {"base_index", v.base_index}};
}

void from_json(const nlohmann::json& j, ExtendedTask& v) {
    v.id = j.at("id").get<std::string>();
    v.question = j.at("question").get<std::string>();
    v.golden_answer = j.at("golden_answer").get<std::string>();
    v.hop_count = j.at("hop_count").get<int>();
    v.chain = j.at("chain").get<std::vector<HopLink>>();
    v.relation_history = j.at("relation_history").get<std::vector<Relation>>();
    v.kind = task_kind_from_string(j.at("kind").get<std::string>());
    v.parents = j.at("parents").get<std::vector<std::string>>();
    v.source_document = j.value("source_document", std::string{});
    v.tool_kinds.clear();
    for (const auto& t : j.at("tool_kinds")) {
        v.tool_kinds.push_back(tool_kind_from_string(t.get<std::string>()));
    }
    if (j.contains("base_index")) v.base_index = j.at("base_index").get<InputIndex>();
}

void to_json(nlohmann::json& j, const TrajectoryStep& v) {
    j = nlohmann::json{{"ordinal", v.ordinal},
                       {"tool", to_string(v.tool)},
                       {"tool_input", v.tool_input},
                       {"observation", v.observation},
                       {"plan_note", v.plan_note}};
}

void from_json(const nlohmann::json& j, TrajectoryStep& v) {
    v.ordinal = j.at("ordinal").get<int>();
    v.tool = tool_kind_from_string(j.at("tool").get<std::string>());
    v.tool_input = j.at("tool_input").get<std::string>();
    v.observation = j.at("observation").get<std::string>();
    v.plan_note = j.at("plan_note").get<std::string>();
}

void to_json(nlohmann::json& j, const Trajectory& v) {
    j = nlohmann::json{
        {"task_id", v.task_id}, {"steps", v.steps}, {"final_answer", v.final_answer}};
}

void from_json(const nlohmann::json& j, Trajectory& v) {
    v.task_id = j.at("task_id").get<std::string>();
    v.steps = j.at("steps").get<std::vector<TrajectoryStep>>();
    v.final_answer = j.at("final_answer").get<std::string>();
}

void to_json(nlohmann::json& j, const Verdict& v) {
    j = nlohmann::json{{"accepted", v.accepted}, {"check_name", v.check_name}, {"reason", v.reason}};
    if (v.agent_score) j["agent_score"] = *v.agent_score;
    if (v.llm_score) j["llm_score"] = *v.llm_score;
}

void from_json(const nlohmann::json& j, Verdict& v) {
    v.accepted = j.at("accepted").get<bool>();
    v.check_name = j.at("check_name").get<std::string>();
    v.reason = j.at("reason").get<std::string>();
    v.agent_score.reset();
    v.llm_score.reset();
    if (j.contains("agent_score")) v.agent_score = j.at("agent_score").get<int>();
    if (j.contains("llm_score")) v.llm_score = j.at("llm_score").get<int>();
}

}  // namespace taskforge
