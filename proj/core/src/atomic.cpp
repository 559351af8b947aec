// SPDX-License-Identifier: Apache-2.0
#include "taskforge/atomic.hpp"

#include <filesystem>
#include <set>

#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

InputIndex CorpusDocument::index() const {
    std::string value = index_value;
    if (text::trim(value).empty()) {
        value = std::filesystem::path(locator).filename().string();
        if (text::trim(value).empty()) value = locator;
    }
    return InputIndex{value, tool};
}

std::vector<std::string> chunk_text(const std::string& content, int chunk_size, int overlap) {
    if (chunk_size <= 0) throw InvalidArgumentError("chunk_size must be positive");
    if (overlap < 0 || overlap >= chunk_size) {
        throw InvalidArgumentError("overlap must be in [0, chunk_size)");
    }
    std::vector<std::string> chunks;
    const std::size_t size = static_cast<std::size_t>(chunk_size);
    const std::size_t stride = size - static_cast<std::size_t>(overlap);
    for (std::size_t pos = 0; pos < content.size(); pos += stride) {
        chunks.push_back(content.substr(pos, size));
        if (pos + size >= content.size()) break;
    }
    if (chunks.empty()) chunks.push_back(content);
    return chunks;
}

AtomicGenerator::AtomicGenerator(Gateway& gateway, ToolAdapters& tools,
                                 const PromptLibrary& prompts, AtomicGeneratorConfig config)
    : gateway_(gateway), tools_(tools), prompts_(prompts), config_(config) {}

std::vector<CandidateConclusion> AtomicGenerator::extract_candidates(
    const ToolContext& context) {
    if (text::trim(context.content).empty()) {
        throw InvalidArgumentError("context content is empty");
    }

    std::vector<CandidateConclusion> out;
    std::set<std::string> seen;
    for (const auto& chunk :
         chunk_text(context.content, config_.chunk_size, config_.chunk_overlap)) {
        std::string prompt = render(prompts_.candidate_extraction, {{"chunk", chunk}});
        auto reply = gateway_.complete(ModelRole::sampler, prompt);
        for (const auto& rec : text::parse_records(reply.text, "candidate")) {
            auto answer_it = rec.find("candidate");
            if (answer_it == rec.end()) continue;
            std::string answer = text::trim(answer_it->second);
            if (answer.empty() || text::normalize(answer) == "none") continue;

            CandidateConclusion candidate;
            candidate.answer = answer;
            if (auto it = rec.find("evidence"); it != rec.end()) {
                candidate.evidence_span = text::trim(it->second);
            }
            if (auto it = rec.find("relation"); it != rec.end()) {
                candidate.relation.description = text::trim(it->second);
            }
            if (candidate.relation.description.empty()) continue;
            // Grounding: the answer and evidence must come from the context.
            if (!text::contains_normalized(context.content, candidate.answer)) continue;
            if (!candidate.evidence_span.empty() &&
                !text::contains_normalized(context.content, candidate.evidence_span)) {
                continue;
            }
            std::string key =
                text::normalize(candidate.answer) + '\x1f' +
                text::normalize(candidate.relation.description);
            if (!seen.insert(key).second) continue;
            out.push_back(std::move(candidate));
            if (static_cast<int>(out.size()) >= config_.candidate_cap) return out;
        }
    }
    return out;
}

std::string AtomicGenerator::compose_question(const InputIndex& index, const Relation& relation,
                                              const std::string& answer) {
    if (text::contains_answer(relation.description, answer)) {
        throw InvalidArgumentError("relation contains the target answer");
    }

    std::string prompt = render(prompts_.question_composition,
                                {{"index", index.value}, {"relation", relation.description}});
    for (int attempt = 0; attempt <= config_.compose_retries; ++attempt) {
        auto reply = gateway_.complete(ModelRole::sampler, prompt);
        auto fields = text::parse_record(reply.text);
        std::string question = fields.contains("question") ? fields.at("question")
                                                           : text::trim(reply.text);
        if (question.empty()) continue;
        if (!text::contains_answer(question, answer)) return question;
        prompt += "\n\nYour previous question revealed the answer. Rephrase without it.";
    }
    throw ComposeError("composed question keeps leaking the answer for index: " + index.value);
}

std::vector<AtomicTask> AtomicGenerator::generate_atomic(const CorpusDocument& document) {
    InputIndex index = document.index();
    ToolContext context = tools_.execute_tool(index);

    std::vector<AtomicTask> tasks;
    for (const auto& candidate : extract_candidates(context)) {
        std::string question;
        try {
            question = compose_question(index, candidate.relation, candidate.answer);
        } catch (const Error&) {
            continue;  // drop this candidate only
        }
        AtomicTask task;
        task.question = question;
        task.golden_answer = candidate.answer;
        task.index = index;
        task.relation = candidate.relation;
        task.source_document = document.id;
        task.index_referenced = text::contains_normalized(question, index.value);
        task.id = derive_task_id(document.id, question);
        tasks.push_back(std::move(task));
    }
    return tasks;
}

}  // namespace taskforge
