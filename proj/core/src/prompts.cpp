// SPDX-License-Identifier: Apache-2.0
#include "taskforge/prompts.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "taskforge/errors.hpp"
#include "taskforge/text.hpp"

namespace taskforge {

namespace fs = std::filesystem;

PromptLibrary PromptLibrary::defaults() {
    PromptLibrary lib;

    lib.candidate_extraction.slot_name = "candidate_extraction";
    lib.candidate_extraction.body =
        "Extract standalone factual conclusions from the document chunk below.\n"
        "Rules:\n"
        "- Each conclusion must be a single indivisible fact. Split compound\n"
        "  statements (\"A increased by 5% and B decreased by 2%\") into separate\n"
        "  conclusions.\n"
        "- Each conclusion must carry at least one definite identifier: a numeric\n"
        "  value, a date, or a unique name. Skip vague statements.\n"
        "- State the time range explicitly for time-sensitive facts.\n"
        "- Inline the content of any reference the fact cites.\n"
        "\n"
        "Chunk:\n{chunk}\n"
        "\n"
        "Reply with one line per conclusion, formatted exactly as:\n"
        "candidate: <answer> | evidence: <verbatim span from the chunk> | "
        "relation: <how the answer relates to the source, without stating the answer>\n"
        "Reply 'candidate: none' if the chunk has no usable facts.";
    lib.candidate_extraction.exemplars = {
        "candidate: 3.0% | evidence: Global GDP grew by 3.0% in 2023 | "
        "relation: global GDP growth rate in 2023",
        "candidate: Optics Express 29, 6293-6301 (2021) | evidence: published in Optics "
        "Express 29, 6293-6301, 2021 | relation: venue and pages of the deconvolution "
        "microscopy illumination study",
    };

    lib.question_composition.slot_name = "question_composition";
    lib.question_composition.body =
        "Write one natural-language question.\n"
        "The question must name or uniquely reference the source '{index}' and ask\n"
        "for the entity satisfying: {relation}.\n"
        "The question must not state or hint at the answer itself.\n"
        "Reply with the question text only.";

    lib.superset_guidance.slot_name = "superset_guidance";
    lib.superset_guidance.body =
        "Identify a minimal unique superset that properly contains the input\n"
        "element, based on the search results below. The superset identifier plus a\n"
        "relation must uniquely point back to the input element.\n"
        "Rules:\n"
        "- Return a genuine container (series, section, category, parent page), not\n"
        "  a synonym or rewording of the input.\n"
        "- Return the superset's unique identifier (attribute name, page title,\n"
        "  paper title), derived from the search results, never from the input\n"
        "  content itself.\n"
        "\n"
        "Input: {inner}\n"
        "Search results:\n{candidates}\n"
        "\n"
        "Reply as: superset: <identifier>";
    lib.superset_guidance.exemplars = {
        "Input: Avatar 3: Fire and Ash\nSuperset Identifier: Avatar film series",
        "Input: V3LMA: Visual 3D-enhanced Language Model for Autonomous Driving\n"
        "Superset Identifier: cs.CV",
    };

    lib.relation_articulation.slot_name = "relation_articulation";
    lib.relation_articulation.body =
        "State the relationship that uniquely identifies the inner element within\n"
        "its superset.\n"
        "Rules:\n"
        "- Make the hierarchy or ownership explicit (position in a series,\n"
        "  membership in a section).\n"
        "- Give only the qualification conditions needed for uniqueness; avoid\n"
        "  strongly specific proper nouns where a positional description works.\n"
        "- Use standard research or industry wording.\n"
        "\n"
        "Inner: {inner}\n"
        "Superset: {outer}\n"
        "Context:\n{candidates}\n"
        "\n"
        "Reply as: relation: <description>";
    lib.relation_articulation.exemplars = {
        "Inner: Avatar 3: Fire and Ash\nSuperset: Avatar film series\nRelation: The third film",
        "Inner: V3LMA: Visual 3D-enhanced Language Model for Autonomous Driving\n"
        "Superset: cs.CV\nRelation: A paper on visual 3D-enhanced language models for "
        "autonomous driving",
    };

    lib.logical_substitution.slot_name = "logical_substitution";
    lib.logical_substitution.body =
        "Substitute elements of the core query using the auxiliary query, producing\n"
        "one fluent question.\n"
        "Rules:\n"
        "- The new query should be slightly harder than the core query and need\n"
        "  more steps, without changing the core query beyond the substitution.\n"
        "- The new query must still point to exactly one answer: the core query's\n"
        "  golden answer.\n"
        "- The new query must not reveal anything about that answer.\n"
        "- Polish the wording to read naturally; keep proper nouns intact.\n"
        "- Preserve every relationship listed under 'Relations to keep'.\n"
        "\n"
        "Core query: {core_question}\n"
        "Auxiliary query: {auxiliary_question}\n"
        "Relations to keep: {relations}\n"
        "\n"
        "Reply with the merged question text only.";
    lib.logical_substitution.exemplars = {
        "Core Query: What is the 2nd positive integer?\n"
        "Auxiliary Query: Numbers except 0 in natural numbers\n"
        "New Query: What is the 2nd natural number except 0?",
        "Core Query: Ne Zha 2 attendance ranking\n"
        "Auxiliary Query: 2025 May Day box office summary\n"
        "New Query: Given 2025 May Day box office data, what is Ne Zha 2's attendance "
        "ranking?",
    };

    return lib;
}

const std::vector<std::string>& PromptLibrary::optimizable_slots() {
    static const std::vector<std::string> slots = {
        "candidate_extraction", "superset_guidance", "relation_articulation",
        "logical_substitution"};
    return slots;
}

PromptTemplate& PromptLibrary::slot(const std::string& name) {
    if (name == "candidate_extraction") return candidate_extraction;
    if (name == "question_composition") return question_composition;
    if (name == "superset_guidance") return superset_guidance;
    if (name == "relation_articulation") return relation_articulation;
    if (name == "logical_substitution") return logical_substitution;
    throw InvalidArgumentError("unknown prompt slot: " + name);
}

const PromptTemplate& PromptLibrary::slot(const std::string& name) const {
    return const_cast<PromptLibrary*>(this)->slot(name);
}

namespace {
const std::vector<std::string>& all_slots() {
    static const std::vector<std::string> slots = {
        "candidate_extraction", "question_composition", "superset_guidance",
        "relation_articulation", "logical_substitution"};
    return slots;
}
}  // namespace

void PromptLibrary::load_dir(const std::string& dir) {
    for (const auto& name : all_slots()) {
        fs::path path = fs::path(dir) / (name + ".json");
        if (!fs::exists(path)) continue;
        std::ifstream in(path);
        auto doc = nlohmann::json::parse(in);
        PromptTemplate& tmpl = slot(name);
        tmpl.slot_name = name;
        tmpl.body = doc.at("body").get<std::string>();
        tmpl.exemplars = doc.value("exemplars", std::vector<std::string>{});
    }
}

void PromptLibrary::save_dir(const std::string& dir) const {
    fs::create_directories(dir);
    for (const auto& name : all_slots()) {
        const PromptTemplate& tmpl = slot(name);
        nlohmann::json doc{{"body", tmpl.body}, {"exemplars", tmpl.exemplars}};
        std::ofstream out(fs::path(dir) / (name + ".json"));
        out << doc.dump(2) << '\n';
    }
}

std::map<std::string, std::string> PromptLibrary::hashes() const {
    std::map<std::string, std::string> out;
    for (const auto& name : all_slots()) {
        const PromptTemplate& tmpl = slot(name);
        std::string blob = tmpl.body;
        for (const auto& ex : tmpl.exemplars) blob += '\x1f' + ex;
        out[name] = text::fnv1a64_hex(blob);
    }
    return out;
}

}  // namespace taskforge
