#include "jobrec/lm/prompt.hpp"

#include "jobrec/error.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace jobrec::lm {

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Visits every `{name}` span; `emit` receives literal text and names.
template <typename Literal, typename Placeholder>
void scan(std::string_view text, Literal&& literal, Placeholder&& placeholder) {
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            std::size_t j = i + 1;
            while (j < text.size() && is_name_char(text[j])) ++j;
            if (j > i + 1 && j < text.size() && text[j] == '}') {
                placeholder(text.substr(i + 1, j - i - 1));
                i = j + 1;
                continue;
            }
        }
        literal(text[i]);
        ++i;
    }
}

PromptRegistry make_builtin() {
    PromptRegistry r;

    r.add({prompt_ids::kClassify, Task::Classify,
           "You route questions for a career and job-search assistant.\n"
           "Decide whether the user query is SIMPLE or COMPLEX.\n"
           "SIMPLE: one clear request answerable by a single tool call (application status, interview time, "
           "a single lookup, the next roles after a given title).\n"
           "COMPLEX: ambiguous requests, comparisons, multi-step goals, or anything needing several tools.\n"
           "Reply with exactly one word on the first line: SIMPLE or COMPLEX. For SIMPLE, put the tool name "
           "on the second line.\n"
           "User profile: {profile}\n"
           "Recent chat history:\n{history}",
           {{"help me check job application status", "SIMPLE\napplication_status"},
            {"can you create a career development plan for me?", "COMPLEX"},
            {"Which city has more machine learning engineer job openings, Seattle or Sunnyvale?", "COMPLEX"}},
           "{query}"});

    r.add({prompt_ids::kMemory, Task::Memory,
           "You maintain the conversation memory of a career assistant.\n"
           "Read the chat history and the current user query. Keep only the history segments that help "
           "answer the current query and drop everything else. Merge the kept segments with the current "
           "query into one self-contained request.\n"
           "Output the indices of the kept turns on a line starting with INDICES:, then the merged text on "
           "a line starting with Integrated User Query:. If nothing in the history is relevant, output "
           "INDICES: with no numbers and repeat the query unchanged.\n"
           "User profile: {profile}",
           {{"[HISTORY]\n[0] user: I have 6 years of Java experience\n[1] user: what's the weather today?\n"
             "[QUERY]\nfind me lead engineer roles",
             "INDICES: 0\nIntegrated User Query: find me lead engineer roles (context: I have 6 years of Java "
             "experience)"},
            {"[HISTORY]\n[0] user: is it going to rain tomorrow?\n[1] assistant: Light rain is expected.\n"
             "[QUERY]\nshow me job openings",
             "INDICES:\nIntegrated User Query: show me job openings"}},
           "[HISTORY]\n{history}\n[QUERY]\n{query}"});

    r.add({prompt_ids::kPlan, Task::Plan,
           "You are the planner of a career assistant. Break the integrated user query into sub-tasks.\n"
           "Output a JSON array of groups. Each group is an array of sub-tasks that can run at the same time "
           "because none of them needs another one's output. Groups run in order.\n"
           "Each sub-task is {\"d\": description, \"tool\": tool, \"args\": {string: string}}. An arg value "
           "\"$ref:G.P\" refers to the output of sub-task P in an earlier group G.\n"
           "Tools: job_recommend, career_path, career_growth, skill_gap, learning_resources, mentor, "
           "graph_template, text_to_query, application_status, compare.\n"
           "User profile: {profile}",
           {{"Which city has more machine learning engineer job openings, Seattle or Sunnyvale?",
             R"([[{"d":"Get machine learning engineer job opening number from Seattle","tool":"graph_template","args":{"template":"openings_count_by_title_city","title":"t_ml_engineer","city":"Seattle"}},)"
             R"({"d":"Get machine learning engineer job opening number from Sunnyvale","tool":"graph_template","args":{"template":"openings_count_by_title_city","title":"t_ml_engineer","city":"Sunnyvale"}}],)"
             R"([{"d":"Compare job opening numbers of Sunnyvale and Seattle","tool":"compare","args":{"left":"$ref:0.0","right":"$ref:0.1"}}]])"},
            {"I want to become a principal 3D designer; what should I do?",
             R"([[{"d":"Find a career path to principal 3D designer","tool":"career_path","args":{"destination":"t_principal_3d_designer"}}]])"}},
           "{integrated_query}"});

    r.add({prompt_ids::kReplan, Task::Replan,
           "Some sub-tasks of the previous plan did not return enough information. Produce a revised plan "
           "in the same JSON format that addresses the failing sub-tasks, for example by relaxing filters.\n"
           "Integrated user query: {integrated_query}",
           {},
           "[PLAN]\n{plan}\n[FEEDBACK]\n{feedback}"});

    r.add({prompt_ids::kSufficiency, Task::Sufficiency,
           "Decide whether the tool results below answer the user's query. Reply SUFFICIENT or INSUFFICIENT "
           "on the first line; when insufficient, list the failing sub-task indices as G.P, one per line.",
           {},
           "[QUERY]\n{query}\n[RESULTS]\n{results}"});

    r.add({prompt_ids::kTextToQuery, Task::Query,
           "Translate the question into a call of one of the graph query templates below. Reply with JSON "
           "{\"template\": id, \"bindings\": {name: value}} and nothing else, or NONE if no template fits.\n"
           "{schema}",
           {{"how many ML engineer openings in Seattle",
             R"({"template":"openings_count_by_title_city","bindings":{"title":"ML Engineer","city":"Seattle"}})"}},
           "{text}"});
    return r;
}

}  // namespace

std::string_view to_string(Task task) noexcept {
    switch (task) {
        case Task::Classify: return "classify";
        case Task::Memory: return "memory";
        case Task::Plan: return "plan";
        case Task::Replan: return "replan";
        case Task::Sufficiency: return "sufficiency";
        case Task::Query: return "query";
    }
    return "?";
}

Task parse_task(std::string_view text) {
    for (auto t : {Task::Classify, Task::Memory, Task::Plan, Task::Replan, Task::Sufficiency, Task::Query}) {
        if (to_string(t) == text) return t;
    }
    throw Error(Errc::RuleTableInvalid, "unknown task tag '" + std::string(text) + "'");
}

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> names;
    std::set<std::string> seen;
    auto collect = [&](std::string_view name) {
        if (seen.emplace(name).second) names.emplace_back(name);
    };
    scan(system_text, [](char) {}, collect);
    scan(input_text, [](char) {}, collect);
    return names;
}

std::string substitute(std::string_view text, const Bindings& bindings) {
    std::string out;
    out.reserve(text.size());
    scan(
        text, [&](char c) { out.push_back(c); },
        [&](std::string_view name) {
            auto it = bindings.find(std::string(name));
            if (it == bindings.end()) {
                throw Error(Errc::MissingPlaceholder, "no binding for {" + std::string(name) + "}");
            }
            out += it->second;
        });
    return out;
}

std::string render_system(const PromptTemplate& tmpl, const Bindings& bindings) {
    std::ostringstream out;
    out << substitute(tmpl.system_text, bindings);
    for (std::size_t i = 0; i < tmpl.few_shot.size(); ++i) {
        out << "\n\n### Example " << (i + 1) << "\n[TEXT]\n"
            << tmpl.few_shot[i].input << "\n[OUTPUT]\n"
            << tmpl.few_shot[i].output;
    }
    return out.str();
}

std::string render_input(const PromptTemplate& tmpl, const Bindings& bindings) {
    return substitute(tmpl.input_text, bindings);
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
    // Validate every placeholder before rendering either part.
    for (const auto& name : tmpl.placeholders()) {
        if (!bindings.count(name)) {
            throw Error(Errc::MissingPlaceholder, "no binding for {" + name + "} in prompt " + tmpl.id);
        }
    }
    std::string out = render_system(tmpl, bindings);
    if (!tmpl.input_text.empty()) out += "\n\n### Current\n[TEXT]\n" + render_input(tmpl, bindings) + "\n[OUTPUT]\n";
    return out;
}

void PromptRegistry::add(PromptTemplate tmpl) {
    const std::string id = tmpl.id;
    if (!templates_.emplace(id, std::move(tmpl)).second) {
        throw Error(Errc::ContractViolation, "duplicate prompt id " + id);
    }
}

const PromptTemplate& PromptRegistry::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw Error(Errc::UnknownTemplate, "no prompt '" + id + "'");
    return it->second;
}

const PromptRegistry& PromptRegistry::builtin() {
    static const PromptRegistry registry = make_builtin();
    return registry;
}

}  // namespace jobrec::lm
