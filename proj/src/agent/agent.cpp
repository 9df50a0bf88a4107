#include "jobrec/agent/agent.hpp"

#include "jobrec/error.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <sstream>

namespace jobrec::agent {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) lines.push_back(trim(line));
    return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::optional<Complexity> parse_verdict(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) return std::nullopt;
    Complexity c;
    if (lines[0] == "COMPLEX") {
        c.verdict = Verdict::Complex;
        return c;
    }
    if (lines[0] != "SIMPLE") return std::nullopt;
    c.verdict = Verdict::Simple;
    if (lines.size() > 1) {
        if (auto hint = parse_tool_hint(lines[1])) c.tool = *hint;
    }
    if (lines.size() > 2 && !lines[2].empty()) {
        try {
            const json args = json::parse(lines[2]);
            for (const auto& [k, v] : args.items()) {
                if (v.is_string() && !v.get<std::string>().empty()) c.args[k] = v.get<std::string>();
            }
        } catch (const json::exception&) {
            // Arguments are optional; a malformed line leaves them empty.
        }
    }
    return c;
}

std::string feedback_text(const Feedback& feedback) {
    std::string out;
    for (const auto& [idx, reason] : feedback.failing) out += to_string(idx) + ": " + reason + "\n";
    return out;
}

}  // namespace

std::string serialize_history(const History& history, std::size_t last_n) {
    std::ostringstream out;
    const std::size_t start = history.size() > last_n ? history.size() - last_n : 0;
    for (std::size_t i = start; i < history.size(); ++i) {
        std::string text = history[i].text;
        std::replace(text.begin(), text.end(), '\n', ' ');
        out << '[' << i << "] " << to_string(history[i].role) << ": " << text << '\n';
    }
    return out.str();
}

std::string profile_summary(const UserProfile& p) {
    std::ostringstream out;
    out << "title=" << p.current_title << "; skills=";
    bool first = true;
    for (const auto& s : p.skills) {
        out << (first ? "" : ",") << s;
        first = false;
    }
    out << "; location=" << p.location << "; education=" << p.education << "; interests=";
    for (std::size_t i = 0; i < p.interests.size(); ++i) out << (i ? "," : "") << p.interests[i];
    return out.str();
}

Complexity classify_complexity(const std::string& query, const History& history, const UserProfile& profile,
                               const lm::LmBackend& backend) {
    if (blank(query)) throw Error(Errc::EmptyQuery, "query is empty");
    const std::string recent = serialize_history(history, kSimpleHistoryWindow);
    lm::LmRequest request{lm::prompt_ids::kClassify,
                          {{"query", query}, {"history", recent}, {"profile", profile_summary(profile)}},
                          64};
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto parsed = parse_verdict(backend.complete(request).text);
        if (!parsed) continue;
        if (parsed->verdict == Verdict::Simple) parsed->merged_context = recent + "[query] " + query;
        return *parsed;
    }
    spdlog::warn("ClassifierParseError: unusable verdict for '{}', routing as COMPLEX", query);
    Complexity fallback;
    fallback.verdict = Verdict::Complex;
    fallback.fallback = true;
    return fallback;
}

IntegratedQuery integrate_memory(const std::string& query, const History& history, const UserProfile& profile,
                                 const lm::LmBackend& backend) {
    if (blank(query)) throw Error(Errc::EmptyQuery, "query is empty");
    IntegratedQuery result{query, {}, query};
    if (history.empty()) return result;

    lm::LmRequest request{lm::prompt_ids::kMemory,
                          {{"query", query}, {"history", serialize_history(history)},
                           {"profile", profile_summary(profile)}},
                          2048};
    const auto lines = lines_of(backend.complete(request).text);
    std::vector<std::size_t> indices;
    std::string merged;
    for (const auto& line : lines) {
        if (line.rfind("INDICES:", 0) == 0) {
            std::stringstream ss(line.substr(8));
            for (std::string tok; std::getline(ss, tok, ',');) {
                tok = trim(tok);
                if (tok.empty()) continue;
                try {
                    const auto i = std::stoul(tok);
                    if (i < history.size() && std::find(indices.begin(), indices.end(), i) == indices.end()) {
                        indices.push_back(i);
                    }
                } catch (const std::exception&) {
                }
            }
        } else if (line.rfind("Integrated User Query:", 0) == 0) {
            merged = trim(line.substr(22));
        }
    }
    if (indices.empty() || merged.empty()) return result;
    std::sort(indices.begin(), indices.end());
    result.text = merged;
    result.source_turn_indices = std::move(indices);
    return result;
}

void validate_plan(const Plan& plan) {
    if (plan.groups.empty()) throw Error(Errc::PlanInvalid, "plan has no groups");
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        const auto& group = plan.groups[g];
        if (group.empty()) throw Error(Errc::PlanInvalid, "group " + std::to_string(g) + " is empty");
        for (std::size_t p = 0; p < group.size(); ++p) {
            const auto& task = group[p];
            if (blank(task.description)) {
                throw Error(Errc::PlanInvalid, "sub-task " + to_string(TaskIndex{g, p}) + " has no description");
            }
            for (const auto& [key, value] : task.args) {
                if (value.rfind("$ref:", 0) != 0) continue;
                auto ref = parse_ref(value);
                if (!ref) throw Error(Errc::PlanInvalid, "malformed reference " + value);
                if (ref->group >= g) {
                    throw Error(Errc::PlanInvalid, "sub-task " + to_string(TaskIndex{g, p}) +
                                                       " references " + value + " outside earlier groups");
                }
                if (ref->position >= plan.groups[ref->group].size()) {
                    throw Error(Errc::PlanInvalid, "reference " + value + " points past its group");
                }
            }
        }
    }
}

Plan parse_plan(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::PlanParseError, e.what());
    }
    if (!j.is_array()) throw Error(Errc::PlanParseError, "plan must be a JSON array");
    Plan plan;
    for (const auto& group : j) {
        if (!group.is_array()) throw Error(Errc::PlanParseError, "plan group must be an array");
        auto& out = plan.groups.emplace_back();
        for (const auto& t : group) {
            if (!t.is_object() || !t.contains("d") || !t.contains("tool") || !t["d"].is_string() ||
                !t["tool"].is_string()) {
                throw Error(Errc::PlanParseError, "sub-task must be an object with string d and tool");
            }
            SubTask task;
            task.description = t["d"].get<std::string>();
            const auto tool = t["tool"].get<std::string>();
            auto hint = parse_tool_hint(tool);
            if (!hint) throw Error(Errc::PlanInvalid, "unknown tool '" + tool + "'");
            task.tool = *hint;
            if (t.contains("args")) {
                if (!t["args"].is_object()) throw Error(Errc::PlanParseError, "args must be an object");
                for (const auto& [k, v] : t["args"].items()) {
                    if (!v.is_string()) throw Error(Errc::PlanParseError, "arg '" + k + "' is not a string");
                    task.args[k] = v.get<std::string>();
                }
            }
            out.push_back(std::move(task));
        }
    }
    validate_plan(plan);
    return plan;
}

std::string serialize_plan(const Plan& plan) {
    ordered_json j = ordered_json::array();
    for (const auto& group : plan.groups) {
        ordered_json g = ordered_json::array();
        for (const auto& t : group) {
            ordered_json args = ordered_json::object();
            for (const auto& [k, v] : t.args) args[k] = v;
            g.push_back(ordered_json{{"d", t.description}, {"tool", to_string(t.tool)}, {"args", args}});
        }
        j.push_back(std::move(g));
    }
    return j.dump();
}

namespace {

// Empty-string arguments mean "not provided".
void drop_empty_args(Plan& plan) {
    for (auto& group : plan.groups) {
        for (auto& t : group) std::erase_if(t.args, [](const auto& kv) { return kv.second.empty(); });
    }
}

Plan complete_plan(const lm::LmBackend& backend, const lm::LmRequest& request) {
    std::optional<Error> last;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            Plan plan = parse_plan(backend.complete(request).text);
            drop_empty_args(plan);
            return plan;
        } catch (const Error& e) {
            if (e.code() != Errc::PlanParseError && e.code() != Errc::PlanInvalid) throw;
            last = e;
        }
    }
    throw *last;
}

}  // namespace

Plan decompose(const IntegratedQuery& integrated, const lm::LmBackend& backend, const UserProfile* profile) {
    if (blank(integrated.text)) throw Error(Errc::EmptyQuery, "integrated query is empty");
    lm::LmRequest request{lm::prompt_ids::kPlan,
                          {{"integrated_query", integrated.text},
                           {"profile", profile ? profile_summary(*profile) : std::string{}}},
                          4096};
    return complete_plan(backend, request);
}

std::optional<Plan> replan(const Plan& previous, const Feedback& feedback, int budget_remaining,
                           const lm::LmBackend& backend, const IntegratedQuery* integrated) {
    if (feedback.verdict != SufficiencyVerdict::Insufficient || feedback.failing.empty()) {
        throw Error(Errc::ContractViolation, "replan requires at least one insufficient sub-task");
    }
    if (budget_remaining <= 0) return std::nullopt;
    lm::LmRequest request{lm::prompt_ids::kReplan,
                          {{"plan", serialize_plan(previous)},
                           {"feedback", feedback_text(feedback)},
                           {"integrated_query", integrated ? integrated->text : std::string{}}},
                          4096};
    return complete_plan(backend, request);
}

}  // namespace jobrec::agent
