#include "jobrec/exec/orchestrator.hpp"

#include "jobrec/error.hpp"
#include "jobrec/kgraph/templates.hpp"

#include <cstdio>
#include <ctime>
#include <set>

namespace jobrec::exec {

namespace {

using agent::Plan;
using agent::ToolHint;
using Clock = std::chrono::steady_clock;

std::string fixed2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string title_name(const kgraph::KnowledgeGraph& g, const std::string& id) {
    const auto* n = g.find(id);
    return n ? n->string_or("title", id) : id;
}

std::string path_text(const json& path) {
    std::string out;
    for (const auto& t : path.at("titles")) out += (out.empty() ? "" : " -> ") + t.at("name").get<std::string>();
    return out;
}

std::string utc_time(std::int64_t ms) {
    const std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M UTC", &tm);
    return buf;
}

std::string list_names(const json& rows, const char* key) {
    std::string out;
    for (const auto& r : rows) out += (out.empty() ? "" : ", ") + r.value(key, std::string{});
    return out;
}

std::string render_template_call(const json& call, const kgraph::KnowledgeGraph& g) {
    const auto id = call.value("template", std::string{});
    const auto& rows = call.at("rows");
    const auto& b = call.value("bindings", json::object());
    auto bound_title = [&] {
        const auto t = b.value("title", std::string{});
        const auto* n = g.find(t);
        if (n) return n->string_or("title", t);
        try {
            return kgraph::resolve_title(g, t).string_or("title", t);
        } catch (const Error&) {
            return t;
        }
    };
    if (id == "openings_count_by_title_city" && !rows.empty()) {
        const auto& r = rows[0];
        const auto n = r.at("count").get<std::int64_t>();
        return std::string(n == 1 ? "There is 1 active " : "There are " + std::to_string(n) + " active ") +
               title_name(g, r.value("title", std::string{})) + (n == 1 ? " opening in " : " openings in ") +
               r.value("city", std::string{}) + ".";
    }
    if (id == "skills_for_title") return "Skills required for " + bound_title() + ": " + list_names(rows, "name") + ".";
    if (id == "next_titles") return "Roles that follow " + bound_title() + ": " + list_names(rows, "name") + ".";
    if (id == "openings_by_title") {
        std::string out = "Active " + bound_title() + " openings:";
        for (const auto& r : rows) out += "\n- " + r.value("opening", std::string{}) + " in " + r.value("city", std::string{});
        return out;
    }
    if (id == "learning_resources") {
        std::string out = "Learning resources:";
        for (const auto& r : rows) out += "\n- " + r.value("skill", std::string{}) + ": " + r.value("resource", std::string{});
        return out;
    }
    return "Results for " + id + ": " + rows.dump();
}

bool error_is(const ToolResult& r, Errc code) {
    return r.error.rfind(std::string(errc_name(code)), 0) == 0;
}

// Concatenation of the whole raw history, used when memory selection is off.
agent::IntegratedQuery raw_history_query(const std::string& query, const agent::History& history) {
    agent::IntegratedQuery iq;
    iq.original_query = query;
    for (std::size_t i = 0; i < history.size(); ++i) {
        iq.text += history[i].text + " | ";
        iq.source_turn_indices.push_back(i);
    }
    iq.text += query;
    return iq;
}

// Read-only tools over an immutable graph return the same empty result for
// the same arguments; only errors (timeouts, outages) are worth retrying as is.
bool only_empty(const std::vector<ToolResult>& results, const agent::Feedback& feedback) {
    for (const auto& [idx, why] : feedback.failing) {
        for (const auto& r : results) {
            if (r.index == idx && r.status != ToolStatus::Empty) return false;
        }
    }
    return true;
}

// Sub-tasks that keep their previous result: unchanged, not failing, and not
// downstream of anything that will run again.
std::map<agent::TaskIndex, ToolResult> reusable(const Plan& before, const Plan& after,
                                                const std::vector<ToolResult>& results,
                                                const agent::Feedback& feedback) {
    std::set<agent::TaskIndex> dirty;
    for (const auto& [idx, why] : feedback.failing) dirty.insert(idx);
    std::map<agent::TaskIndex, const ToolResult*> by_index;
    for (const auto& r : results) by_index[r.index] = &r;

    std::map<agent::TaskIndex, ToolResult> keep;
    for (std::size_t g = 0; g < after.groups.size(); ++g) {
        for (std::size_t p = 0; p < after.groups[g].size(); ++p) {
            const agent::TaskIndex idx{g, p};
            const auto& task = after.groups[g][p];
            bool same = g < before.groups.size() && p < before.groups[g].size() && before.groups[g][p] == task;
            for (const auto& [k, v] : task.args) {
                if (auto ref = agent::parse_ref(v); ref && dirty.count(*ref)) same = false;
            }
            auto it = by_index.find(idx);
            if (!same || dirty.count(idx) || it == by_index.end() || it->second->status != ToolStatus::Ok) {
                dirty.insert(idx);
                continue;
            }
            keep[idx] = *it->second;
        }
    }
    return keep;
}

void append_trace(ExecutionTrace& into, ExecutionTrace&& part) {
    for (auto& g : part.groups) into.groups.push_back(std::move(g));
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::Adapt: return "adapt";
        case Variant::AlwaysPlan: return "always_plan";
        case Variant::PlanExecute: return "plan_execute";
        case Variant::ReactLike: return "react_like";
        case Variant::RagLike: return "rag_like";
    }
    return "?";
}

Variant parse_variant(std::string_view text) {
    for (auto v : {Variant::Adapt, Variant::AlwaysPlan, Variant::PlanExecute, Variant::ReactLike, Variant::RagLike}) {
        if (to_string(v) == text) return v;
    }
    throw Error(Errc::ConfigInvalid, "unknown variant '" + std::string(text) + "'");
}

std::string render_result(const ToolResult& r, const kgraph::KnowledgeGraph& g) {
    if (r.status != ToolStatus::Ok) {
        if (r.tool == ToolHint::ApplicationStatus && error_is(r, Errc::NoApplications)) {
            return "You have no job applications on record.";
        }
        if (error_is(r, Errc::UnreachableDestination)) return "There is no known career path to that role.";
        return "No " + std::string(agent::to_string(r.tool)) + " results were found.";
    }
    const json& j = r.payload;
    switch (r.tool) {
        case ToolHint::JobRecommend: {
            std::string out = "Recommended openings:";
            std::size_t n = 0;
            for (const auto& o : j) {
                if (++n > 5) break;
                out += "\n" + std::to_string(n) + ". " + o.value("title_name", o.value("title", std::string{})) +
                       " in " + o.value("city", std::string{}) + " (" + o.value("opening", std::string{}) +
                       ", score " + fixed2(o.value("adjusted", 0.0)) + ")";
            }
            return out;
        }
        case ToolHint::CareerPath:
            if (j.at("titles").size() < 2) return "You already hold that title.";
            return "Career path: " + path_text(j) + " (total transition cost " + fixed2(j.value("score", 0.0)) + ")";
        case ToolHint::CareerGrowth: {
            std::string out = "Career growth paths:";
            std::size_t n = 0;
            for (const auto& p : j) {
                out += "\n" + std::to_string(++n) + ". " + path_text(p) + " (score " + fixed2(p.value("score", 0.0)) + ")";
            }
            return out;
        }
        case ToolHint::SkillGap: {
            const auto name = j.value("title_name", std::string{});
            if (j.at("missing").empty()) return "You already have every skill required for " + name + ".";
            std::string skills;
            for (const auto& s : j["missing"]) skills += (skills.empty() ? "" : ", ") + s.get<std::string>();
            return "Skills to develop for " + name + ": " + skills + ".";
        }
        case ToolHint::LearningResources:
            if (j.is_object()) return "No new learning is needed: your skills already cover the role.";
            return render_template_call({{"template", "learning_resources"}, {"rows", j}}, g);
        case ToolHint::Mentor: {
            std::string out = "Suggested mentors:";
            for (const auto& m : j) {
                out += "\n- " + m.value("name", std::string{}) + " (" + title_name(g, m.value("title", std::string{})) +
                       "), covers " + std::to_string(m.value("matched", 0)) + " of the skills";
            }
            return out;
        }
        case ToolHint::GraphTemplate:
        case ToolHint::TextToQuery: return render_template_call(j, g);
        case ToolHint::ApplicationStatus: {
            std::string out = "Your latest application (opening " + j.value("opening", std::string{}) + ") is at the " +
                              j.value("stage", std::string{}) + " stage.";
            if (j.contains("interview_ms")) {
                out += " Your interview is scheduled for " + utc_time(j["interview_ms"].get<std::int64_t>()) + ".";
            }
            return out;
        }
        case ToolHint::Compare: {
            const auto& l = j.at("left");
            const auto& rt = j.at("right");
            const auto what = title_name(g, l.value("title", std::string{}));
            const auto lc = std::to_string(l.at("count").get<std::int64_t>());
            const auto rc = std::to_string(rt.at("count").get<std::int64_t>());
            if (j.value("tie", false)) {
                return l.value("label", std::string{}) + " and " + rt.value("label", std::string{}) +
                       " have the same number of " + what + " openings (" + lc + " each).";
            }
            const bool left_wins = j.value("winner", std::string{}) == l.value("label", std::string{});
            const auto& win = left_wins ? l : rt;
            const auto& lose = left_wins ? rt : l;
            return win.value("label", std::string{}) + " has more " + what + " openings than " +
                   lose.value("label", std::string{}) + " (" + (left_wins ? lc : rc) + " vs " + (left_wins ? rc : lc) +
                   ").";
        }
    }
    return j.dump();
}

std::string render_response(const std::vector<ToolResult>& results, const kgraph::KnowledgeGraph& graph,
                            bool degraded) {
    std::string out;
    bool any_ok = false;
    for (const auto& r : results) {
        if (r.status != ToolStatus::Ok && results.size() > 1) continue;
        any_ok = any_ok || r.status == ToolStatus::Ok;
        out += (out.empty() ? "" : "\n\n") + render_result(r, graph);
    }
    if (degraded) {
        const std::string note = any_ok ? "Note: part of this request could not be answered."
                                        : "Sorry, I could not find enough information to answer that.";
        out = out.empty() ? note : out + "\n\n" + note;
    }
    return out;
}

OrchestrationResult orchestrate(const std::string& query, const SessionState& session, const ToolEnvironment& env,
                                const ToolRegistry& registry, const OrchestratorConfig& config,
                                const Observer* observer, SimpleCache* cache) {
    if (query.find_first_not_of(" \t\r\n") == std::string::npos) throw Error(Errc::EmptyQuery, "query is blank");
    if (!env.backend || !env.graph) throw Error(Errc::ContractViolation, "environment needs a graph and a backend");
    const auto& backend = *env.backend;
    const auto& graph = *env.graph;

    OrchestrationResult out;
    ExecuteOptions options;
    options.origin = Clock::now();
    options.timeout = config.tool_timeout;
    options.mode = (config.variant == Variant::PlanExecute || config.variant == Variant::ReactLike)
                       ? ExecutionMode::Sequential
                       : ExecutionMode::Concurrent;
    if (observer && observer->on_tool) options.on_result = observer->on_tool;

    ToolContext ctx{env, session.profile, session.interest, query, nullptr};
    auto finish = [&] { out.trace.total_ms = std::chrono::duration<double, std::milli>(Clock::now() - options.origin).count(); };

    auto run_single = [&](agent::SubTask task) {
        out.route = agent::Verdict::Simple;
        if (cache) {
            if (auto hit = cache->lookup(query, session.profile, task.tool)) {
                ToolResult r{{0, 0}, task.tool, *hit, ToolStatus::Ok, {}, 0.0, true};
                if (options.on_result) options.on_result(r);
                const double at = std::chrono::duration<double, std::milli>(Clock::now() - options.origin).count();
                out.trace.groups.push_back({{{r.index, r.tool, r.status, at, at, 0.0, true}}, 0.0});
                out.results = {r};
                out.response = render_response(out.results, graph, false);
                finish();
                return;
            }
        }
        Plan plan{{{std::move(task)}}};
        auto outcome = execute_plan(plan, registry, ctx, options);
        append_trace(out.trace, std::move(outcome.trace));
        out.results = std::move(outcome.results);
        const auto& r = out.results.front();
        if (cache && r.status == ToolStatus::Ok) cache->store(query, session.profile, r.tool, r.payload);
        out.response = render_response(out.results, graph, false);
        finish();
    };

    if (config.variant == Variant::RagLike) {
        run_single({"Retrieve openings for the query", ToolHint::JobRecommend, {}});
        return out;
    }

    if (config.variant == Variant::Adapt) {
        auto c = agent::classify_complexity(query, session.history, session.profile, backend);
        ++out.trace.classifier_calls;
        if (observer && observer->on_route) observer->on_route(c);
        if (c.verdict == agent::Verdict::Simple) {
            ctx.query = c.merged_context;
            run_single({"Answer directly", c.tool, c.args});
            return out;
        }
    }

    // Complex path.
    out.route = agent::Verdict::Complex;
    agent::IntegratedQuery integrated;
    if (config.variant == Variant::ReactLike) {
        integrated = raw_history_query(query, session.history);
    } else {
        integrated = agent::integrate_memory(query, session.history, session.profile, backend);
        ++out.trace.memory_calls;
    }
    ctx.query = integrated.text;

    Plan plan = agent::decompose(integrated, backend, &session.profile);
    ++out.trace.planner_calls;
    if (observer && observer->on_plan) observer->on_plan(plan, 0);

    for (;;) {
        auto outcome = execute_plan(plan, registry, ctx, options);
        append_trace(out.trace, std::move(outcome.trace));
        out.results = std::move(outcome.results);
        const auto feedback = assess_sufficiency(out.results, integrated, &backend);
        if (feedback.verdict == agent::SufficiencyVerdict::Sufficient) break;
        const int remaining = config.replan_budget - out.trace.replans;
        if (remaining <= 0) {
            out.degraded = true;
            break;
        }
        auto next = agent::replan(plan, feedback, remaining, backend, &integrated);
        ++out.trace.planner_calls;
        if (!next || (*next == plan && only_empty(out.results, feedback))) {
            out.degraded = true;
            break;
        }
        ++out.trace.replans;
        options.reuse = reusable(plan, *next, out.results, feedback);
        plan = std::move(*next);
        if (observer && observer->on_plan) observer->on_plan(plan, out.trace.replans);
    }
    out.plan = std::move(plan);
    out.response = render_response(out.results, graph, out.degraded);
    finish();
    return out;
}

}  // namespace jobrec::exec
