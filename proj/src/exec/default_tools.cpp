#include "jobrec/exec/default_tools.hpp"

#include "jobrec/error.hpp"
#include "jobrec/kgraph/templates.hpp"
#include "jobrec/tools/query_tools.hpp"

#include <charconv>
#include <sstream>

namespace jobrec::exec {

namespace {

using agent::Args;
using agent::ToolHint;

const kgraph::KnowledgeGraph& graph_of(const ToolContext& ctx) {
    if (!ctx.env.graph) throw Error(Errc::ContractViolation, "tool context has no graph");
    return *ctx.env.graph;
}

std::string arg_or(const Args& args, const std::string& key, const std::string& fallback = {}) {
    auto it = args.find(key);
    return it == args.end() ? fallback : it->second;
}

const std::string& required(const Args& args, const std::string& key) {
    auto it = args.find(key);
    if (it == args.end() || it->second.empty()) throw Error(Errc::MissingParameter, "argument '" + key + "'");
    return it->second;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
}

std::size_t parse_count(const std::string& text, const std::string& name) {
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || value == 0) {
        throw Error(Errc::InvalidArgument, "argument '" + name + "' must be a positive integer, got '" + text + "'");
    }
    return value;
}

json job_recommend(const Args& args, const ToolContext& ctx) {
    const auto& g = graph_of(ctx);
    auto options = ctx.env.recommend;
    if (auto t = arg_or(args, "title"); !t.empty()) options.title = title_from(ctx.resolve(t), g);
    options.city = arg_or(args, "city", options.city);
    options.family = arg_or(args, "family", options.family);
    if (auto k = arg_or(args, "k"); !k.empty()) options.k = parse_count(k, "k");
    json out = json::array();
    for (const auto& s : tools::recommend_jobs(ctx.profile, ctx.interest, g, ctx.env.weights, options)) {
        auto j = tools::to_json(s);
        j["title_name"] = g.node(s.title).string_or("title", s.title);
        out.push_back(std::move(j));
    }
    return out;
}

json career_path(const Args& args, const ToolContext& ctx) {
    const auto& g = graph_of(ctx);
    const auto dest = title_from(ctx.resolve(required(args, "destination")), g);
    return tools::to_json(tools::career_path_to(ctx.profile, dest, g), g);
}

json career_growth(const Args& args, const ToolContext& ctx) {
    const auto& g = graph_of(ctx);
    auto options = ctx.env.growth;
    if (auto t = arg_or(args, "title"); !t.empty()) options.start_title = title_from(ctx.resolve(t), g);
    json out = json::array();
    for (const auto& p : tools::career_growth(ctx.profile, ctx.interest, g, ctx.env.weights, options)) {
        out.push_back(tools::to_json(p, g));
    }
    return out;
}

json skill_gap(const Args& args, const ToolContext& ctx) {
    const auto& g = graph_of(ctx);
    const auto& title = g.node(title_from(ctx.resolve(required(args, "target")), g));
    return {{"title", title.id},
            {"title_name", title.string_or("title", title.id)},
            {"missing", kgraph::skill_gap(g, ctx.profile.skills, title)}};
}

json learning_resources(const Args& args, const ToolContext& ctx) {
    const auto gap = skills_from(ctx.resolve(required(args, "gap")));
    // Nothing to learn is a complete answer, not an empty one.
    if (gap.empty()) return {{"gap", json::array()}, {"resources", json::array()}};
    return kgraph::execute_template(graph_of(ctx), "learning_resources", {{"skills", join(gap)}});
}

json mentor(const Args& args, const ToolContext& ctx) {
    const auto& g = graph_of(ctx);
    std::string target;
    if (auto t = arg_or(args, "target"); !t.empty()) target = title_from(ctx.resolve(t), g);
    auto skills = skills_from(ctx.resolve(required(args, "gap")));
    if (skills.empty() && !target.empty()) {
        for (const auto& s : kgraph::required_skills(g, g.node(target))) skills.push_back(s);
    }
    return kgraph::execute_template(g, "mentors_for_skills", {{"skills", join(skills)}, {"title", target}});
}

json graph_template(const Args& args, const ToolContext& ctx) {
    agent::SubTask task{"", ToolHint::GraphTemplate, {}};
    for (const auto& [k, v] : args) {
        const json resolved = ctx.resolve(v);
        task.args[k] = resolved.is_string() ? resolved.get<std::string>() : title_from(resolved, graph_of(ctx));
    }
    auto call = tools::select_and_fill_template(task, graph_of(ctx));
    if (call.rows.empty()) return nullptr;
    return tools::to_json(call);
}

json text_to_query(const Args& args, const ToolContext& ctx) {
    if (!ctx.env.backend) throw Error(Errc::ContractViolation, "text_to_query needs a model backend");
    auto text = arg_or(args, "text", ctx.query);
    if (text.empty()) text = ctx.query;
    auto call = tools::text_to_query(text, kgraph::schema_description(), *ctx.env.backend, graph_of(ctx));
    if (call.rows.empty()) return nullptr;
    return tools::to_json(call);
}

json application_status(const Args&, const ToolContext& ctx) {
    if (!ctx.env.applications) throw Error(Errc::NoApplications, "no application store");
    return tools::to_json(ctx.env.applications->latest(ctx.profile.user_id));
}

json count_of(const json& payload) {
    // A template call for openings_count_by_title_city.
    if (payload.is_object() && payload.contains("rows") && !payload["rows"].empty()) {
        const auto& row = payload["rows"][0];
        if (row.contains("count")) {
            return {{"label", row.value("city", std::string{})},
                    {"title", row.value("title", std::string{})},
                    {"count", row["count"]}};
        }
    }
    if (payload.is_array()) return {{"label", ""}, {"title", ""}, {"count", payload.size()}};
    throw Error(Errc::InvalidArgument, "compare operand carries no count");
}

json compare(const Args& args, const ToolContext& ctx) {
    const auto left = count_of(ctx.resolve(required(args, "left")));
    const auto right = count_of(ctx.resolve(required(args, "right")));
    const auto l = left["count"].get<std::int64_t>();
    const auto r = right["count"].get<std::int64_t>();
    std::string winner = l > r ? left["label"].get<std::string>() : r > l ? right["label"].get<std::string>() : "";
    return {{"left", left}, {"right", right}, {"winner", winner}, {"tie", l == r}};
}

}  // namespace

std::string title_from(const json& value, const kgraph::KnowledgeGraph& graph) {
    if (value.is_string()) return kgraph::resolve_title(graph, value.get<std::string>()).id;
    if (value.is_array() && !value.empty()) return title_from(value[0], graph);
    if (value.is_object()) {
        if (value.contains("titles") && value["titles"].is_array() && !value["titles"].empty()) {
            const auto& titles = value["titles"];
            const auto& step = titles.size() > 1 ? titles[1] : titles[0];
            return step.is_object() ? step.at("id").get<std::string>() : step.get<std::string>();
        }
        if (value.contains("title") && value["title"].is_string()) {
            return kgraph::resolve_title(graph, value["title"].get<std::string>()).id;
        }
    }
    throw Error(Errc::InvalidArgument, "cannot derive a job title from " + value.dump());
}

std::vector<std::string> skills_from(const json& value) {
    std::vector<std::string> out;
    if (value.is_object() && value.contains("missing")) {
        for (const auto& s : value["missing"]) out.push_back(s.get<std::string>());
    } else if (value.is_array()) {
        for (const auto& row : value) {
            if (row.is_string()) out.push_back(row.get<std::string>());
            else if (row.is_object() && row.contains("skill")) out.push_back(row["skill"].get<std::string>());
        }
    } else if (value.is_string()) {
        std::stringstream ss(value.get<std::string>());
        for (std::string item; std::getline(ss, item, ',');) {
            auto b = item.find_first_not_of(' ');
            if (b != std::string::npos) out.push_back(kgraph::lowercase(item.substr(b, item.find_last_not_of(' ') - b + 1)));
        }
    } else {
        throw Error(Errc::InvalidArgument, "cannot derive skills from " + value.dump());
    }
    return out;
}

ToolRegistry default_tool_registry() {
    ToolRegistry r;
    r.add(ToolHint::JobRecommend, job_recommend);
    r.add(ToolHint::CareerPath, career_path);
    r.add(ToolHint::CareerGrowth, career_growth);
    r.add(ToolHint::SkillGap, skill_gap);
    r.add(ToolHint::LearningResources, learning_resources);
    r.add(ToolHint::Mentor, mentor);
    r.add(ToolHint::GraphTemplate, graph_template);
    r.add(ToolHint::TextToQuery, text_to_query);
    r.add(ToolHint::ApplicationStatus, application_status);
    r.add(ToolHint::Compare, compare);
    return r;
}

}  // namespace jobrec::exec
