#include "jobrec/agent/types.hpp"

#include "jobrec/error.hpp"

#include <charconv>

namespace jobrec::agent {

using nlohmann::json;

std::string_view to_string(ToolHint hint) noexcept {
    switch (hint) {
        case ToolHint::JobRecommend: return "job_recommend";
        case ToolHint::CareerPath: return "career_path";
        case ToolHint::CareerGrowth: return "career_growth";
        case ToolHint::SkillGap: return "skill_gap";
        case ToolHint::LearningResources: return "learning_resources";
        case ToolHint::Mentor: return "mentor";
        case ToolHint::GraphTemplate: return "graph_template";
        case ToolHint::TextToQuery: return "text_to_query";
        case ToolHint::ApplicationStatus: return "application_status";
        case ToolHint::Compare: return "compare";
    }
    return "?";
}

std::optional<ToolHint> parse_tool_hint(std::string_view text) {
    for (auto h : kAllToolHints) {
        if (to_string(h) == text) return h;
    }
    return std::nullopt;
}

std::string_view to_string(Role role) noexcept { return role == Role::User ? "user" : "assistant"; }

std::string to_string(TaskIndex index) {
    return std::to_string(index.group) + "." + std::to_string(index.position);
}

std::size_t Plan::task_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
}

std::optional<TaskIndex> parse_ref(std::string_view value) {
    constexpr std::string_view prefix = "$ref:";
    if (value.substr(0, prefix.size()) != prefix) return std::nullopt;
    value.remove_prefix(prefix.size());
    const auto dot = value.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    TaskIndex idx;
    const char* g_end = value.data() + dot;
    auto g = std::from_chars(value.data(), g_end, idx.group);
    if (g.ec != std::errc{} || g.ptr != g_end || dot == 0) return std::nullopt;
    const char* p_begin = value.data() + dot + 1;
    const char* p_end = value.data() + value.size();
    auto p = std::from_chars(p_begin, p_end, idx.position);
    if (p.ec != std::errc{} || p.ptr != p_end || p_begin == p_end) return std::nullopt;
    return idx;
}

std::string make_ref(TaskIndex index) { return "$ref:" + to_string(index); }

json to_json(const UserProfile& p) {
    return json{{"user", p.user_id},   {"current_title", p.current_title}, {"skills", p.skills},
                {"location", p.location}, {"region", p.region},             {"education", p.education},
                {"interests", p.interests}};
}

UserProfile profile_from_json(const json& j) {
    UserProfile p;
    try {
        p.user_id = j.at("user").get<std::string>();
        p.current_title = j.value("current_title", std::string{});
        p.skills = j.value("skills", std::set<std::string>{});
        p.location = j.value("location", std::string{});
        p.region = j.value("region", std::string{});
        p.education = j.value("education", 0);
        p.interests = j.value("interests", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed profile: ") + e.what());
    }
    return p;
}

json to_json(const ChatTurn& t) {
    return json{{"role", to_string(t.role)}, {"text", t.text}, {"ts", t.timestamp_ms}};
}

ChatTurn turn_from_json(const json& j) {
    ChatTurn t;
    try {
        t.role = j.at("role").get<std::string>() == "assistant" ? Role::Assistant : Role::User;
        t.text = j.at("text").get<std::string>();
        t.timestamp_ms = j.at("ts").get<std::int64_t>();
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed chat turn: ") + e.what());
    }
    return t;
}

}  // namespace jobrec::agent
