#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace jobrec::agent {

enum class Role { User, Assistant };

struct ChatTurn {
    Role role = Role::User;
    std::string text;
    std::int64_t timestamp_ms = 0;

    bool operator==(const ChatTurn&) const = default;
};

using History = std::vector<ChatTurn>;

struct UserProfile {
    std::string user_id;
    std::string current_title;  // JobTitle node id
    std::set<std::string> skills;
    std::string location;
    std::string region;
    int education = 0;  // ordinal, 0..kEducationScaleMax
    std::vector<std::string> interests;

    bool operator==(const UserProfile&) const = default;
};

inline constexpr int kEducationScaleMax = 4;

enum class Verdict { Simple, Complex };

enum class ToolHint {
    JobRecommend,
    CareerPath,
    CareerGrowth,
    SkillGap,
    LearningResources,
    Mentor,
    GraphTemplate,
    TextToQuery,
    ApplicationStatus,
    Compare,
};

inline constexpr ToolHint kAllToolHints[] = {
    ToolHint::JobRecommend,      ToolHint::CareerPath, ToolHint::CareerGrowth,  ToolHint::SkillGap,
    ToolHint::LearningResources, ToolHint::Mentor,     ToolHint::GraphTemplate, ToolHint::TextToQuery,
    ToolHint::ApplicationStatus, ToolHint::Compare,
};

std::string_view to_string(ToolHint hint) noexcept;
std::optional<ToolHint> parse_tool_hint(std::string_view text);
std::string_view to_string(Role role) noexcept;

using Args = std::map<std::string, std::string>;

struct Complexity {
    Verdict verdict = Verdict::Complex;
    // Simple path only: recent history followed by the query.
    std::string merged_context;
    // Simple path only: the tool selected for the direct call.
    ToolHint tool = ToolHint::JobRecommend;
    Args args;
    // True when the classifier output was unusable and Complex was assumed.
    bool fallback = false;
};

struct IntegratedQuery {
    std::string text;
    std::vector<std::size_t> source_turn_indices;
    std::string original_query;
};

struct SubTask {
    std::string description;
    ToolHint tool = ToolHint::JobRecommend;
    Args args;

    bool operator==(const SubTask&) const = default;
};

// Position of a sub-task inside a plan.
struct TaskIndex {
    std::size_t group = 0;
    std::size_t position = 0;

    auto operator<=>(const TaskIndex&) const = default;
};

std::string to_string(TaskIndex index);

// Groups run in order; members of one group run concurrently and never
// reference each other's output.
struct Plan {
    std::vector<std::vector<SubTask>> groups;

    std::size_t task_count() const;
    bool operator==(const Plan&) const = default;
};

enum class SufficiencyVerdict { Sufficient, Insufficient };

struct Feedback {
    SufficiencyVerdict verdict = SufficiencyVerdict::Sufficient;
    std::vector<std::pair<TaskIndex, std::string>> failing;
};

// "$ref:G.P" argument values point at the output of an earlier sub-task.
std::optional<TaskIndex> parse_ref(std::string_view value);
std::string make_ref(TaskIndex index);

nlohmann::json to_json(const UserProfile& profile);
UserProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChatTurn& turn);
ChatTurn turn_from_json(const nlohmann::json& j);

}  // namespace jobrec::agent
