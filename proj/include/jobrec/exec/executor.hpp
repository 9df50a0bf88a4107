#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/kgraph/graph.hpp"
#include "jobrec/lm/backend.hpp"
#include "jobrec/tools/applications.hpp"
#include "jobrec/tools/career.hpp"
#include "jobrec/tools/scoring.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace jobrec::exec {

using nlohmann::json;
using agent::TaskIndex;

enum class ToolStatus { Ok, Empty, Error };
std::string_view to_string(ToolStatus status) noexcept;

struct ToolResult {
    TaskIndex index;
    agent::ToolHint tool = agent::ToolHint::JobRecommend;
    json payload;  // null unless status == Ok
    ToolStatus status = ToolStatus::Empty;
    std::string error;
    double elapsed_ms = 0.0;
    bool cached = false;
};

// Long-lived, read-only dependencies shared by every tool call.
struct ToolEnvironment {
    std::shared_ptr<const kgraph::KnowledgeGraph> graph;
    std::shared_ptr<const tools::ApplicationStore> applications;
    std::shared_ptr<const lm::LmBackend> backend;
    tools::ScoringWeights weights;
    tools::RecommendOptions recommend;
    tools::GrowthOptions growth;
};

// Everything a tool sees. Copied into each call so that a call outliving its
// deadline never dangles.
struct ToolContext {
    ToolEnvironment env;
    agent::UserProfile profile;
    tools::InterestState interest;
    std::string query;
    std::shared_ptr<const std::map<TaskIndex, json>> prior;

    // "$ref:G.P" yields that sub-task's payload (InvalidArgument if it has
    // none); any other value comes back as a JSON string.
    json resolve(const std::string& value) const;
};

using Tool = std::function<json(const agent::Args&, const ToolContext&)>;

class ToolRegistry {
public:
    void add(agent::ToolHint hint, Tool tool);
    const Tool* find(agent::ToolHint hint) const;
    bool contains(agent::ToolHint hint) const { return find(hint) != nullptr; }

private:
    std::map<agent::ToolHint, Tool> tools_;
};

struct SubtaskTrace {
    TaskIndex index;
    agent::ToolHint tool = agent::ToolHint::JobRecommend;
    ToolStatus status = ToolStatus::Empty;
    double start_ms = 0.0;  // relative to the trace origin
    double end_ms = 0.0;
    double elapsed_ms = 0.0;
    bool cached = false;
};

struct GroupTrace {
    std::vector<SubtaskTrace> subtasks;
    double wall_ms = 0.0;
};

struct ExecutionTrace {
    std::vector<GroupTrace> groups;
    double total_ms = 0.0;
    int replans = 0;
    int classifier_calls = 0;
    int memory_calls = 0;
    int planner_calls = 0;

    std::size_t tool_calls() const;
    // {groups:[{subtasks:[{tool,status,elapsed_ms}],wall_ms}], total_ms, replans}
    json to_json() const;
};

enum class ExecutionMode { Concurrent, Sequential };

struct ExecuteOptions {
    ExecutionMode mode = ExecutionMode::Concurrent;
    std::chrono::milliseconds timeout{10000};
    // Results carried over from an earlier round; these sub-tasks are not run.
    std::map<TaskIndex, ToolResult> reuse;
    // Called as each result materialises.
    std::function<void(const ToolResult&)> on_result;
    // Trace timestamps are measured from here.
    std::chrono::steady_clock::time_point origin = std::chrono::steady_clock::now();
};

struct ExecutionOutcome {
    std::vector<ToolResult> results;  // plan order
    ExecutionTrace trace;
};

ToolStatus classify_payload(const json& payload);

// Groups run in order. In concurrent mode every member of a group is started
// before any is awaited. A throwing or overdue tool yields status=Error on its
// own result only. Throws ToolNotRegistered before running anything.
ExecutionOutcome execute_plan(const agent::Plan& plan, const ToolRegistry& registry, const ToolContext& context,
                              const ExecuteOptions& options = {});

// Every sub-task must be ok with a non-empty payload. A remote backend may
// flip the verdict to insufficient, never the reverse.
agent::Feedback assess_sufficiency(const std::vector<ToolResult>& results, const agent::IntegratedQuery& integrated,
                                   const lm::LmBackend* backend);

}  // namespace jobrec::exec
