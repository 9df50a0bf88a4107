#pragma once

#include "jobrec/agent/agent.hpp"
#include "jobrec/exec/executor.hpp"

#include <optional>

namespace jobrec::exec {

enum class Variant {
    Adapt,        // router, memory, concurrent groups
    AlwaysPlan,   // no router
    PlanExecute,  // no router, sequential execution
    ReactLike,    // no router, no memory selection, sequential
    RagLike,      // one retrieval call, no planning
};

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view text);

struct OrchestratorConfig {
    Variant variant = Variant::Adapt;
    int replan_budget = agent::kDefaultReplanBudget;
    std::chrono::milliseconds tool_timeout{10000};
};

struct SessionState {
    agent::History history;
    agent::UserProfile profile;
    tools::InterestState interest;
};

// Simple-path result cache, supplied by the service layer. Implementations
// decide which tools are cacheable.
class SimpleCache {
public:
    virtual ~SimpleCache() = default;
    virtual std::optional<json> lookup(const std::string& query, const agent::UserProfile& profile,
                                       agent::ToolHint tool) = 0;
    virtual void store(const std::string& query, const agent::UserProfile& profile, agent::ToolHint tool,
                       const json& payload) = 0;
};

struct Observer {
    std::function<void(const agent::Complexity&)> on_route;
    std::function<void(const agent::Plan&, int round)> on_plan;
    std::function<void(const ToolResult&)> on_tool;
};

struct OrchestrationResult {
    std::string response;
    agent::Verdict route = agent::Verdict::Complex;
    bool degraded = false;
    std::optional<agent::Plan> plan;  // last plan executed, complex path only
    std::vector<ToolResult> results;
    ExecutionTrace trace;
};

// Answers one user turn. History is not modified; the caller appends turns.
OrchestrationResult orchestrate(const std::string& query, const SessionState& session, const ToolEnvironment& env,
                                const ToolRegistry& registry, const OrchestratorConfig& config = {},
                                const Observer* observer = nullptr, SimpleCache* cache = nullptr);

// Deterministic text rendering of tool payloads.
std::string render_result(const ToolResult& result, const kgraph::KnowledgeGraph& graph);
std::string render_response(const std::vector<ToolResult>& results, const kgraph::KnowledgeGraph& graph,
                            bool degraded);

}  // namespace jobrec::exec
