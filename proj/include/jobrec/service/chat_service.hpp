#pragma once

#include "jobrec/exec/default_tools.hpp"
#include "jobrec/exec/orchestrator.hpp"
#include "jobrec/lm/backend.hpp"
#include "jobrec/service/cache.hpp"
#include "jobrec/service/stores.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace jobrec::service {

inline constexpr int kEventSchemaVersion = 1;

struct ServiceConfig {
    std::int64_t cache_ttl_s = 3600;  // 0 disables the cache
    int replan_budget = agent::kDefaultReplanBudget;
    exec::Variant variant = exec::Variant::Adapt;
    // lm.*: an empty endpoint selects the stub backend.
    std::string lm_endpoint;
    int lm_timeout_ms = 10000;
    lm::SimulatedLatency stub_latency;
    std::string stub_rules;  // defaults to the shipped rule table
    // tools.*
    tools::ScoringWeights weights;
    tools::RecommendOptions recommend;
    tools::GrowthOptions growth;
    int tool_timeout_ms = 10000;
    // Characters per token_chunk event.
    std::size_t chunk_chars = 24;

    // Keys: cache.ttl_s, replan.budget, agent.variant, lm.{endpoint,
    // timeout_ms, stub_latency_ms, stub_ms_per_input_token,
    // stub_ms_per_token, rules}, tools.{k, include_current_title,
    // per_title_limit, timeout_ms, weights}, stream.chunk_chars. Throws ConfigInvalid on unknown keys or bad values.
    static ServiceConfig from_json(const nlohmann::json& j);
    static ServiceConfig load_file(const std::string& path);
};

// Backend selected by the lm.* keys; the stub's gazetteer comes from `graph`.
std::shared_ptr<const lm::LmBackend> make_backend(const ServiceConfig& config, const kgraph::KnowledgeGraph& graph);

struct ServiceDeps {
    std::shared_ptr<const kgraph::KnowledgeGraph> graph;
    std::shared_ptr<const tools::ApplicationStore> applications;
    std::shared_ptr<const lm::LmBackend> backend;
    std::shared_ptr<const ProfileClient> profiles;
    std::shared_ptr<ConversationStore> conversations;
    std::shared_ptr<MessageBus> bus;  // optional; events go to topic "session/<id>"
    ClockMs clock = system_clock_ms;
};

struct SessionSnapshot {
    std::string id;
    std::string user;
    agent::History turns;
    tools::InterestState interest;
    std::int64_t created_ms = 0;
};

// Event frame: {"v":1,"seq":n,"type":t,"payload":{...}}. Types: route,
// plan_trace, tool_trace, token_chunk, final, error.
using EventSink = std::function<void(const nlohmann::json&)>;

class ChatService {
public:
    ChatService(ServiceConfig config, ServiceDeps deps, exec::ToolRegistry registry = exec::default_tool_registry());
    ~ChatService();

    ChatService(const ChatService&) = delete;
    ChatService& operator=(const ChatService&) = delete;

    // Throws ProfileNotFound, StoreUnavailable.
    SessionSnapshot open_session(const std::string& user);
    // Throws SessionNotFound.
    SessionSnapshot snapshot(const std::string& session) const;

    // Runs one turn. Every event is passed to `sink` as it happens and also
    // returned. Failures become a terminal error event; only an unknown
    // session throws (SessionNotFound).
    std::vector<nlohmann::json> post_message(const std::string& session, const std::string& text,
                                             const EventSink& sink = {});

    // Throws SessionNotFound, NodeNotFound, WrongLabel.
    tools::InterestState interact(const std::string& session, const std::string& opening,
                                  tools::InteractionKind kind);

    const ServiceConfig& config() const noexcept { return config_; }
    const ResponseCache& cache() const noexcept { return cache_; }

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;

    ServiceConfig config_;
    ServiceDeps deps_;
    exec::ToolRegistry registry_;
    exec::ToolEnvironment env_;
    ResponseCache cache_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::size_t next_session_ = 1;
};

// Checks the event-order contract: route first, one terminal event last,
// strictly increasing seq. Returns an empty string or the first violation.
std::string check_event_order(const std::vector<nlohmann::json>& events);

}  // namespace jobrec::service
