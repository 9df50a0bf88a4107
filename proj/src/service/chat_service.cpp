#include "jobrec/service/chat_service.hpp"

#include "jobrec/error.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <set>

namespace jobrec::service {

using nlohmann::json;

namespace {

void reject_unknown(const json& section, const std::set<std::string>& known, const std::string& where) {
    if (!section.is_object()) throw Error(Errc::ConfigInvalid, where + " must be an object");
    for (const auto& [k, v] : section.items()) {
        if (!known.count(k)) throw Error(Errc::ConfigInvalid, "unknown key " + where + (where.empty() ? "" : ".") + k);
    }
}

template <typename T>
T number(const json& section, const char* key, T fallback, T min_value) {
    if (!section.contains(key)) return fallback;
    const auto& v = section[key];
    if (!v.is_number()) throw Error(Errc::ConfigInvalid, std::string(key) + " must be a number");
    const T out = v.get<T>();
    if (out < min_value) throw Error(Errc::ConfigInvalid, std::string(key) + " is out of range");
    return out;
}

// Splits on character boundaries so that no UTF-8 sequence is cut.
std::vector<std::string> chunk_text(const std::string& text, std::size_t size) {
    std::vector<std::string> out;
    std::size_t at = 0;
    while (at < text.size()) {
        std::size_t end = std::min(text.size(), at + std::max<std::size_t>(1, size));
        while (end < text.size() && (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) ++end;
        out.push_back(text.substr(at, end - at));
        at = end;
    }
    return out;
}

json plan_payload(const agent::Plan& plan, int round) {
    json groups = json::array();
    for (const auto& g : plan.groups) {
        json members = json::array();
        for (const auto& t : g) {
            members.push_back({{"description", t.description}, {"tool", agent::to_string(t.tool)}, {"args", t.args}});
        }
        groups.push_back(std::move(members));
    }
    return {{"round", round}, {"groups", std::move(groups)}};
}

json tool_payload(const exec::ToolResult& r) {
    json j{{"group", r.index.group},
           {"position", r.index.position},
           {"tool", agent::to_string(r.tool)},
           {"status", exec::to_string(r.status)},
           {"elapsed_ms", r.elapsed_ms},
           {"cached", r.cached}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const json& j) {
    ServiceConfig c;
    reject_unknown(j, {"cache", "replan", "agent", "lm", "tools", "stream"}, "");
    if (j.contains("cache")) {
        reject_unknown(j["cache"], {"ttl_s"}, "cache");
        c.cache_ttl_s = number<std::int64_t>(j["cache"], "ttl_s", c.cache_ttl_s, 0);
    }
    if (j.contains("replan")) {
        reject_unknown(j["replan"], {"budget"}, "replan");
        c.replan_budget = number<int>(j["replan"], "budget", c.replan_budget, 0);
    }
    if (j.contains("agent")) {
        reject_unknown(j["agent"], {"variant"}, "agent");
        if (j["agent"].contains("variant")) c.variant = exec::parse_variant(j["agent"]["variant"].get<std::string>());
    }
    if (j.contains("lm")) {
        const auto& lm = j["lm"];
        reject_unknown(lm,
                       {"endpoint", "timeout_ms", "stub_latency_ms", "stub_ms_per_input_token", "stub_ms_per_token",
                        "rules"},
                       "lm");
        c.lm_endpoint = lm.value("endpoint", c.lm_endpoint);
        c.lm_timeout_ms = number<int>(lm, "timeout_ms", c.lm_timeout_ms, 1);
        c.stub_latency.per_call_ms = number<double>(lm, "stub_latency_ms", 0.0, 0.0);
        c.stub_latency.per_input_token_ms = number<double>(lm, "stub_ms_per_input_token", 0.0, 0.0);
        c.stub_latency.per_token_ms = number<double>(lm, "stub_ms_per_token", 0.0, 0.0);
        c.stub_rules = lm.value("rules", c.stub_rules);
    }
    if (j.contains("tools")) {
        const auto& t = j["tools"];
        reject_unknown(t, {"k", "include_current_title", "per_title_limit", "timeout_ms", "weights"}, "tools");
        c.recommend.k = number<std::size_t>(t, "k", c.recommend.k, 1);
        c.recommend.include_current_title = t.value("include_current_title", c.recommend.include_current_title);
        c.recommend.per_title_limit = number<std::size_t>(t, "per_title_limit", c.recommend.per_title_limit, 1);
        c.tool_timeout_ms = number<int>(t, "timeout_ms", c.tool_timeout_ms, 1);
        if (t.contains("weights")) {
            try {
                c.weights = tools::weights_from_json(t["weights"]);
                c.weights.validate();
            } catch (const Error& e) {
                throw Error(Errc::ConfigInvalid, std::string("tools.weights: ") + e.what());
            }
        }
    }
    if (j.contains("stream")) {
        reject_unknown(j["stream"], {"chunk_chars"}, "stream");
        c.chunk_chars = number<std::size_t>(j["stream"], "chunk_chars", c.chunk_chars, 1);
    }
    return c;
}

ServiceConfig ServiceConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigInvalid, "cannot open config " + path);
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigInvalid, "config " + path + ": " + e.what());
    }
}

std::shared_ptr<const lm::LmBackend> make_backend(const ServiceConfig& config, const kgraph::KnowledgeGraph& graph) {
    if (!config.lm_endpoint.empty()) {
        return std::make_shared<const lm::RemoteBackend>(lm::RemoteConfig{config.lm_endpoint, config.lm_timeout_ms});
    }
    const auto rules = config.stub_rules.empty() ? lm::default_rule_table_path() : config.stub_rules;
    return std::make_shared<const lm::StubBackend>(lm::RuleTable::load_file(rules), lm::Gazetteer::from_graph(graph),
                                                   lm::PromptRegistry::builtin(), config.stub_latency);
}

struct ChatService::Session {
    std::mutex mutex;
    std::string id;
    std::string user;
    agent::UserProfile profile;
    agent::History turns;
    tools::InterestState interest;
    std::int64_t created_ms = 0;
};

ChatService::ChatService(ServiceConfig config, ServiceDeps deps, exec::ToolRegistry registry)
    : config_(std::move(config)), deps_(std::move(deps)), registry_(std::move(registry)), cache_(deps_.clock) {
    if (!deps_.graph || !deps_.backend || !deps_.profiles || !deps_.conversations) {
        throw Error(Errc::ContractViolation, "service needs a graph, a backend, a profile client and a store");
    }
    env_.graph = deps_.graph;
    env_.applications = deps_.applications ? deps_.applications : std::make_shared<const tools::ApplicationStore>();
    env_.backend = deps_.backend;
    env_.weights = config_.weights;
    env_.recommend = config_.recommend;
    env_.growth = config_.growth;
}

ChatService::~ChatService() = default;

std::shared_ptr<ChatService::Session> ChatService::find(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(Errc::SessionNotFound, "no session " + id);
    return it->second;
}

SessionSnapshot ChatService::open_session(const std::string& user) {
    auto s = std::make_shared<Session>();
    s->profile = deps_.profiles->fetch(user);
    s->turns = deps_.conversations->load(user);
    s->user = user;
    s->created_ms = deps_.clock();
    {
        std::lock_guard lock(sessions_mutex_);
        s->id = "s" + std::to_string(next_session_++);
        sessions_[s->id] = s;
    }
    spdlog::debug("session {} opened for {} with {} turns", s->id, user, s->turns.size());
    return {s->id, s->user, s->turns, s->interest, s->created_ms};
}

SessionSnapshot ChatService::snapshot(const std::string& id) const {
    auto s = find(id);
    std::lock_guard lock(s->mutex);
    return {s->id, s->user, s->turns, s->interest, s->created_ms};
}

std::vector<json> ChatService::post_message(const std::string& id, const std::string& text, const EventSink& sink) {
    auto s = find(id);
    std::lock_guard lock(s->mutex);

    std::vector<json> events;
    int seq = 0;
    bool routed = false;
    auto emit = [&](const char* type, json payload) {
        json e{{"v", kEventSchemaVersion}, {"seq", ++seq}, {"type", type}, {"payload", std::move(payload)}};
        events.push_back(e);
        if (sink) sink(e);
        if (deps_.bus) deps_.bus->publish("session/" + s->id, e);
    };
    auto route = [&](json payload) {
        if (routed) return;
        routed = true;
        emit("route", std::move(payload));
    };
    auto fail = [&](std::string_view code, const std::string& message) {
        route({{"verdict", nullptr}});
        emit("error", {{"code", code}, {"message", message}});
    };

    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        fail(errc_name(Errc::EmptyQuery), "message is blank");
        return events;
    }

    const exec::SessionState state{s->turns, s->profile, s->interest};
    exec::OrchestratorConfig oc{config_.variant, config_.replan_budget,
                                std::chrono::milliseconds(config_.tool_timeout_ms)};
    if (config_.variant != exec::Variant::Adapt) {
        route({{"verdict", config_.variant == exec::Variant::RagLike ? "simple" : "complex"}, {"classified", false}});
    }
    exec::Observer observer;
    observer.on_route = [&](const agent::Complexity& c) {
        json p{{"verdict", c.verdict == agent::Verdict::Simple ? "simple" : "complex"},
               {"classified", true},
               {"fallback", c.fallback}};
        if (c.verdict == agent::Verdict::Simple) p["tool"] = agent::to_string(c.tool);
        route(std::move(p));
    };
    observer.on_plan = [&](const agent::Plan& plan, int round) { emit("plan_trace", plan_payload(plan, round)); };
    observer.on_tool = [&](const exec::ToolResult& r) { emit("tool_trace", tool_payload(r)); };

    SimplePathCache simple_cache(cache_, config_.cache_ttl_s * 1000);
    exec::OrchestrationResult result;
    try {
        result = exec::orchestrate(text, state, env_, registry_, oc, &observer, &simple_cache);
    } catch (const Error& e) {
        fail(errc_name(e.code()), e.what());
        return events;
    } catch (const std::exception& e) {
        fail("Internal", e.what());
        return events;
    }

    for (auto& chunk : chunk_text(result.response, config_.chunk_chars)) emit("token_chunk", {{"text", chunk}});

    const auto now = std::max(deps_.clock(), s->turns.empty() ? std::int64_t{0} : s->turns.back().timestamp_ms);
    const agent::ChatTurn user_turn{agent::Role::User, text, now};
    const agent::ChatTurn reply{agent::Role::Assistant, result.response, now};
    try {
        deps_.conversations->append(s->user, user_turn);
        deps_.conversations->append(s->user, reply);
    } catch (const Error& e) {
        emit("error", {{"code", errc_name(e.code())}, {"message", e.what()}});
        return events;
    }
    s->turns.push_back(user_turn);
    s->turns.push_back(reply);

    bool cached = false;
    for (const auto& r : result.results) cached = cached || r.cached;
    emit("final", {{"text", result.response},
                   {"route", result.route == agent::Verdict::Simple ? "simple" : "complex"},
                   {"degraded", result.degraded},
                   {"cached", cached},
                   {"tool_calls", result.trace.tool_calls()},
                   {"planner_calls", result.trace.planner_calls},
                   {"trace", result.trace.to_json()}});
    return events;
}

tools::InterestState ChatService::interact(const std::string& id, const std::string& opening,
                                           tools::InteractionKind kind) {
    auto s = find(id);
    const auto& node = deps_.graph->node(opening);
    if (node.label != kgraph::Label::Opening) throw Error(Errc::WrongLabel, opening + " is not an opening");
    auto family = node.string_or("job_family");
    if (family.empty()) {
        if (const auto* t = tools::title_of_opening(*deps_.graph, node)) family = t->string_or("job_family");
    }
    if (family.empty()) throw Error(Errc::NodeNotFound, opening + " has no job family");
    std::lock_guard lock(s->mutex);
    s->interest.record(family, kind);
    return s->interest;
}

std::string check_event_order(const std::vector<json>& events) {
    if (events.empty()) return "no events";
    if (events.front().value("type", "") != "route") return "first event is not route";
    std::int64_t last = 0;
    std::size_t terminals = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.value("v", 0) != kEventSchemaVersion) return "bad schema version at " + std::to_string(i);
        const auto seq = e.value("seq", std::int64_t{0});
        if (seq <= last) return "seq not increasing at " + std::to_string(i);
        last = seq;
        const auto type = e.value("type", "");
        if (type == "route" && i > 0) return "second route event at " + std::to_string(i);
        if (type == "final" || type == "error") {
            ++terminals;
            if (i + 1 != events.size()) return "terminal event before the end";
        }
    }
    return terminals == 1 ? "" : "missing terminal event";
}

}  // namespace jobrec::service
