#include "test_helpers.hpp"

#include "jobrec/bench/demo_world.hpp"
#include "jobrec/service/cache.hpp"
#include "jobrec/service/chat_service.hpp"
#include "jobrec/service/http_api.hpp"
#include "jobrec/service/stores.hpp"

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

using namespace jobrec;
using namespace jobrec::service;
using nlohmann::json;

namespace {

struct ManualClock {
    std::shared_ptr<std::atomic<std::int64_t>> now = std::make_shared<std::atomic<std::int64_t>>(1000);
    ClockMs fn() const {
        auto n = now;
        return [n] { return n->load(); };
    }
    void advance(std::int64_t ms) const { *now += ms; }
};

ServiceDeps demo_deps(std::shared_ptr<ConversationStore> store = nullptr, ClockMs clock = system_clock_ms) {
    ServiceDeps d;
    d.graph = std::make_shared<const kgraph::KnowledgeGraph>(bench::demo_world());
    d.applications = std::make_shared<const tools::ApplicationStore>(bench::demo_applications());
    d.backend = make_backend({}, *d.graph);
    d.profiles = std::make_shared<const InMemoryProfileClient>(bench::demo_profiles());
    d.conversations = store ? store : std::make_shared<InMemoryConversationStore>();
    d.bus = std::make_shared<MessageBus>();
    d.clock = std::move(clock);
    return d;
}

std::vector<std::string> types(const std::vector<json>& events) {
    std::vector<std::string> out;
    for (const auto& e : events) out.push_back(e.at("type"));
    return out;
}

const json& final_payload(const std::vector<json>& events) {
    REQUIRE(events.back().at("type") == "final");
    return events.back().at("payload");
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("jobrec_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("cache: ttl with an injected clock") {
    ManualClock clock;
    ResponseCache cache(clock.fn());
    CHECK_FALSE(cache.lookup("k"));
    cache.store("k", json{{"a", 1}}, 10);
    REQUIRE(cache.lookup("k"));
    CHECK(*cache.lookup("k") == json{{"a", 1}});
    clock.advance(10);
    CHECK(cache.lookup("k"));
    clock.advance(40);
    CHECK_FALSE(cache.lookup("k"));
    cache.store("k", 2, 100);
    cache.store("k", 3, 100);
    CHECK(*cache.lookup("k") == 3);
    CHECK(cache.size() == 1);
}

TEST_CASE("cache: key normalization") {
    CHECK(normalize_query("  What can be the FUTURE role\tof a cashier?? ") == "what can be the future role of a cashier");
    CHECK(normalize_query("") == "");
    CHECK(normalize_query("!!!") == "");
    const auto a = cache_key("What comes after Cashier?", "t_cashier", agent::ToolHint::CareerGrowth);
    CHECK(a == cache_key("what  comes after cashier", "t_cashier", agent::ToolHint::CareerGrowth));
    CHECK(a != cache_key("what comes after cashier", "t_stocker", agent::ToolHint::CareerGrowth));
    CHECK(a != cache_key("what comes after cashier", "t_cashier", agent::ToolHint::TextToQuery));
}

TEST_CASE("cache: only user-independent tools are eligible") {
    CHECK(SimplePathCache::eligible(agent::ToolHint::CareerGrowth));
    CHECK(SimplePathCache::eligible(agent::ToolHint::TextToQuery));
    CHECK_FALSE(SimplePathCache::eligible(agent::ToolHint::ApplicationStatus));
    CHECK_FALSE(SimplePathCache::eligible(agent::ToolHint::JobRecommend));

    ResponseCache cache;
    agent::UserProfile p;
    p.current_title = "t_cashier";
    SimplePathCache off(cache, 0);
    off.store("q", p, agent::ToolHint::CareerGrowth, 1);
    CHECK(cache.size() == 0);
    SimplePathCache on(cache, 1000);
    on.store("q", p, agent::ToolHint::ApplicationStatus, 1);
    CHECK(cache.size() == 0);
    on.store("q", p, agent::ToolHint::CareerGrowth, 1);
    CHECK(on.lookup("Q!", p, agent::ToolHint::CareerGrowth) == json(1));
}

TEST_CASE("stores: profiles and conversations") {
    InMemoryProfileClient profiles(bench::demo_profiles());
    CHECK(profiles.fetch("u_sam").current_title == "t_cashier");
    CHECK_ERRC(profiles.fetch("u_nobody"), Errc::ProfileNotFound);
    CHECK(profiles_from_json(profiles_to_json(bench::demo_profiles())) == bench::demo_profiles());

    const auto dir = temp_dir("store");
    const agent::History turns = {{agent::Role::User, "hello \"there\"\nnew line", 5},
                                  {agent::Role::Assistant, "hi", 6},
                                  {agent::Role::User, "caf\xc3\xa9", 7}};
    {
        FileConversationStore store(dir.string());
        CHECK(store.load("u_alex").empty());
        for (const auto& t : turns) store.append("u_alex", t);
    }
    FileConversationStore reopened(dir.string());
    CHECK(reopened.load("u_alex") == turns);
    CHECK(reopened.load("u_sam").empty());
    std::filesystem::remove_all(dir);

    CHECK_ERRC(FileConversationStore("/proc/jobrec_no_such_dir/x").append("u", turns[0]), Errc::StoreUnavailable);
}

TEST_CASE("service: sessions open with persisted history") {
    auto store = std::make_shared<InMemoryConversationStore>();
    ChatService svc({}, demo_deps(store));
    CHECK(svc.open_session("u_alex").turns.empty());
    for (int i = 0; i < 3; ++i) store->append("u_sam", {agent::Role::User, "turn " + std::to_string(i), i});
    const auto s = svc.open_session("u_sam");
    REQUIRE(s.turns.size() == 3);
    CHECK(s.turns[2].text == "turn 2");
    CHECK(s.id != svc.open_session("u_sam").id);
    CHECK_ERRC(svc.open_session("u_nobody"), Errc::ProfileNotFound);
    CHECK_ERRC(svc.snapshot("nope"), Errc::SessionNotFound);
    CHECK_ERRC(svc.post_message("nope", "hi"), Errc::SessionNotFound);
}

TEST_CASE("service: persistence round trip across service instances") {
    const auto dir = temp_dir("persist");
    agent::History before;
    {
        ChatService svc({}, demo_deps(std::make_shared<FileConversationStore>(dir.string())));
        const auto id = svc.open_session("u_alex").id;
        svc.post_message(id, "recommend jobs for me");
        svc.post_message(id, "Which city has more machine learning engineer job openings, Seattle or Sunnyvale?");
        before = svc.snapshot(id).turns;
    }
    REQUIRE(before.size() == 4);
    ChatService again({}, demo_deps(std::make_shared<FileConversationStore>(dir.string())));
    CHECK(again.open_session("u_alex").turns == before);
    std::filesystem::remove_all(dir);
}

TEST_CASE("service: simple status query event sequence") {
    ChatService svc({}, demo_deps());
    const auto id = svc.open_session("u_alex").id;
    std::vector<json> streamed;
    const auto events = svc.post_message(id, "help me check job application status",
                                         [&](const json& e) { streamed.push_back(e); });
    CHECK(streamed == events);
    CHECK(check_event_order(events).empty());
    auto t = types(events);
    t.erase(std::remove(t.begin(), t.end(), "token_chunk"), t.end());
    CHECK(t == std::vector<std::string>{"route", "tool_trace", "final"});
    CHECK(events[0].at("payload").at("verdict") == "simple");
    CHECK(events[0].at("payload").at("tool") == "application_status");
    std::string joined;
    for (const auto& e : events) {
        if (e.at("type") == "token_chunk") joined += e.at("payload").at("text").get<std::string>();
    }
    CHECK(joined == final_payload(events).at("text"));
    CHECK(final_payload(events).at("planner_calls") == 0);
}

TEST_CASE("service: comparison query traces a two-group plan before any tool") {
    ChatService svc({}, demo_deps());
    const auto id = svc.open_session("u_alex").id;
    const auto events =
        svc.post_message(id, "Which city has more machine learning engineer job openings, Seattle or Sunnyvale?");
    CHECK(check_event_order(events).empty());
    const auto t = types(events);
    const auto plan = std::find(t.begin(), t.end(), "plan_trace");
    REQUIRE(plan != t.end());
    CHECK(plan < std::find(t.begin(), t.end(), "tool_trace"));
    const auto& payload = events[static_cast<std::size_t>(plan - t.begin())].at("payload");
    CHECK(payload.at("round") == 0);
    CHECK(payload.at("groups").size() == 2);
    CHECK(payload.at("groups")[0].size() == 2);
    CHECK(final_payload(events).at("route") == "complex");
}

TEST_CASE("service: repeated simple query is served from the cache") {
    ManualClock clock;
    ServiceConfig config;
    config.cache_ttl_s = 60;
    ChatService svc(config, demo_deps(nullptr, clock.fn()));
    const std::string q = "What can be the future role of a cashier?";
    const auto cold = svc.post_message(svc.open_session("u_sam").id, q);
    const auto id = svc.open_session("u_sam").id;
    svc.post_message(id, "hello there, what is up");
    const auto warm = svc.post_message(id, "  what can be the FUTURE role of a cashier ");
    auto trace_of = [](const std::vector<json>& events) {
        for (const auto& e : events) {
            if (e.at("type") == "tool_trace") return e.at("payload");
        }
        FAIL("no tool_trace");
        return json{};
    };
    CHECK_FALSE(trace_of(cold).at("cached").get<bool>());
    CHECK(trace_of(warm).at("cached").get<bool>());
    CHECK(trace_of(warm).at("elapsed_ms") == 0.0);
    CHECK(final_payload(warm).at("text") == final_payload(cold).at("text"));
    CHECK(final_payload(warm).at("cached") == true);

    // A user with another title gets a cold answer.
    CHECK_FALSE(trace_of(svc.post_message(svc.open_session("u_alex").id, q)).at("cached").get<bool>());

    clock.advance(61 * 1000);
    CHECK_FALSE(trace_of(svc.post_message(id, q)).at("cached").get<bool>());
}

TEST_CASE("service: blank messages end in an error event") {
    ChatService svc({}, demo_deps());
    const auto id = svc.open_session("u_alex").id;
    const auto events = svc.post_message(id, "   \n");
    CHECK(check_event_order(events).empty());
    CHECK(types(events) == std::vector<std::string>{"route", "error"});
    CHECK(events[1].at("payload").at("code") == "EmptyQuery");
    CHECK(svc.snapshot(id).turns.empty());
}

TEST_CASE("service: event order holds over 200 scripted messages") {
    const std::vector<std::string> pool = {
        "help me check job application status",
        "can you create a career development plan for me?",
        "Which city has more machine learning engineer job openings, Seattle or Sunnyvale?",
        "What can be the future role of a cashier?",
        "how many data scientist openings are in Bentonville?",
        "I want to become a principal 3D designer; what should I do?",
        "recommend jobs for me",
        "find data scientist openings in Boise",
        "",
        "what skills does a machine learning engineer need?",
        "I am not sure what to do next, maybe a mentor?",
        "tell me a joke",
    };
    const std::vector<std::string> users = {"u_alex", "u_sam", "u_jordan", "u_riley", "u_taylor"};
    std::mt19937_64 rng(42);
    ServiceConfig config;
    config.chunk_chars = 7;
    auto deps = demo_deps();
    std::vector<json> published;
    deps.bus->subscribe("session/s1", [&](const json& e) { published.push_back(e); });
    ChatService svc(config, deps);
    std::vector<std::string> sessions;
    for (const auto& u : users) sessions.push_back(svc.open_session(u).id);
    std::size_t s1_events = 0;
    for (int i = 0; i < 200; ++i) {
        const auto& session = sessions[rng() % sessions.size()];
        const auto events = svc.post_message(session, pool[rng() % pool.size()]);
        INFO("message " << i);
        CHECK(check_event_order(events) == "");
        if (session == "s1") s1_events += events.size();
    }
    CHECK(published.size() == s1_events);
}

TEST_CASE("service: interactions update one family counter") {
    auto deps = demo_deps();
    ChatService svc({}, deps);
    const auto id = svc.open_session("u_alex").id;
    const auto& node = deps.graph->node("o_ml_engineer_1");
    std::string family = node.string_or("job_family");
    if (family.empty()) family = tools::title_of_opening(*deps.graph, node)->string_or("job_family");

    const auto before = svc.snapshot(id).interest;
    const auto after = svc.interact(id, "o_ml_engineer_1", tools::InteractionKind::Save);
    CHECK(after.families.at(family).saves == (before.families.count(family) ? before.families.at(family).saves : 0) + 1);
    CHECK(after.families.at(family).clicks == 0);
    CHECK(after.families.size() == 1);
    CHECK(svc.snapshot(id).interest == after);

    CHECK_ERRC(svc.interact(id, "o_nothing", tools::InteractionKind::Click), Errc::NodeNotFound);
    CHECK_ERRC(svc.interact(id, "t_cashier", tools::InteractionKind::Click), Errc::WrongLabel);
    CHECK_ERRC(svc.interact("nope", "o_ml_engineer_1", tools::InteractionKind::Click), Errc::SessionNotFound);
}

TEST_CASE("service: dislikes lower that family in the next turn only") {
    auto deps = demo_deps();
    ChatService svc({}, deps);
    const auto id = svc.open_session("u_alex").id;
    auto score_of = [](const std::string& text, const std::string& opening) {
        const auto at = text.find("(" + opening + ", score ");
        REQUIRE(at != std::string::npos);
        return std::stod(text.substr(at + opening.size() + 9));
    };
    const auto first = final_payload(svc.post_message(id, "recommend jobs for me")).at("text").get<std::string>();
    for (int i = 0; i < 3; ++i) svc.interact(id, "o_ml_engineer_1", tools::InteractionKind::Dislike);
    const auto second = final_payload(svc.post_message(id, "recommend jobs for me")).at("text").get<std::string>();
    CHECK(first != second);
    if (second.find("o_ml_engineer_1") != std::string::npos) {
        CHECK(score_of(second, "o_ml_engineer_1") <= score_of(first, "o_ml_engineer_1"));
    }
}

TEST_CASE("service config: parsing and strict keys") {
    const auto c = ServiceConfig::from_json(json::parse(R"({
        "cache": {"ttl_s": 5},
        "replan": {"budget": 1},
        "agent": {"variant": "always_plan"},
        "lm": {"stub_latency_ms": 2, "stub_ms_per_input_token": 0.01, "stub_ms_per_token": 0.25},
        "tools": {"k": 3, "weights": {"skills": 2.0}},
        "stream": {"chunk_chars": 8}})"));
    CHECK(c.cache_ttl_s == 5);
    CHECK(c.replan_budget == 1);
    CHECK(c.variant == exec::Variant::AlwaysPlan);
    CHECK(c.stub_latency.per_call_ms == 2.0);
    CHECK(c.stub_latency.per_input_token_ms == 0.01);
    CHECK(c.stub_latency.per_token_ms == 0.25);
    CHECK(c.recommend.k == 3);
    CHECK(c.weights.skills == 2.0);
    CHECK(c.chunk_chars == 8);
    CHECK(ServiceConfig::from_json(json::object()).cache_ttl_s == 3600);

    CHECK_ERRC(ServiceConfig::from_json(json::parse(R"({"cache": {"ttl": 5}})")), Errc::ConfigInvalid);
    CHECK_ERRC(ServiceConfig::from_json(json::parse(R"({"extra": 1})")), Errc::ConfigInvalid);
    CHECK_ERRC(ServiceConfig::from_json(json::parse(R"({"replan": {"budget": -1}})")), Errc::ConfigInvalid);
    CHECK_ERRC(ServiceConfig::from_json(json::parse(R"({"agent": {"variant": "magic"}})")), Errc::ConfigInvalid);
    CHECK_ERRC(ServiceConfig::load_file("/nonexistent/config.json"), Errc::ConfigInvalid);
}

TEST_CASE("message bus: per-topic delivery and unsubscribe") {
    MessageBus bus;
    std::vector<int> a, b;
    const auto sa = bus.subscribe("a", [&](const json& m) { a.push_back(m.get<int>()); });
    bus.subscribe("b", [&](const json& m) { b.push_back(m.get<int>()); });
    bus.publish("a", 1);
    bus.publish("b", 2);
    bus.publish("a", 3);
    bus.unsubscribe(sa);
    bus.publish("a", 4);
    CHECK(a == std::vector<int>{1, 3});
    CHECK(b == std::vector<int>{2});
}

TEST_CASE("http api: sessions, event stream and errors") {
    ChatService svc({}, demo_deps());
    HttpApi api(svc);
    const int port = api.bind("127.0.0.1", 0);
    std::thread server([&] { api.listen(); });
    api.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

    auto created = client.Post("/sessions", R"({"user":"u_alex"})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const auto id = json::parse(created->body).at("session").get<std::string>();

    auto stream = client.Post("/sessions/" + id + "/messages", R"({"text":"help me check job application status"})",
                              "application/json");
    REQUIRE(stream);
    CHECK(stream->status == 200);
    CHECK(stream->get_header_value("Content-Type").find("text/event-stream") == 0);
    std::vector<json> events;
    std::size_t at = 0;
    while ((at = stream->body.find("data: ", at)) != std::string::npos) {
        const auto end = stream->body.find("\n\n", at);
        REQUIRE(end != std::string::npos);
        events.push_back(json::parse(stream->body.substr(at + 6, end - at - 6)));
        at = end + 2;
    }
    CHECK(check_event_order(events).empty());
    CHECK(events.back().at("payload").at("text").get<std::string>().find("interview stage") != std::string::npos);

    auto liked = client.Post("/sessions/" + id + "/interactions", R"({"opening":"o_ml_engineer_1","kind":"like"})",
                             "application/json");
    REQUIRE(liked);
    CHECK(liked->status == 200);
    CHECK(json::parse(liked->body).contains("interest"));

    auto missing = client.Post("/sessions/s999/messages", R"({"text":"hi"})", "application/json");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto unknown_user = client.Post("/sessions", R"({"user":"u_nobody"})", "application/json");
    REQUIRE(unknown_user);
    CHECK(unknown_user->status == 404);
    auto bad = client.Post("/sessions", "not json", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    auto bad_opening = client.Post("/sessions/" + id + "/interactions", R"({"opening":"o_none","kind":"like"})",
                                   "application/json");
    REQUIRE(bad_opening);
    CHECK(bad_opening->status == 404);
    auto preflight = client.Options("/sessions");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    api.stop();
    server.join();
    CHECK(http_status(Errc::StoreUnavailable) == 503);
    CHECK(http_status(Errc::EmptyQuery) == 400);
}
