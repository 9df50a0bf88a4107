#include "jobrec/lm/backend.hpp"
#include "jobrec/lm/gazetteer.hpp"
#include "jobrec/lm/prompt.hpp"

#include "demo_fixture.hpp"
#include "test_helpers.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <random>
#include <thread>

using namespace jobrec;
using namespace jobrec::lm;

TEST_CASE("render_prompt") {
    SUBCASE("no placeholders returns the system text verbatim") {
        PromptTemplate t{"plain", Task::Classify, "Answer SIMPLE or COMPLEX.", {}, ""};
        CHECK(render_prompt(t, {}) == "Answer SIMPLE or COMPLEX.");
        CHECK(render_prompt(t, {{"unused", "x"}}) == "Answer SIMPLE or COMPLEX.");
    }
    SUBCASE("placeholder substituted at its site") {
        PromptTemplate t{"q", Task::Classify, "User said: {query}.", {}, ""};
        CHECK(render_prompt(t, {{"query", "hi"}}) == "User said: hi.");
    }
    SUBCASE("missing binding") {
        PromptTemplate t{"h", Task::Memory, "History: {history}", {}, "{query}"};
        CHECK_ERRC(render_prompt(t, {{"query", "q"}}), Errc::MissingPlaceholder);
    }
    SUBCASE("examples come in order before the live input") {
        PromptTemplate t{"ex", Task::Classify, "sys", {{"first in", "first out"}, {"second in", "second out"}}, "{query}"};
        const auto text = render_prompt(t, {{"query", "LIVE"}});
        const auto a = text.find("first in");
        const auto b = text.find("second in");
        const auto c = text.find("LIVE");
        REQUIRE(a != std::string::npos);
        CHECK(a < b);
        CHECK(b < c);
    }
}

TEST_CASE("render_prompt is injective in each binding") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> ch('a', 'z');
    auto word = [&] {
        std::string s;
        for (int i = 0; i < 6; ++i) s += static_cast<char>(ch(rng));
        return s;
    };
    for (const char* id : {"classify", "memory", "plan", "replan", "sufficiency", "text_to_query"}) {
        const auto& tmpl = PromptRegistry::builtin().get(id);
        for (int trial = 0; trial < 50; ++trial) {
            Bindings b;
            for (const auto& p : tmpl.placeholders()) b[p] = word();
            const auto base = render_prompt(tmpl, b);
            for (const auto& p : tmpl.placeholders()) {
                auto changed = b;
                changed[p] += word();
                CHECK_MESSAGE(render_prompt(tmpl, changed) != base, id << " {" << p << "}");
            }
        }
    }
}

TEST_CASE("builtin prompts only use declared placeholders") {
    for (const char* id : {"classify", "memory", "plan", "replan", "sufficiency", "text_to_query"}) {
        const auto& tmpl = PromptRegistry::builtin().get(id);
        CHECK_FALSE(tmpl.placeholders().empty());
    }
    CHECK_ERRC(PromptRegistry::builtin().get("nope"), Errc::UnknownTemplate);
}

TEST_CASE("rule table validation") {
    const std::string all_tasks[] = {"classify", "memory", "plan", "replan", "sufficiency", "query"};
    auto table_without = [&](const std::string& missing) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& t : all_tasks) {
            if (t != missing) j.push_back({{"task", t}, {"any_of", nlohmann::json::array()}, {"output", "X"}});
        }
        return j.dump();
    };
    CHECK_NOTHROW(RuleTable::from_json_text(table_without("")));
    for (const auto& t : all_tasks) CHECK_ERRC(RuleTable::from_json_text(table_without(t)), Errc::RuleTableInvalid);

    SUBCASE("rule after catch-all") {
        auto j = nlohmann::json::parse(table_without(""));
        j.push_back({{"task", "plan"}, {"any_of", {"late"}}, {"output", "Y"}});
        CHECK_ERRC(RuleTable::from_json_text(j.dump()), Errc::RuleTableInvalid);
    }
    SUBCASE("garbage") {
        CHECK_ERRC(RuleTable::from_json_text("{"), Errc::RuleTableInvalid);
        CHECK_ERRC(RuleTable::from_json_text("{}"), Errc::RuleTableInvalid);
    }
    CHECK_NOTHROW(RuleTable::load_file(default_rule_table_path()));
}

TEST_CASE("gazetteer extraction") {
    DemoFixture fx;
    const auto gaz = Gazetteer::from_graph(*fx.graph);
    const auto m = gaz.extract("Which city has more machine learning engineer job openings, Seattle or Sunnyvale?");
    REQUIRE(m.size() == 3);
    CHECK(m[0].type == EntityType::Title);
    CHECK(m[0].canonical == "t_ml_engineer");
    CHECK(m[1].canonical == "Seattle");
    CHECK(m[2].canonical == "Sunnyvale");
    // Longest match: the title wins over the skill inside it.
    for (const auto& e : m) CHECK(e.canonical != "machine learning");
    // Word boundaries: "javascript" is not "java".
    CHECK(gaz.extract("I write javascript").empty());
}

TEST_CASE("stub classify on the worked examples") {
    DemoFixture fx;
    auto classify = [&](const std::string& q) {
        LmRequest r{prompt_ids::kClassify, {{"query", q}, {"history", ""}, {"profile", ""}}, 512};
        auto text = fx.stub->complete(r).text;
        return text.substr(0, text.find('\n'));
    };
    CHECK(classify("help me check job application status") == "SIMPLE");
    CHECK(classify("can you create a career development plan for me?") == "COMPLEX");
    CHECK(classify("Which city has more machine learning engineer job openings, Seattle or Sunnyvale?") == "COMPLEX");
}

TEST_CASE("stub backend is deterministic") {
    DemoFixture fx;
    const LmRequest requests[] = {
        {prompt_ids::kClassify, {{"query", "recommend jobs for me"}, {"history", ""}, {"profile", "p"}}, 512},
        {prompt_ids::kPlan, {{"integrated_query", "can you create a career development plan for me?"}, {"profile", ""}}, 4096},
        {prompt_ids::kMemory,
         {{"query", "find me lead engineer roles"}, {"history", "[0] user: I have 6 years of Java experience\n"},
          {"profile", ""}},
         512},
    };
    for (const auto& req : requests) {
        const auto first = fx.stub->complete(req).text;
        bool same = true;
        for (int i = 0; i < 1000; ++i) same = same && fx.stub->complete(req).text == first;
        CHECK(same);
    }
}

TEST_CASE("stub enforces placeholders and output length") {
    DemoFixture fx;
    CHECK_ERRC(fx.stub->complete({prompt_ids::kClassify, {{"query", "x"}}, 512}), Errc::MissingPlaceholder);
    CHECK_ERRC(fx.stub->complete({"nope", {}, 512}), Errc::UnknownTemplate);
    auto r = fx.stub->complete({prompt_ids::kClassify, {{"query", "what skills does a data scientist need"},
                                                        {"history", ""}, {"profile", ""}}, 4});
    CHECK(r.text.size() <= 4);
    CHECK(r.elapsed_ms >= 0.0);
    CHECK(r.backend == BackendKind::Stub);
}

TEST_CASE("memory relevance rule") {
    DemoFixture fx;
    const auto gaz = Gazetteer::from_graph(*fx.graph);
    CHECK(history_turn_relevant(gaz, "find me lead engineer roles", "I have 6 years of Java experience"));
    CHECK_FALSE(history_turn_relevant(gaz, "find me lead engineer roles", "It rained all weekend"));
    CHECK(history_turn_relevant(gaz, "openings in Seattle", "I live near Seattle"));
}

namespace {

struct FakeModelServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    FakeModelServer() {
        server.Post("/ok", [](const httplib::Request& req, httplib::Response& res) {
            auto body = nlohmann::json::parse(req.body);
            const bool shaped = body.contains("system") && body.contains("input") && body.contains("max_tokens");
            res.set_content(nlohmann::json{{"text", shaped ? "SIMPLE" : "BAD"}}.dump(), "application/json");
        });
        server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
        server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(600));
            res.set_content(R"({"text":"late"})", "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeModelServer() {
        server.stop();
        thread.join();
    }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
};

}  // namespace

TEST_CASE("remote backend contract") {
    FakeModelServer fake;
    const Bindings b{{"query", "q"}, {"history", ""}, {"profile", ""}};
    SUBCASE("ok") {
        RemoteBackend backend({fake.url("/ok"), 2000});
        auto r = backend.complete({prompt_ids::kClassify, b, 16});
        CHECK(r.text == "SIMPLE");
        CHECK(r.backend == BackendKind::Remote);
    }
    SUBCASE("non-success status") {
        RemoteBackend backend({fake.url("/fail"), 2000});
        CHECK_ERRC(backend.complete({prompt_ids::kClassify, b, 16}), Errc::BackendError);
    }
    SUBCASE("deadline") {
        RemoteBackend backend({fake.url("/slow"), 100});
        const auto start = std::chrono::steady_clock::now();
        CHECK_ERRC(backend.complete({prompt_ids::kClassify, b, 16}), Errc::BackendTimeout);
        CHECK(std::chrono::steady_clock::now() - start < std::chrono::milliseconds(550));
    }
    SUBCASE("unreachable") {
        RemoteBackend backend({"http://127.0.0.1:1/x", 200});
        CHECK_ERRC(backend.complete({prompt_ids::kClassify, b, 16}), Errc::BackendTimeout);
    }
}
