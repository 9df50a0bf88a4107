#include "jobrec/agent/agent.hpp"

#include "demo_fixture.hpp"
#include "test_helpers.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <fstream>
#include <random>

using namespace jobrec;
using namespace jobrec::agent;

namespace {

History turns(std::initializer_list<std::pair<Role, const char*>> items) {
    History h;
    std::int64_t ts = 1000;
    for (const auto& [role, text] : items) h.push_back({role, text, ts += 1000});
    return h;
}

// Returns scripted replies in order, then repeats the last one.
class ScriptedBackend final : public lm::LmBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    lm::LmResponse complete(const lm::LmRequest&) const override {
        const auto i = std::min<std::size_t>(calls_++, replies_.size() - 1);
        return {replies_[i], lm::BackendKind::Stub, 0.0};
    }
    lm::BackendKind kind() const noexcept override { return lm::BackendKind::Stub; }
    std::size_t calls() const { return calls_; }

private:
    std::vector<std::string> replies_;
    mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace

TEST_CASE("classify_complexity") {
    DemoFixture fx;
    const auto profile = fx.profiles.at("u_alex");
    SUBCASE("worked examples") {
        auto simple = classify_complexity("help me check job application status", {}, profile, *fx.stub);
        CHECK(simple.verdict == Verdict::Simple);
        CHECK(simple.tool == ToolHint::ApplicationStatus);
        CHECK(classify_complexity("can you create a career development plan for me?", {}, profile, *fx.stub).verdict ==
              Verdict::Complex);
        CHECK(classify_complexity("Which city has more machine learning engineer job openings, Seattle or Sunnyvale?",
                                  {}, profile, *fx.stub)
                  .verdict == Verdict::Complex);
    }
    SUBCASE("empty query") {
        CHECK_ERRC(classify_complexity("   ", {}, profile, *fx.stub), Errc::EmptyQuery);
    }
    SUBCASE("simple path merges the recent window verbatim") {
        History h;
        for (int i = 0; i < 14; ++i) h.push_back({Role::User, "turn " + std::to_string(i), 1000 + i});
        auto c = classify_complexity("help me check job application status", h, profile, *fx.stub);
        REQUIRE(c.verdict == Verdict::Simple);
        CHECK(c.merged_context.find("turn 3") == std::string::npos);
        CHECK(c.merged_context.find("turn 4") != std::string::npos);
        CHECK(c.merged_context.find("turn 13") != std::string::npos);
        CHECK(c.merged_context.rfind("help me check job application status") > c.merged_context.find("turn 13"));
    }
    SUBCASE("unusable verdict is retried once, then Complex") {
        ScriptedBackend junk({"maybe", "perhaps"});
        auto c = classify_complexity("anything", {}, profile, junk);
        CHECK(c.verdict == Verdict::Complex);
        CHECK(c.fallback);
        CHECK(junk.calls() == 2);

        ScriptedBackend second_try({"maybe", "SIMPLE\njob_recommend"});
        auto d = classify_complexity("anything", {}, profile, second_try);
        CHECK(d.verdict == Verdict::Simple);
        CHECK_FALSE(d.fallback);
    }
    SUBCASE("verdict tokens are case-sensitive") {
        ScriptedBackend lower({"simple"});
        CHECK(classify_complexity("x", {}, profile, lower).fallback);
    }
}

TEST_CASE("routing on the labeled query set") {
    DemoFixture fx;
    std::ifstream in(data_path("routing_queries.v1.json"));
    const auto set = nlohmann::json::parse(in);
    REQUIRE(set.size() == 40);
    for (const auto& q : set) {
        const auto c = classify_complexity(q["query"], {}, fx.profiles.at("u_alex"), *fx.stub);
        CHECK_MESSAGE((c.verdict == Verdict::Simple) == (q["label"] == "SIMPLE"), q["query"]);
    }
}

TEST_CASE("integrate_memory") {
    DemoFixture fx;
    const auto profile = fx.profiles.at("u_alex");
    SUBCASE("empty history") {
        auto iq = integrate_memory("find openings", {}, profile, *fx.stub);
        CHECK(iq.text == "find openings");
        CHECK(iq.source_turn_indices.empty());
        CHECK(iq.original_query == "find openings");
    }
    SUBCASE("irrelevant history is dropped byte-exactly") {
        auto h = turns({{Role::User, "Is it going to rain tomorrow?"},
                        {Role::Assistant, "Expect showers in the afternoon."},
                        {Role::User, "Should I bring an umbrella then"}});
        auto iq = integrate_memory("find data scientist openings in Dallas", h, profile, *fx.stub);
        CHECK(iq.text == "find data scientist openings in Dallas");
        CHECK(iq.source_turn_indices.empty());
    }
    SUBCASE("relevant turn is carried") {
        auto h = turns({{Role::User, "I have 6 years of Java experience"}, {Role::Assistant, "Noted."}});
        auto iq = integrate_memory("find me lead engineer roles", h, profile, *fx.stub);
        CHECK(iq.source_turn_indices == std::vector<std::size_t>{0});
        CHECK(iq.text.find("Java experience") != std::string::npos);
        CHECK(iq.text.find("find me lead engineer roles") != std::string::npos);
    }
    SUBCASE("indices stay inside the history") {
        auto h = turns({{Role::User, "Seattle is home"}, {Role::User, "I like python"}, {Role::User, "hello"}});
        auto iq = integrate_memory("python jobs in Seattle", h, profile, *fx.stub);
        for (auto i : iq.source_turn_indices) CHECK(i < h.size());
        CHECK(iq.source_turn_indices == std::vector<std::size_t>{0, 1});
    }
}

TEST_CASE("decompose canonical plans") {
    DemoFixture fx;
    const auto profile = fx.profiles.at("u_alex");
    auto plan_for = [&](const std::string& q) { return decompose({q, {}, q}, *fx.stub, &profile); };

    SUBCASE("city comparison") {
        auto p = plan_for("Which city has more machine learning engineer job openings, Seattle or Sunnyvale?");
        REQUIRE(p.groups.size() == 2);
        REQUIRE(p.groups[0].size() == 2);
        CHECK(p.groups[0][0].tool == ToolHint::GraphTemplate);
        CHECK(p.groups[0][0].args.at("city") == "Seattle");
        CHECK(p.groups[0][1].args.at("city") == "Sunnyvale");
        CHECK(p.groups[0][0].description == "Get machine learning engineer job opening number from Seattle");
        REQUIRE(p.groups[1].size() == 1);
        CHECK(p.groups[1][0].tool == ToolHint::Compare);
        CHECK(p.groups[1][0].args.at("left") == "$ref:0.0");
    }
    SUBCASE("career development plan") {
        auto p = plan_for("can you create a career development plan for me?");
        CHECK(p.task_count() == 5);
        REQUIRE(p.groups.size() == 4);
        CHECK(p.groups[0][0].tool == ToolHint::CareerGrowth);
        CHECK(p.groups[1][0].tool == ToolHint::SkillGap);
        REQUIRE(p.groups[2].size() == 2);
        CHECK(p.groups[2][0].tool == ToolHint::LearningResources);
        CHECK(p.groups[2][1].tool == ToolHint::Mentor);
        CHECK(p.groups[3][0].tool == ToolHint::JobRecommend);
    }
    SUBCASE("single intent") {
        auto p = plan_for("plan my path to principal 3D designer");
        REQUIRE(p.groups.size() == 1);
        REQUIRE(p.groups[0].size() == 1);
        CHECK(p.groups[0][0].tool == ToolHint::CareerPath);
        CHECK(p.groups[0][0].args.at("destination") == "t_principal_3d_designer");
    }
    SUBCASE("empty") {
        CHECK_ERRC(decompose({"", {}, ""}, *fx.stub), Errc::EmptyQuery);
    }
    SUBCASE("planner output unusable twice") {
        ScriptedBackend junk({"not a plan", "[]"});
        CHECK_ERRC(decompose({"q", {}, "q"}, junk), Errc::PlanInvalid);
        ScriptedBackend broken({"[[", "{"});
        CHECK_ERRC(decompose({"q", {}, "q"}, broken), Errc::PlanParseError);
        ScriptedBackend recovers({"[[", R"([[{"d":"x","tool":"job_recommend","args":{}}]])"});
        CHECK(decompose({"q", {}, "q"}, recovers).task_count() == 1);
    }
}

TEST_CASE("parse_plan") {
    CHECK_ERRC(parse_plan(R"([[{"d":"count Seattle","tool":"graph_template","args":{}}],[]])"), Errc::PlanInvalid);
    CHECK_ERRC(parse_plan("[]"), Errc::PlanInvalid);
    CHECK_ERRC(parse_plan(R"([[{"d":"x","tool":"teleport","args":{}}]])"), Errc::PlanInvalid);
    CHECK_ERRC(parse_plan("[[{"), Errc::PlanParseError);
    CHECK_ERRC(parse_plan(R"([[{"d":"","tool":"job_recommend","args":{}}]])"), Errc::PlanInvalid);
    // A member may not consume a sibling's output, nor a later group's.
    CHECK_ERRC(parse_plan(R"([[{"d":"a","tool":"skill_gap","args":{}},{"d":"b","tool":"mentor","args":{"gap":"$ref:0.0"}}]])"),
               Errc::PlanInvalid);
    CHECK_ERRC(parse_plan(R"([[{"d":"a","tool":"mentor","args":{"gap":"$ref:1.0"}}],[{"d":"b","tool":"skill_gap","args":{}}]])"),
               Errc::PlanInvalid);
    CHECK_ERRC(parse_plan(R"([[{"d":"a","tool":"skill_gap","args":{}}],[{"d":"b","tool":"mentor","args":{"gap":"$ref:0.4"}}]])"),
               Errc::PlanInvalid);

    const std::string wire =
        R"([[{"d":"count Seattle","tool":"graph_template","args":{"city":"Seattle","template":"openings_count_by_title_city","title":"ml engineer"}},)"
        R"({"d":"count Sunnyvale","tool":"graph_template","args":{"city":"Sunnyvale","template":"openings_count_by_title_city","title":"ml engineer"}}],)"
        R"([{"d":"compare","tool":"compare","args":{"left":"$ref:0.0","right":"$ref:0.1"}}]])";
    auto p = parse_plan(wire);
    CHECK(p.groups.size() == 2);
    CHECK(serialize_plan(p) == wire);
    CHECK(parse_plan(serialize_plan(p)) == p);
}

TEST_CASE("parse_plan fuzz: invalid input raises, valid input honours every invariant") {
    const std::string seed =
        R"([[{"d":"a","tool":"career_growth","args":{}}],[{"d":"b","tool":"skill_gap","args":{"target":"$ref:0.0"}}],)"
        R"([{"d":"c","tool":"learning_resources","args":{"gap":"$ref:1.0"}},{"d":"d","tool":"mentor","args":{"gap":"$ref:1.0"}}]])";
    const std::string alphabet = "[]{}\":,$ref01.abcdtoolgsjob_recommend";
    std::mt19937 rng(2024);
    int valid = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        std::string text = seed;
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e) {
            const auto pos = rng() % (text.size() + 1);
            switch (rng() % 3) {
                case 0: if (pos < text.size()) text.erase(pos, 1); break;
                case 1: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
                default: if (pos < text.size()) text[pos] = alphabet[rng() % alphabet.size()];
            }
        }
        try {
            auto plan = parse_plan(text);
            ++valid;
            CHECK_NOTHROW(validate_plan(plan));
            CHECK_FALSE(plan.groups.empty());
            for (const auto& g : plan.groups) CHECK_FALSE(g.empty());
            CHECK(parse_plan(serialize_plan(plan)) == plan);
        } catch (const Error& e) {
            CHECK_MESSAGE((e.code() == Errc::PlanParseError || e.code() == Errc::PlanInvalid), e.what());
        }
    }
    CHECK(valid > 0);
}

TEST_CASE("replan") {
    DemoFixture fx;
    const auto plan = parse_plan(
        R"([[{"d":"Find data scientist openings in Boise","tool":"job_recommend","args":{"city":"Boise","title":"t_data_scientist"}}]])");
    Feedback fb{SufficiencyVerdict::Insufficient, {{{0, 0}, "empty result"}}};

    SUBCASE("budget exhausted") { CHECK_FALSE(replan(plan, fb, 0, *fx.stub).has_value()); }
    SUBCASE("no failing sub-task is a contract violation") {
        CHECK_ERRC(replan(plan, Feedback{}, 3, *fx.stub), Errc::ContractViolation);
    }
    SUBCASE("widen drops the city filter") {
        auto next = replan(plan, fb, 3, *fx.stub);
        REQUIRE(next.has_value());
        const auto& t = next->groups[0][0];
        CHECK(t.args.count("city") == 0);
        CHECK(t.args.at("title") == "t_data_scientist");
        CHECK(t.description.find("widened") != std::string::npos);
    }
    SUBCASE("untouched sub-tasks survive") {
        auto two = parse_plan(
            R"([[{"d":"a","tool":"job_recommend","args":{"city":"Boise"}},{"d":"b","tool":"job_recommend","args":{"city":"Dallas"}}]])");
        Feedback one{SufficiencyVerdict::Insufficient, {{{0, 1}, "empty result"}}};
        auto next = replan(two, one, 1, *fx.stub);
        REQUIRE(next.has_value());
        CHECK(next->groups[0][0] == two.groups[0][0]);
        CHECK(next->groups[0][1].args.count("city") == 0);
    }
}
