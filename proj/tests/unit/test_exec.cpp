#include "jobrec/exec/default_tools.hpp"
#include "jobrec/exec/executor.hpp"
#include "jobrec/exec/orchestrator.hpp"

#include "demo_fixture.hpp"
#include "test_helpers.hpp"

#include <atomic>
#include <random>
#include <thread>

using namespace jobrec;
using namespace jobrec::exec;
using agent::Plan;
using agent::SubTask;
using agent::ToolHint;

namespace {

using namespace std::chrono_literals;

Plan plan_of(std::vector<std::vector<SubTask>> groups) { return Plan{std::move(groups)}; }

SubTask task(ToolHint tool, agent::Args args = {}) { return SubTask{"t", tool, std::move(args)}; }

ToolRegistry sleepy_registry(std::chrono::milliseconds nap) {
    ToolRegistry r;
    for (auto hint : agent::kAllToolHints) {
        r.add(hint, [nap, hint](const agent::Args&, const ToolContext&) {
            std::this_thread::sleep_for(nap);
            return json{{"tool", agent::to_string(hint)}};
        });
    }
    return r;
}

class FixedRemote final : public lm::LmBackend {
public:
    explicit FixedRemote(std::string verdict) : verdict_(std::move(verdict)) {}
    lm::LmResponse complete(const lm::LmRequest&) const override { return {verdict_, lm::BackendKind::Remote, 0.0}; }
    lm::BackendKind kind() const noexcept override { return lm::BackendKind::Remote; }

private:
    std::string verdict_;
};

ToolResult result(std::size_t g, std::size_t p, ToolStatus s, json payload = {}, std::string err = {}) {
    ToolResult r;
    r.index = {g, p};
    r.status = s;
    r.payload = std::move(payload);
    r.error = std::move(err);
    return r;
}

}  // namespace

TEST_CASE("classify_payload") {
    CHECK(classify_payload(nullptr) == ToolStatus::Empty);
    CHECK(classify_payload(json::array()) == ToolStatus::Empty);
    CHECK(classify_payload(json::object()) == ToolStatus::Empty);
    CHECK(classify_payload(json::array({1})) == ToolStatus::Ok);
    CHECK(classify_payload(0) == ToolStatus::Ok);
    CHECK(classify_payload("") == ToolStatus::Ok);
}

TEST_CASE("execute_plan isolation and pre-flight") {
    std::atomic<int> ran{0};
    ToolRegistry r;
    r.add(ToolHint::JobRecommend, [&](const agent::Args&, const ToolContext&) {
        ++ran;
        return json::array({1, 2});
    });
    r.add(ToolHint::SkillGap, [&](const agent::Args&, const ToolContext&) -> json {
        ++ran;
        return json::array();
    });
    r.add(ToolHint::Mentor, [&](const agent::Args&, const ToolContext&) -> json {
        ++ran;
        throw Error(Errc::NoApplications, "boom");
    });
    ToolContext ctx;

    SUBCASE("unregistered tool stops everything before it starts") {
        auto p = plan_of({{task(ToolHint::JobRecommend)}, {task(ToolHint::Compare)}});
        CHECK_ERRC(execute_plan(p, r, ctx), Errc::ToolNotRegistered);
        CHECK(ran == 0);
    }
    SUBCASE("empty and throwing members do not stop siblings") {
        for (auto mode : {ExecutionMode::Concurrent, ExecutionMode::Sequential}) {
            ran = 0;
            auto p = plan_of({{task(ToolHint::SkillGap), task(ToolHint::Mentor), task(ToolHint::JobRecommend)}});
            ExecuteOptions o;
            o.mode = mode;
            auto out = execute_plan(p, r, ctx, o);
            CHECK(ran == 3);
            REQUIRE(out.results.size() == 3);
            CHECK(out.results[0].status == ToolStatus::Empty);
            CHECK(out.results[0].payload.is_null());
            CHECK(out.results[1].status == ToolStatus::Error);
            CHECK(out.results[1].error.find("boom") != std::string::npos);
            CHECK(out.results[1].payload.is_null());
            CHECK(out.results[2].status == ToolStatus::Ok);
            for (std::size_t i = 0; i < 3; ++i) CHECK(out.results[i].index == agent::TaskIndex{0, i});
        }
    }
}

TEST_CASE("execute_plan passes earlier payloads through references") {
    ToolRegistry r;
    r.add(ToolHint::CareerGrowth, [](const agent::Args&, const ToolContext&) { return json{{"v", 41}}; });
    r.add(ToolHint::SkillGap, [](const agent::Args&, const ToolContext&) -> json { return nullptr; });
    r.add(ToolHint::Mentor, [](const agent::Args& a, const ToolContext& c) {
        return json{{"v", c.resolve(a.at("from"))["v"].get<int>() + 1}};
    });
    auto p = plan_of({{task(ToolHint::CareerGrowth), task(ToolHint::SkillGap)},
                      {task(ToolHint::Mentor, {{"from", "$ref:0.0"}}), task(ToolHint::Mentor, {{"from", "$ref:0.1"}})}});
    auto out = execute_plan(p, r, ToolContext{});
    CHECK(out.results[2].payload["v"] == 42);
    // Depending on an empty result is itself an error, reported on that sub-task.
    CHECK(out.results[3].status == ToolStatus::Error);
    CHECK(out.results[3].error.find("0.1") != std::string::npos);
}

TEST_CASE("execute_plan timing") {
    const auto registry = sleepy_registry(100ms);
    auto p = plan_of({{task(ToolHint::JobRecommend), task(ToolHint::SkillGap)}, {task(ToolHint::Mentor)}});
    int passes = 0;
    for (int rep = 0; rep < 3; ++rep) {
        ExecuteOptions conc;
        auto c = execute_plan(p, registry, ToolContext{}, conc);
        ExecuteOptions seq;
        seq.mode = ExecutionMode::Sequential;
        auto s = execute_plan(p, registry, ToolContext{}, seq);
        passes += c.trace.groups[0].wall_ms < 180.0 && s.trace.groups[0].wall_ms >= 200.0;

        for (const auto& g : c.trace.groups) {
            double longest = 0;
            for (const auto& st : g.subtasks) longest = std::max(longest, st.elapsed_ms);
            CHECK(g.wall_ms >= longest);
        }
    }
    CHECK(passes >= 2);
}

TEST_CASE("execute_plan deadline") {
    ToolRegistry r;
    r.add(ToolHint::JobRecommend, [](const agent::Args&, const ToolContext&) {
        std::this_thread::sleep_for(400ms);
        return json{1};
    });
    r.add(ToolHint::SkillGap, [](const agent::Args&, const ToolContext&) { return json{2}; });
    for (auto mode : {ExecutionMode::Concurrent, ExecutionMode::Sequential}) {
        ExecuteOptions o;
        o.timeout = 50ms;
        o.mode = mode;
        const auto start = std::chrono::steady_clock::now();
        auto out = execute_plan(plan_of({{task(ToolHint::JobRecommend), task(ToolHint::SkillGap)}}), r, {}, o);
        CHECK(std::chrono::steady_clock::now() - start < 300ms);
        CHECK(out.results[0].status == ToolStatus::Error);
        CHECK(out.results[0].error == "timed out");
        CHECK(out.results[1].status == ToolStatus::Ok);
    }
}

TEST_CASE("concurrent and sequential execution agree on fuzzed plans") {
    // Tools are deterministic functions of their args and of referenced payloads.
    ToolRegistry r;
    for (auto hint : agent::kAllToolHints) {
        r.add(hint, [hint](const agent::Args& a, const ToolContext& c) -> json {
            std::this_thread::sleep_for(std::chrono::milliseconds(std::hash<std::string>{}(a.at("seed")) % 3));
            json out{{"tool", agent::to_string(hint)}, {"seed", a.at("seed")}};
            for (const auto& [k, v] : a) {
                if (k != "seed") out[k] = c.resolve(v);
            }
            const auto h = std::hash<std::string>{}(out.dump());
            if (h % 7 == 0) return json::array();
            if (h % 11 == 0) throw std::runtime_error("unlucky " + std::to_string(h));
            return out;
        });
    }
    std::mt19937 rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        Plan p;
        const int groups = 1 + static_cast<int>(rng() % 4);
        for (int g = 0; g < groups; ++g) {
            std::vector<SubTask> group;
            const int size = 1 + static_cast<int>(rng() % 4);
            for (int k = 0; k < size; ++k) {
                SubTask st = task(agent::kAllToolHints[rng() % std::size(agent::kAllToolHints)],
                                  {{"seed", std::to_string(rng() % 1000)}});
                if (g > 0 && rng() % 2) {
                    const auto src = rng() % g;
                    st.args["in"] = agent::make_ref({src, rng() % p.groups[src].size()});
                }
                group.push_back(std::move(st));
            }
            p.groups.push_back(std::move(group));
        }
        REQUIRE_NOTHROW(agent::validate_plan(p));
        ExecuteOptions seq;
        seq.mode = ExecutionMode::Sequential;
        auto a = execute_plan(p, r, {}, {});
        auto b = execute_plan(p, r, {}, seq);
        REQUIRE(a.results.size() == b.results.size());
        for (std::size_t i = 0; i < a.results.size(); ++i) {
            CHECK(a.results[i].index == b.results[i].index);
            CHECK(a.results[i].status == b.results[i].status);
            CHECK(a.results[i].payload == b.results[i].payload);
            CHECK(a.results[i].error == b.results[i].error);
        }
    }
}

TEST_CASE("trace export schema") {
    auto out = execute_plan(plan_of({{task(ToolHint::JobRecommend), task(ToolHint::SkillGap)}, {task(ToolHint::Mentor)}}),
                            sleepy_registry(1ms), {});
    out.trace.replans = 2;
    const auto j = out.trace.to_json();
    CHECK(j.size() == 3);
    CHECK(j["replans"] == 2);
    CHECK(j["total_ms"].is_number());
    REQUIRE(j["groups"].size() == 2);
    CHECK(j["groups"][0]["subtasks"].size() == 2);
    const auto& st = j["groups"][0]["subtasks"][1];
    CHECK(st.size() == 3);
    CHECK(st["tool"] == "skill_gap");
    CHECK(st["status"] == "ok");
    CHECK(st["elapsed_ms"].get<double>() >= 0.0);
    CHECK(j["groups"][1]["wall_ms"].is_number());
}

TEST_CASE("assess_sufficiency") {
    const agent::IntegratedQuery iq{"q", {}, "q"};
    SUBCASE("all ok") {
        auto fb = assess_sufficiency({result(0, 0, ToolStatus::Ok, 1), result(0, 1, ToolStatus::Ok, "x")}, iq, nullptr);
        CHECK(fb.verdict == agent::SufficiencyVerdict::Sufficient);
        CHECK(fb.failing.empty());
    }
    SUBCASE("one empty") {
        auto fb = assess_sufficiency({result(0, 0, ToolStatus::Ok, 1), result(1, 0, ToolStatus::Empty)}, iq, nullptr);
        CHECK(fb.verdict == agent::SufficiencyVerdict::Insufficient);
        REQUIRE(fb.failing.size() == 1);
        CHECK(fb.failing[0].first == agent::TaskIndex{1, 0});
    }
    SUBCASE("two errors carry their details") {
        auto fb = assess_sufficiency({result(0, 0, ToolStatus::Error, {}, "first failure"),
                                      result(0, 1, ToolStatus::Ok, 1),
                                      result(1, 0, ToolStatus::Error, {}, "second failure")},
                                     iq, nullptr);
        REQUIRE(fb.failing.size() == 2);
        CHECK(fb.failing[0].second.find("first failure") != std::string::npos);
        CHECK(fb.failing[1].second.find("second failure") != std::string::npos);
    }
    SUBCASE("a remote model may only make the verdict stricter") {
        FixedRemote strict("INSUFFICIENT");
        FixedRemote lenient("SUFFICIENT");
        auto ok = std::vector<ToolResult>{result(0, 0, ToolStatus::Ok, 1)};
        CHECK(assess_sufficiency(ok, iq, &strict).verdict == agent::SufficiencyVerdict::Insufficient);
        CHECK_FALSE(assess_sufficiency(ok, iq, &strict).failing.empty());
        CHECK(assess_sufficiency(ok, iq, &lenient).verdict == agent::SufficiencyVerdict::Sufficient);
        auto bad = std::vector<ToolResult>{result(0, 0, ToolStatus::Empty)};
        CHECK(assess_sufficiency(bad, iq, &lenient).verdict == agent::SufficiencyVerdict::Insufficient);
    }
}

TEST_CASE("default tools on the demo world") {
    DemoFixture fx;
    auto ctx = fx.context();
    auto run = [&](ToolHint hint, agent::Args args) { return (*fx.registry.find(hint))(args, ctx); };

    auto recs = run(ToolHint::JobRecommend, {{"title", "ml engineer"}, {"city", "Seattle"}});
    CHECK(recs.size() == 3);
    for (const auto& r : recs) CHECK(r["city"] == "Seattle");

    auto gap = run(ToolHint::SkillGap, {{"target", "Machine Learning Engineer"}});
    CHECK(gap["title"] == "t_ml_engineer");
    CHECK(gap["missing"] == json::array({"machine learning", "sql", "tensorflow"}));

    // 2.5 either way; the shorter id sequence wins the tie.
    auto path = run(ToolHint::CareerPath, {{"destination", "engineering manager"}});
    CHECK(path["titles"].size() == 2);
    CHECK(path["score"] == 2.5);

    auto growth = run(ToolHint::CareerGrowth, {});
    CHECK(growth.size() == 3);
    CHECK(title_from(growth, *fx.graph) == growth[0]["titles"][1]["id"]);

    CHECK(skills_from(gap) == std::vector<std::string>{"machine learning", "sql", "tensorflow"});
    CHECK(skills_from(json("SQL, python")) == std::vector<std::string>{"sql", "python"});

    auto app = run(ToolHint::ApplicationStatus, {});
    CHECK(app["stage"] == "interview");
    CHECK_ERRC(run(ToolHint::SkillGap, {}), Errc::MissingParameter);
    CHECK_ERRC(run(ToolHint::JobRecommend, {{"k", "many"}}), Errc::InvalidArgument);
}

TEST_CASE("orchestrate: simple path") {
    DemoFixture fx;
    auto r = orchestrate("help me check job application status", fx.session(), fx.env(), fx.registry);
    CHECK(r.route == agent::Verdict::Simple);
    CHECK(r.trace.tool_calls() == 1);
    CHECK(r.trace.planner_calls == 0);
    CHECK(r.trace.memory_calls == 0);
    CHECK(r.trace.replans == 0);
    CHECK(r.response.find("interview stage") != std::string::npos);
    CHECK(r.response.find("2026-10-20 17:30 UTC") != std::string::npos);

    auto none = orchestrate("help me check job application status", fx.session("u_sam"), fx.env(), fx.registry);
    CHECK(none.response == "You have no job applications on record.");
    CHECK_ERRC(orchestrate("  ", fx.session(), fx.env(), fx.registry), Errc::EmptyQuery);
}

TEST_CASE("orchestrate: city comparison") {
    DemoFixture fx;
    auto r = orchestrate("Which city has more machine learning engineer job openings, Seattle or Sunnyvale?",
                         fx.session(), fx.env(), fx.registry);
    CHECK(r.route == agent::Verdict::Complex);
    REQUIRE(r.trace.groups.size() == 2);
    CHECK(r.trace.groups[0].subtasks.size() == 2);
    CHECK(r.trace.replans == 0);
    const std::string verdict = "Seattle has more Machine Learning Engineer openings than Sunnyvale (3 vs 1).";
    CHECK(r.response.size() > verdict.size());
    CHECK(r.response.substr(r.response.size() - verdict.size()) == verdict);
}

TEST_CASE("orchestrate: replan widens an empty search") {
    DemoFixture fx;
    std::vector<int> rounds;
    Observer obs;
    obs.on_plan = [&](const Plan&, int round) { rounds.push_back(round); };
    auto r = orchestrate("find data scientist openings in Boise", fx.session(), fx.env(), fx.registry, {}, &obs);
    CHECK(r.trace.replans == 1);
    CHECK_FALSE(r.degraded);
    CHECK(rounds == std::vector<int>{0, 1});
    CHECK(r.response.find("Data Scientist in Dallas") != std::string::npos);
}

TEST_CASE("orchestrate: only failing sub-tasks run again") {
    DemoFixture fx;
    auto registry = fx.registry;
    std::atomic<int> growth_calls{0};
    std::atomic<int> mentor_calls{0};
    auto growth = *registry.find(ToolHint::CareerGrowth);
    registry.add(ToolHint::CareerGrowth, [&, growth](const agent::Args& a, const ToolContext& c) {
        ++growth_calls;
        return growth(a, c);
    });
    registry.add(ToolHint::Mentor, [&](const agent::Args&, const ToolContext&) -> json {
        if (++mentor_calls == 1) throw std::runtime_error("mentor service unavailable");
        return json::array({{{"name", "Priya"}, {"title", "t_senior_ml_engineer"}, {"matched", 2}}});
    });
    auto r = orchestrate("can you create a career development plan for me?", fx.session(), fx.env(), registry);
    CHECK(r.trace.replans == 1);
    CHECK(growth_calls == 1);
    CHECK(mentor_calls == 2);
    CHECK_FALSE(r.degraded);
    // Second round: four groups again, with everything but the mentor served from the first round.
    REQUIRE(r.trace.groups.size() == 8);
    CHECK(r.trace.groups[4].subtasks[0].cached);
    CHECK_FALSE(r.trace.groups[6].subtasks[1].cached);
    CHECK(r.trace.tool_calls() == 6);
}

TEST_CASE("orchestrate: replanning is bounded and degrades") {
    DemoFixture fx;
    auto registry = fx.registry;
    registry.add(ToolHint::JobRecommend, [](const agent::Args&, const ToolContext&) -> json {
        throw std::runtime_error("recommendation service unavailable");
    });
    for (int budget : {0, 1, 3}) {
        OrchestratorConfig cfg;
        cfg.replan_budget = budget;
        auto r = orchestrate("find data scientist openings in Boise", fx.session(), fx.env(), registry, cfg);
        CHECK(r.trace.replans == budget);
        CHECK(r.degraded);
        CHECK(r.response.find("could not find enough information") != std::string::npos);
    }
}

TEST_CASE("orchestrate: an unchanged plan with empty results is not retried") {
    DemoFixture fx;
    auto registry = fx.registry;
    std::atomic<int> mentor_calls{0};
    registry.add(ToolHint::Mentor, [&](const agent::Args&, const ToolContext&) {
        ++mentor_calls;
        return json::array();
    });
    auto r = orchestrate("can you create a career development plan for me?", fx.session(), fx.env(), registry);
    CHECK(r.trace.replans == 0);
    CHECK(r.trace.planner_calls == 2);
    CHECK(mentor_calls == 1);
    CHECK(r.degraded);
    CHECK(r.response.find("Career growth paths:") != std::string::npos);
}

TEST_CASE("orchestrate: variants skip the router") {
    DemoFixture fx;
    for (auto v : {Variant::AlwaysPlan, Variant::PlanExecute, Variant::ReactLike}) {
        OrchestratorConfig cfg;
        cfg.variant = v;
        auto r = orchestrate("help me check job application status", fx.session(), fx.env(), fx.registry, cfg);
        CHECK(r.route == agent::Verdict::Complex);
        CHECK(r.trace.classifier_calls == 0);
        CHECK(r.trace.planner_calls >= 1);
        CHECK(r.response.find("interview stage") != std::string::npos);
    }
    OrchestratorConfig rag;
    rag.variant = Variant::RagLike;
    auto r = orchestrate("help me check job application status", fx.session(), fx.env(), fx.registry, rag);
    CHECK(r.trace.planner_calls == 0);
    CHECK(r.response.rfind("Recommended openings:", 0) == 0);
    CHECK(parse_variant("react_like") == Variant::ReactLike);
    CHECK_ERRC(parse_variant("nope"), Errc::ConfigInvalid);
}

TEST_CASE("orchestrate: development plan renders every section") {
    DemoFixture fx;
    auto r = orchestrate("can you create a career development plan for me?", fx.session(), fx.env(), fx.registry);
    CHECK(r.trace.replans == 0);
    REQUIRE(r.results.size() == 5);
    for (const auto& res : r.results) CHECK(res.status == ToolStatus::Ok);
    for (const char* section : {"Career growth paths:", "Skills to develop for", "Learning resources:",
                                "Suggested mentors:", "Recommended openings:"}) {
        CHECK_MESSAGE(r.response.find(section) != std::string::npos, section);
    }
}
