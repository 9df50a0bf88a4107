#include "jobrec/bench/dialogue.hpp"

#include "jobrec/error.hpp"
#include "jobrec/tools/career.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <set>

namespace jobrec::bench {

using nlohmann::json;

namespace {

std::string name_of(const kgraph::KnowledgeGraph& g, const std::string& title) {
    return g.node(title).string_or("title", title);
}

// Titles reachable from `start` over transitions, nearest first.
std::vector<std::string> reachable(const kgraph::KnowledgeGraph& g, const std::string& start) {
    std::vector<std::string> order;
    std::set<std::string> seen{start};
    std::deque<std::string> queue{start};
    while (!queue.empty()) {
        const auto at = queue.front();
        queue.pop_front();
        for (const auto& next : kgraph::adjacent_titles(g, at)) {
            if (seen.insert(next).second) {
                order.push_back(next);
                queue.push_back(next);
            }
        }
    }
    return order;
}

// Titles with active openings in at least two cities, with two such cities.
std::vector<std::tuple<std::string, std::string, std::string>> comparable(const kgraph::KnowledgeGraph& g) {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto* t : g.nodes_with_label(kgraph::Label::JobTitle)) {
        std::set<std::string> cities;
        for (const auto* o : kgraph::openings_for_title(g, t->id, true)) cities.insert(o->string_or("city"));
        if (cities.size() >= 2) out.emplace_back(t->id, *cities.begin(), *std::next(cities.begin()));
    }
    return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct RankingQuality {
    double hit = 0.0, ndcg = 0.0, map = 0.0;
};

// Each clicked impression asks whether the clicks land in the top k of a
// ranking over every active opening, not just the shown slate (a slate of k
// would make hit trivially 1).
RankingQuality ranking_quality(const SyntheticWorld& world, const tools::ScoringWeights& weights) {
    RankingQuality q;
    std::size_t n = 0;
    static const tools::InterestState kNone;
    std::vector<std::string> catalogue;
    for (const auto* t : world.graph->nodes_with_label(kgraph::Label::JobTitle)) {
        for (const auto* o : kgraph::openings_for_title(*world.graph, t->id, true)) catalogue.push_back(o->id);
    }
    std::map<std::string, std::vector<std::string>> cached;  // user -> ranked ids; interest is fixed per user
    for (const auto& r : world.clicks.records) {
        if (r.clicked.empty()) continue;
        auto [slot, fresh] = cached.try_emplace(r.user);
        if (fresh) {
            const auto& profile = world.profiles.at(r.user);
            auto it = world.interests.find(r.user);
            for (const auto& s : tools::rank_openings(*world.graph, profile,
                                                      it == world.interests.end() ? kNone : it->second, weights,
                                                      catalogue, kRankCutoff)) {
                slot->second.push_back(s.opening);
            }
        }
        const auto& ids = slot->second;
        const std::set<std::string> relevant(r.clicked.begin(), r.clicked.end());
        q.hit += hit_at_k(ids, relevant, kRankCutoff);
        q.ndcg += ndcg_at_k(ids, relevant, kRankCutoff);
        q.map += map_at_k(ids, relevant, kRankCutoff);
        ++n;
    }
    if (n > 0) {
        q.hit /= static_cast<double>(n);
        q.ndcg /= static_cast<double>(n);
        q.map /= static_cast<double>(n);
    }
    return q;
}

json ttest_json(const TTestResult& t) {
    auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(x > 0 ? "inf" : "-inf"); };
    return {{"t", finite(t.t)}, {"df", t.df}, {"p", t.p}};
}

}  // namespace

bool TargetPredicate::operator()(const std::string& response) const {
    for (const auto& s : all_of) {
        if (response.find(s) == std::string::npos) return false;
    }
    if (any_of.empty()) return true;
    return std::any_of(any_of.begin(), any_of.end(),
                       [&](const std::string& s) { return response.find(s) != std::string::npos; });
}

json scripts_to_json(const std::vector<DialogueScript>& scripts) {
    json out = json::array();
    for (const auto& s : scripts) {
        out.push_back({{"id", s.id},
                       {"user", s.user},
                       {"kind", s.kind},
                       {"messages", s.messages},
                       {"target", {{"all_of", s.target.all_of}, {"any_of", s.target.any_of}}}});
    }
    return out;
}

std::vector<DialogueScript> scripts_from_json(const json& j) {
    std::vector<DialogueScript> out;
    try {
        for (const auto& s : j) {
            DialogueScript d;
            d.id = s.at("id").get<std::string>();
            d.user = s.at("user").get<std::string>();
            d.kind = s.value("kind", std::string{});
            d.messages = s.at("messages").get<std::vector<std::string>>();
            const auto& t = s.at("target");
            d.target.all_of = t.value("all_of", std::vector<std::string>{});
            d.target.any_of = t.value("any_of", std::vector<std::string>{});
            if (d.messages.empty()) throw Error(Errc::ConfigInvalid, "script " + d.id + " has no messages");
            out.push_back(std::move(d));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigInvalid, std::string("scripts: ") + e.what());
    }
    return out;
}

std::vector<DialogueScript> load_scripts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigInvalid, "cannot open scripts " + path);
    try {
        return scripts_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigInvalid, "scripts " + path + ": " + e.what());
    }
}

std::vector<DialogueScript> make_scripts(const SyntheticWorld& world, std::size_t count, double simple_fraction,
                                         std::uint64_t seed) {
    if (!(simple_fraction >= 0.0 && simple_fraction <= 1.0)) throw Error(Errc::ConfigInvalid, "simple_fraction");
    if (world.profiles.empty()) throw Error(Errc::ConfigInvalid, "world has no users");
    const auto& g = *world.graph;
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::vector<std::string> users;
    for (const auto& [id, p] : world.profiles) users.push_back(id);
    const auto compare_pool = comparable(g);

    const auto simple_count = static_cast<std::size_t>(std::llround(simple_fraction * static_cast<double>(count)));
    std::vector<bool> simple(count, false);
    std::fill(simple.begin(), simple.begin() + static_cast<long>(simple_count), true);
    std::shuffle(simple.begin(), simple.end(), rng);

    std::vector<DialogueScript> out;
    for (std::size_t i = 0; i < count; ++i) {
        DialogueScript s;
        s.id = "script_" + std::to_string(i);
        s.user = users[pick(users.size())];
        const auto& profile = world.profiles.at(s.user);
        const auto here = name_of(g, profile.current_title);
        if (simple[i]) {
            s.kind = "simple";
            switch (pick(4)) {
                case 0:
                    s.messages = {"what is my application status?"};
                    s.target.any_of = {"application"};
                    break;
                case 1:
                    s.messages = {"What comes after " + here + "?"};
                    s.target.all_of = {"Career growth paths:"};
                    break;
                case 2:
                    s.messages = {"what skills does a " + here + " need?"};
                    s.target.all_of = {"Skills required for " + here};
                    break;
                default:
                    s.messages = {"recommend jobs for me"};
                    s.target.all_of = {"Recommended openings:"};
                    break;
            }
        } else {
            s.kind = "complex";
            const auto targets = reachable(g, profile.current_title);
            const std::size_t kind = pick(4);
            if (kind == 0 && !compare_pool.empty()) {
                const auto& [title, a, b] = compare_pool[pick(compare_pool.size())];
                s.messages = {"Which city has more " + name_of(g, title) + " job openings, " + a + " or " + b + "?"};
                s.target.any_of = {"openings than", "the same number of"};
            } else if (kind == 1 && !targets.empty()) {
                const auto dest = name_of(g, targets[pick(std::min<std::size_t>(targets.size(), 4))]);
                s.messages = {"how do I become a " + dest + "?"};
                s.target.all_of = {"Career path:", dest};
            } else if (kind == 2 && !targets.empty()) {
                // The first message is too vague; the follow-up names the goal.
                const auto dest = name_of(g, targets[pick(std::min<std::size_t>(targets.size(), 4))]);
                s.messages = {"I am thinking about my next move", "how do I become a " + dest + "?"};
                s.target.all_of = {"Career path:", dest};
            } else {
                s.messages = {"can you create a career development plan for me?"};
                s.target.all_of = {"Career growth paths:"};
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

SimulationResult simulate_dialogues(const service::ServiceConfig& config, const std::vector<DialogueScript>& scripts,
                                    const SyntheticWorld& world) {
    if (scripts.empty()) throw Error(Errc::ContractViolation, "no scripts to simulate");
    SimulationResult out;
    const auto backend = service::make_backend(config, *world.graph);
    const auto profiles = std::make_shared<const service::InMemoryProfileClient>(world.profiles);
    const auto applications = std::make_shared<const tools::ApplicationStore>(world.applications);
    for (const auto& script : scripts) {
        int rounds = kMaxRounds;
        try {
            service::ServiceDeps deps;
            deps.graph = world.graph;
            deps.applications = applications;
            deps.backend = backend;
            deps.profiles = profiles;
            auto store = std::make_shared<service::InMemoryConversationStore>();
            if (auto it = world.histories.find(script.user); it != world.histories.end()) {
                for (const auto& turn : it->second) store->append(script.user, turn);
            }
            deps.conversations = store;
            service::ChatService svc(config, deps);
            const auto session = svc.open_session(script.user).id;
            for (std::size_t m = 0; m < script.messages.size() && m < static_cast<std::size_t>(kMaxRounds); ++m) {
                const auto start = std::chrono::steady_clock::now();
                const auto events = svc.post_message(session, script.messages[m]);
                out.latency_ms.push_back(elapsed_ms(start));
                const auto& last = events.back();
                if (last.at("type") == "error") {
                    throw Error(Errc::ContractViolation, last.at("payload").value("message", std::string{"error event"}));
                }
                if (script.target(last.at("payload").at("text").get<std::string>())) {
                    rounds = static_cast<int>(m + 1);
                    break;
                }
            }
        } catch (const std::exception& e) {
            rounds = kMaxRounds;
            out.errors.push_back(script.id + ": " + e.what());
        }
        out.rounds.push_back(rounds);
    }
    return out;
}

std::map<std::string, std::string> predict_next_titles(const SyntheticWorld& world, const tools::ScoringWeights& weights) {
    std::map<std::string, std::string> out;
    static const tools::InterestState kNone;
    tools::GrowthOptions options;
    options.n_paths = 1;
    options.depth = 1;
    for (const auto& r : world.test()) {
        const auto& profile = world.profiles.at(r.user);
        auto it = world.interests.find(r.user);
        const auto paths = tools::career_growth(profile, it == world.interests.end() ? kNone : it->second, *world.graph,
                                                weights, options);
        if (!paths.empty() && paths.front().titles.size() > 1) out[r.user] = paths.front().titles[1];
    }
    return out;
}

const VariantMetrics& AbReport::variant(const std::string& name) const {
    for (const auto& v : variants) {
        if (v.name == name) return v;
    }
    throw Error(Errc::ConfigInvalid, "no variant " + name + " in report");
}

json AbReport::to_json() const {
    json vs = json::array();
    for (const auto& v : variants) {
        vs.push_back({{"name", v.name},
                      {"n", v.n},
                      {"hit_at_10", v.hit},
                      {"ndcg_at_10", v.ndcg},
                      {"map_at_10", v.map},
                      {"pct_hit_real_trans", v.pct_hit_real_trans},
                      {"mean_rounds", v.mean_rounds},
                      {"latency_ms", {{"mean", v.latency.mean}, {"p50", v.latency.p50}, {"p95", v.latency.p95}}},
                      {"script_ids", v.script_ids},
                      {"rounds", v.rounds},
                      {"errors", v.errors}});
    }
    json ts = json::array();
    for (const auto& t : tests) {
        ts.push_back({{"a", t.a}, {"b", t.b}, {"rounds", ttest_json(t.rounds)}, {"latency", ttest_json(t.latency)}});
    }
    return {{"variants", vs}, {"tests", ts}, {"frequency_pct_hit_real_trans", frequency_pct_hit_real_trans}};
}

AbReport run_ab(const std::vector<VariantSpec>& variants, const SyntheticWorld& world,
                const std::vector<DialogueScript>& scripts, std::uint64_t seed, Assignment assignment) {
    if (variants.size() < 2) throw Error(Errc::ConfigInvalid, "an A/B run needs at least two variants");
    std::vector<std::vector<DialogueScript>> assigned(variants.size());
    if (assignment == Assignment::Crossed) {
        for (auto& a : assigned) a = scripts;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, variants.size() - 1);
        for (const auto& s : scripts) assigned[pick(rng)].push_back(s);
    }

    AbReport report;
    const auto training = world.training();
    std::map<std::string, std::string> baseline;
    for (const auto& r : world.test()) {
        try {
            baseline[r.user] = frequency_baseline(training, r.from);
        } catch (const Error&) {
            // Titles never seen in training have no baseline prediction.
        }
    }
    report.frequency_pct_hit_real_trans = hit_real_transitions(baseline, world.test());

    for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto& spec = variants[i];
        VariantMetrics m;
        m.name = spec.name;
        m.n = assigned[i].size();
        const auto quality = ranking_quality(world, spec.config.weights);
        m.hit = quality.hit;
        m.ndcg = quality.ndcg;
        m.map = quality.map;
        m.pct_hit_real_trans = hit_real_transitions(predict_next_titles(world, spec.config.weights), world.test());
        if (!assigned[i].empty()) {
            auto sim = simulate_dialogues(spec.config, assigned[i], world);
            for (const auto& script : assigned[i]) m.script_ids.push_back(script.id);
            m.rounds = std::move(sim.rounds);
            m.latency_ms = std::move(sim.latency_ms);
            m.errors = std::move(sim.errors);
            double total = 0.0;
            for (int r : m.rounds) total += r;
            m.mean_rounds = total / static_cast<double>(m.rounds.size());
            m.latency = summarize_latency(m.latency_ms);
        }
        spdlog::info("variant {}: {} scripts, mean rounds {:.2f}, mean latency {:.1f} ms", m.name, m.n, m.mean_rounds,
                     m.latency.mean);
        report.variants.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < report.variants.size(); ++i) {
        for (std::size_t j = i + 1; j < report.variants.size(); ++j) {
            const auto& a = report.variants[i];
            const auto& b = report.variants[j];
            std::vector<double> ra(a.rounds.begin(), a.rounds.end()), rb(b.rounds.begin(), b.rounds.end());
            report.tests.push_back({a.name, b.name, welch_t_test(ra, rb), welch_t_test(a.latency_ms, b.latency_ms)});
        }
    }
    return report;
}

}  // namespace jobrec::bench
