#include "jobrec/kgraph/graph.hpp"
#include "jobrec/kgraph/templates.hpp"

#include "path_oracle.hpp"
#include "test_helpers.hpp"

#include <algorithm>
#include <sstream>

using namespace jobrec;
using namespace jobrec::kgraph;

namespace {

Node title(const std::string& id) { return Node{id, Label::JobTitle, {{"title", id}}}; }

Node opening(const std::string& id, const std::string& date, bool active, const std::string& city = "Seattle") {
    return Node{id, Label::Opening,
                {{"posting_date", Date{date}}, {"active", active}, {"city", city}, {"job_family", std::string("Tech")}}};
}

Edge transition(const std::string& a, const std::string& b, double w) {
    return Edge{a, b, Relation::TransitionsTo, w};
}

}  // namespace

TEST_CASE("load_graph builds the adjacency index") {
    SUBCASE("empty") {
        auto g = load_graph({});
        CHECK(g.node_count() == 0);
        CHECK(g.edge_count() == 0);
    }
    SUBCASE("dangling edge") {
        CHECK_ERRC(load_graph({title("A"), title("B"), transition("A", "X", 1)}), Errc::DanglingEdge);
    }
    SUBCASE("duplicate node and edge") {
        CHECK_ERRC(load_graph({title("A"), title("A")}), Errc::DuplicateNode);
        CHECK_ERRC(load_graph({title("A"), title("B"), transition("A", "B", 1), transition("A", "B", 2)}),
                   Errc::DuplicateEdge);
    }
    SUBCASE("three titles, two transitions") {
        std::vector<Record> records{title("A"), title("B"), title("C"), transition("A", "B", 1),
                                    transition("B", "C", 2)};
        auto g = load_graph(records);
        for (const auto* id : {"A", "B", "C"}) {
            std::vector<Edge> naive;
            for (const auto& r : records) {
                if (auto* e = std::get_if<Edge>(&r); e && e->src == id) naive.push_back(*e);
            }
            std::vector<Edge> indexed;
            for (const Edge* e : g.out_edges(id)) indexed.push_back(*e);
            CHECK(indexed == naive);
        }
        CHECK(g.out_edges("A").size() == 1);
        CHECK(g.out_edges("A")[0]->dst == "B");
        CHECK(g.out_edges("C").empty());
    }
}

TEST_CASE("record lines round-trip bit-exactly") {
    std::vector<Record> records{title("A"), opening("o1", "2024-03-01", true),
                                Node{"u", Label::Associate, {{"education", std::int64_t{3}}, {"score", 0.25}}},
                                Edge{"A", "o1", Relation::HasOpening, 1.0}};
    std::ostringstream first;
    write_records(first, records);
    std::istringstream in(first.str());
    auto g = load_graph(read_records(in));
    std::ostringstream second;
    write_records(second, g.records());
    CHECK(first.str() == second.str());
    CHECK(g.node("o1").date("posting_date")->iso == "2024-03-01");
    CHECK(g.node("u").integer("education") == 3);
}

TEST_CASE("adjacent_titles") {
    auto g = load_graph({title("A"), title("B"), title("C"), title("D"), transition("A", "B", 1.0),
                         transition("A", "C", 0.5)});
    CHECK(adjacent_titles(g, "D").empty());
    CHECK(adjacent_titles(g, "A") == std::vector<std::string>{"C", "B"});
    CHECK_ERRC(adjacent_titles(g, "X"), Errc::NodeNotFound);

    auto g2 = load_graph({title("A"), opening("o", "2024-01-01", true)});
    CHECK_ERRC(adjacent_titles(g2, "o"), Errc::WrongLabel);
}

TEST_CASE("adjacent_titles equals the outgoing transition set in sort order") {
    for (std::uint32_t seed = 0; seed < 50; ++seed) {
        auto g = oracle::random_title_graph(seed, 8, 20);
        for (const auto* n : g.nodes_with_label(Label::JobTitle)) {
            std::vector<std::pair<double, std::string>> expected;
            for (const auto& e : g.edges()) {
                if (e.src == n->id) expected.emplace_back(e.weight, e.dst);
            }
            std::sort(expected.begin(), expected.end());
            auto got = adjacent_titles(g, n->id);
            REQUIRE(got.size() == expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expected[i].second);
        }
    }
}

TEST_CASE("openings_for_title") {
    auto g = load_graph({title("T"), title("Empty"), opening("o1", "2024-01-01", true),
                         opening("o2", "2024-02-01", false), opening("o3", "2024-03-01", true),
                         Edge{"T", "o1", Relation::HasOpening}, Edge{"T", "o2", Relation::HasOpening},
                         Edge{"T", "o3", Relation::HasOpening}});
    CHECK(openings_for_title(g, "Empty", false).empty());

    auto top2 = openings_for_title(g, "T", false, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0]->id == "o3");
    CHECK(top2[1]->id == "o2");

    auto active = openings_for_title(g, "T", true);
    CHECK(active.size() == 2);
    CHECK(std::none_of(active.begin(), active.end(), [](const Node* o) { return o->id == "o2"; }));

    CHECK(openings_for_title(g, "T", false).size() == g.out_edges("T", Relation::HasOpening).size());
    CHECK_ERRC(openings_for_title(g, "nope", false), Errc::NodeNotFound);
}

TEST_CASE("weighted_shortest_path") {
    auto g = load_graph({title("A"), title("B"), title("C"), transition("A", "B", 1)});
    auto self = weighted_shortest_path(g, "A", "A");
    CHECK(self.nodes == std::vector<std::string>{"A"});
    CHECK(self.total_weight == 0.0);
    CHECK_ERRC(weighted_shortest_path(g, "A", "C"), Errc::NoPath);
    CHECK_ERRC(weighted_shortest_path(g, "A", "Z"), Errc::NodeNotFound);
}

TEST_CASE("weighted_shortest_path ties resolve lexicographically") {
    auto g = load_graph({title("s"), title("a"), title("b"), title("t"), transition("s", "b", 1),
                         transition("b", "t", 1), transition("s", "a", 1), transition("a", "t", 1)});
    auto p = weighted_shortest_path(g, "s", "t");
    CHECK(p.nodes == std::vector<std::string>{"s", "a", "t"});
    CHECK(p.total_weight == 2.0);
}

TEST_CASE("weighted_shortest_path matches brute-force enumeration") {
    // Seeded 6-node, 10-edge graph first, then the wider sweep.
    for (std::uint32_t seed = 0; seed < 150; ++seed) {
        const int n = seed == 0 ? 6 : 3 + static_cast<int>(seed % 8);
        const int m = seed == 0 ? 10 : std::min(20, n * (n - 1));
        auto g = oracle::random_title_graph(seed, n, m);
        for (const auto& src : g.nodes()) {
            for (const auto& dst : g.nodes()) {
                auto expected = oracle::brute_shortest_path(g, src.id, dst.id);
                if (!expected) {
                    CHECK_ERRC(weighted_shortest_path(g, src.id, dst.id), Errc::NoPath);
                    continue;
                }
                auto got = weighted_shortest_path(g, src.id, dst.id);
                CHECK(got.total_weight == expected->weight);
                CHECK(got.nodes == expected->nodes);
                double sum = 0.0;
                for (std::size_t i = 0; i + 1 < got.nodes.size(); ++i) {
                    auto edges = g.out_edges(got.nodes[i], Relation::TransitionsTo);
                    auto it = std::find_if(edges.begin(), edges.end(),
                                           [&](const Edge* e) { return e->dst == got.nodes[i + 1]; });
                    REQUIRE(it != edges.end());
                    sum += (*it)->weight;
                }
                CHECK(sum == got.total_weight);
            }
        }
    }
}

TEST_CASE("templates") {
    std::vector<Record> r{
        Node{"t_mle", Label::JobTitle, {{"title", std::string("ML Engineer")}, {"aliases", std::string("machine learning engineer")}}},
        Node{"python", Label::Skill, {{"name", std::string("Python")}, {"resource", std::string("Python course")}}},
        Node{"sql", Label::Skill, {{"name", std::string("SQL")}}},
        Node{"u1", Label::Associate, {{"name", std::string("Una")}}},
        Edge{"t_mle", "python", Relation::RequiresSkill},
        Edge{"t_mle", "sql", Relation::RequiresSkill},
        Edge{"u1", "python", Relation::HasSkill},
        Edge{"u1", "sql", Relation::HasSkill},
    };
    int i = 0;
    for (auto [city, active] : std::vector<std::pair<std::string, bool>>{
             {"Seattle", true}, {"Seattle", true}, {"Seattle", true}, {"Seattle", false}, {"Sunnyvale", true}}) {
        const std::string id = "o" + std::to_string(i++);
        r.emplace_back(opening(id, "2024-05-0" + std::to_string(i), active, city));
        r.emplace_back(Edge{"t_mle", id, Relation::HasOpening});
    }
    auto g = load_graph(r);

    CHECK_ERRC(execute_template(g, "no_such_template", {}), Errc::TemplateNotFound);
    CHECK_ERRC(execute_template(g, "openings_count_by_title_city", {{"title", "ML Engineer"}}),
               Errc::MissingParameter);

    auto count = execute_template(g, "openings_count_by_title_city", {{"title", "ML Engineer"}, {"city", "Seattle"}});
    CHECK(count[0]["count"] == 3);
    auto by_alias = execute_template(g, "openings_count_by_title_city",
                                     {{"title", "Machine Learning Engineer"}, {"city", "sunnyvale"}});
    CHECK(by_alias[0]["count"] == 1);

    CHECK(execute_template(g, "skill_gap", {{"user", "u1"}, {"title", "t_mle"}}).empty());
    CHECK(execute_template(g, "skills_for_title", {{"title", "t_mle"}}).size() == 2);
    CHECK(execute_template(g, "openings_by_title", {{"title", "t_mle"}}).size() == 4);
    auto res = execute_template(g, "learning_resources", {{"skills", "python, sql"}});
    REQUIRE(res.size() == 1);
    CHECK(res[0]["resource"] == "Python course");
}

TEST_CASE("every builtin template documents its parameters") {
    const auto& reg = TemplateRegistry::builtin();
    for (const auto& id : reg.ids()) {
        for (const auto& p : reg.find(id)->parameters) CHECK(reg.find(id)->semantics.find("$" + p) != std::string::npos);
    }
    TemplateRegistry r;
    CHECK_ERRC(r.add({"bad", {"x"}, "no placeholder", {}}), Errc::ContractViolation);
}
