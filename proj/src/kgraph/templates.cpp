#include "jobrec/kgraph/templates.hpp"

#include "jobrec/error.hpp"

#include <algorithm>
#include <sstream>

namespace jobrec::kgraph {

using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        auto b = item.find_first_not_of(' ');
        auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) continue;
        items.push_back(lowercase(item.substr(b, e - b + 1)));
    }
    return items;
}

json opening_row(const Node& o, const Node& title) {
    return json{{"opening", o.id},
                {"title", title.id},
                {"title_name", title.string_or("title", title.id)},
                {"city", o.string_or("city")},
                {"job_family", o.string_or("job_family")},
                {"posting_date", o.string_or("posting_date")}};
}

Rows openings_count_by_title_city(const KnowledgeGraph& g, const Bindings& b) {
    const Node& title = resolve_title(g, b.at("title"));
    const std::string city = lowercase(b.at("city"));
    std::int64_t count = 0;
    for (const Node* o : openings_for_title(g, title.id, true)) {
        if (lowercase(o->string_or("city")) == city) ++count;
    }
    return json::array({json{{"title", title.id}, {"city", b.at("city")}, {"count", count}}});
}

Rows openings_by_title(const KnowledgeGraph& g, const Bindings& b) {
    const Node& title = resolve_title(g, b.at("title"));
    Rows rows = json::array();
    for (const Node* o : openings_for_title(g, title.id, true)) rows.push_back(opening_row(*o, title));
    return rows;
}

Rows skills_for_title(const KnowledgeGraph& g, const Bindings& b) {
    const Node& title = resolve_title(g, b.at("title"));
    Rows rows = json::array();
    for (const auto& s : required_skills(g, title)) {
        const Node* skill = g.find(s);
        rows.push_back({{"skill", s}, {"name", skill ? skill->string_or("name", s) : s}});
    }
    return rows;
}

Rows skill_gap_rows(const KnowledgeGraph& g, const Bindings& b) {
    const Node& user = g.node(b.at("user"));
    if (user.label != Label::Associate) {
        throw Error(Errc::WrongLabel, "skill_gap expects an Associate, got " + user.id);
    }
    std::set<std::string> held;
    for (const Edge* e : g.out_edges(user.id, Relation::HasSkill)) held.insert(e->dst);
    Rows rows = json::array();
    for (const auto& s : skill_gap(g, held, resolve_title(g, b.at("title")))) rows.push_back({{"skill", s}});
    return rows;
}

Rows learning_resources(const KnowledgeGraph& g, const Bindings& b) {
    Rows rows = json::array();
    for (const auto& s : split_list(b.at("skills"))) {
        const Node* skill = g.find(s);
        if (!skill || skill->label != Label::Skill) continue;
        auto resource = skill->string_or("resource");
        if (!resource.empty()) rows.push_back({{"skill", s}, {"resource", resource}});
    }
    return rows;
}

Rows mentors_for_skills(const KnowledgeGraph& g, const Bindings& b) {
    const auto wanted = split_list(b.at("skills"));
    const std::string target = b.at("title");
    struct Candidate {
        const Node* associate;
        std::int64_t matched;
        bool in_target;
    };
    std::map<std::string, Candidate> candidates;
    for (const auto& s : wanted) {
        for (const Edge* e : g.in_edges(s, Relation::HasSkill)) {
            const Node& a = g.node(e->src);
            if (a.label != Label::Associate || !a.boolean("mentor").value_or(false)) continue;
            auto& c = candidates.try_emplace(a.id, Candidate{&a, 0, false}).first->second;
            ++c.matched;
            c.in_target = !target.empty() && a.string_or("title") == target;
        }
    }
    std::vector<Candidate> ranked;
    for (auto& [id, c] : candidates) ranked.push_back(c);
    std::sort(ranked.begin(), ranked.end(), [](const Candidate& x, const Candidate& y) {
        if (x.matched != y.matched) return x.matched > y.matched;
        if (x.in_target != y.in_target) return x.in_target;
        return x.associate->id < y.associate->id;
    });
    if (ranked.size() > 5) ranked.resize(5);
    Rows rows = json::array();
    for (const auto& c : ranked) {
        rows.push_back({{"associate", c.associate->id},
                        {"name", c.associate->string_or("name", c.associate->id)},
                        {"title", c.associate->string_or("title")},
                        {"matched", c.matched}});
    }
    return rows;
}

Rows next_titles(const KnowledgeGraph& g, const Bindings& b) {
    const Node& title = resolve_title(g, b.at("title"));
    Rows rows = json::array();
    for (const auto& id : adjacent_titles(g, title.id)) {
        const Node& t = g.node(id);
        double weight = 0.0;
        for (const Edge* e : g.out_edges(title.id, Relation::TransitionsTo)) {
            if (e->dst == id) weight = e->weight;
        }
        rows.push_back({{"title", id}, {"name", t.string_or("title", id)}, {"weight", weight}});
    }
    return rows;
}

TemplateRegistry make_builtin() {
    TemplateRegistry r;
    r.add({"openings_count_by_title_city",
           {"title", "city"},
           "MATCH (t:JobTitle {$title})-[:HAS_OPENING]->(o:Opening {active:true, city:$city}) RETURN count(o)",
           openings_count_by_title_city});
    r.add({"openings_by_title",
           {"title"},
           "MATCH (t:JobTitle {$title})-[:HAS_OPENING]->(o:Opening {active:true}) RETURN o ORDER BY o.posting_date DESC",
           openings_by_title});
    r.add({"skills_for_title",
           {"title"},
           "MATCH (t:JobTitle {$title})-[:REQUIRES_SKILL]->(s:Skill) RETURN s",
           skills_for_title});
    r.add({"skill_gap",
           {"user", "title"},
           "MATCH (t:JobTitle {$title})-[:REQUIRES_SKILL]->(s) WHERE NOT (a:Associate {$user})-[:HAS_SKILL]->(s) RETURN s",
           skill_gap_rows});
    r.add({"learning_resources",
           {"skills"},
           "MATCH (s:Skill) WHERE s.id IN $skills AND s.resource IS NOT NULL RETURN s.resource",
           learning_resources});
    r.add({"mentors_for_skills",
           {"skills", "title"},
           "MATCH (a:Associate {mentor:true})-[:HAS_SKILL]->(s:Skill) WHERE s.id IN $skills "
           "RETURN a, count(s) ORDER BY count(s) DESC, a.title = $title DESC LIMIT 5",
           mentors_for_skills});
    r.add({"next_titles",
           {"title"},
           "MATCH (t:JobTitle {$title})-[r:TRANSITIONS_TO]->(n:JobTitle) RETURN n ORDER BY r.weight",
           next_titles});
    return r;
}

}  // namespace

void TemplateRegistry::add(QueryTemplate tmpl) {
    for (const auto& p : tmpl.parameters) {
        if (tmpl.semantics.find("$" + p) == std::string::npos) {
            throw Error(Errc::ContractViolation, "template " + tmpl.id + " does not document $" + p);
        }
    }
    const std::string id = tmpl.id;
    if (!templates_.emplace(id, std::move(tmpl)).second) {
        throw Error(Errc::ContractViolation, "duplicate template id " + id);
    }
}

const QueryTemplate* TemplateRegistry::find(const std::string& id) const {
    auto it = templates_.find(id);
    return it == templates_.end() ? nullptr : &it->second;
}

std::vector<std::string> TemplateRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, t] : templates_) out.push_back(id);
    return out;
}

const TemplateRegistry& TemplateRegistry::builtin() {
    static const TemplateRegistry registry = make_builtin();
    return registry;
}

Rows execute_template(const KnowledgeGraph& graph, const std::string& template_id,
                      const Bindings& bindings, const TemplateRegistry& registry) {
    const QueryTemplate* t = registry.find(template_id);
    if (!t) throw Error(Errc::TemplateNotFound, "no template '" + template_id + "'");
    for (const auto& p : t->parameters) {
        auto it = bindings.find(p);
        if (it == bindings.end()) {
            throw Error(Errc::MissingParameter, template_id + " requires '" + p + "'");
        }
    }
    return t->procedure(graph, bindings);
}

std::string schema_description(const TemplateRegistry& registry) {
    std::ostringstream out;
    out << "Nodes: JobTitle{title,aliases,job_family}, Opening{city,region,job_family,posting_date,active,education}, "
           "Associate{name,title,mentor}, Skill{name,resource}, JobFamily{name}.\n"
           "Edges: TRANSITIONS_TO(weight), HAS_OPENING, REQUIRES_SKILL, HAS_SKILL, IN_FAMILY.\n"
           "Templates:\n";
    for (const auto& id : registry.ids()) {
        const auto* t = registry.find(id);
        out << "- " << id << "(";
        for (std::size_t i = 0; i < t->parameters.size(); ++i) out << (i ? ", " : "") << t->parameters[i];
        out << "): " << t->semantics << '\n';
    }
    return out.str();
}

std::set<std::string> required_skills(const KnowledgeGraph& graph, const Node& title) {
    std::set<std::string> skills;
    for (const Edge* e : graph.out_edges(title.id, Relation::RequiresSkill)) skills.insert(e->dst);
    return skills;
}

std::vector<std::string> skill_gap(const KnowledgeGraph& graph, const std::set<std::string>& held,
                                   const Node& title) {
    std::vector<std::string> gap;
    for (const auto& s : required_skills(graph, title)) {
        if (!held.count(s)) gap.push_back(s);
    }
    return gap;
}

const Node& resolve_title(const KnowledgeGraph& graph, const std::string& name) {
    const Node* n = graph.find_title(name);
    if (!n) throw Error(Errc::NodeNotFound, "no job title '" + name + "'");
    return *n;
}

}  // namespace jobrec::kgraph
