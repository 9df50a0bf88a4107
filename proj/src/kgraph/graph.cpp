#include "jobrec/kgraph/graph.hpp"

#include "jobrec/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace jobrec::kgraph {

using nlohmann::json;

namespace {

bool looks_like_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

json value_to_json(const Value& value) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Date>) {
                return v.iso;
            } else {
                return v;
            }
        },
        value);
}

Value value_from_json(const std::string& key, const json& j) {
    switch (j.type()) {
        case json::value_t::string: {
            const auto& s = j.get_ref<const std::string&>();
            if (looks_like_date(s)) return Date{s};
            return s;
        }
        case json::value_t::boolean: return j.get<bool>();
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return j.get<std::int64_t>();
        case json::value_t::number_float: return j.get<double>();
        default:
            throw Error(Errc::InvalidRecord, "property '" + key + "' is not a scalar");
    }
}

}  // namespace

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view to_string(Label label) noexcept {
    switch (label) {
        case Label::JobTitle: return "JobTitle";
        case Label::Opening: return "Opening";
        case Label::Associate: return "Associate";
        case Label::Skill: return "Skill";
        case Label::JobFamily: return "JobFamily";
    }
    return "?";
}

std::string_view to_string(Relation relation) noexcept {
    switch (relation) {
        case Relation::TransitionsTo: return "TRANSITIONS_TO";
        case Relation::HasOpening: return "HAS_OPENING";
        case Relation::RequiresSkill: return "REQUIRES_SKILL";
        case Relation::HasSkill: return "HAS_SKILL";
        case Relation::InFamily: return "IN_FAMILY";
    }
    return "?";
}

Label parse_label(std::string_view text) {
    for (auto l : {Label::JobTitle, Label::Opening, Label::Associate, Label::Skill, Label::JobFamily}) {
        if (to_string(l) == text) return l;
    }
    throw Error(Errc::InvalidRecord, "unknown label '" + std::string(text) + "'");
}

Relation parse_relation(std::string_view text) {
    for (auto r : {Relation::TransitionsTo, Relation::HasOpening, Relation::RequiresSkill,
                   Relation::HasSkill, Relation::InFamily}) {
        if (to_string(r) == text) return r;
    }
    throw Error(Errc::InvalidRecord, "unknown relation '" + std::string(text) + "'");
}

const Value* Node::find(const std::string& key) const {
    auto it = properties.find(key);
    return it == properties.end() ? nullptr : &it->second;
}

std::string Node::string_or(const std::string& key, std::string fallback) const {
    if (const auto* v = find(key)) {
        if (const auto* s = std::get_if<std::string>(v)) return *s;
        if (const auto* d = std::get_if<Date>(v)) return d->iso;
    }
    return fallback;
}

std::optional<std::int64_t> Node::integer(const std::string& key) const {
    if (const auto* v = find(key)) {
        if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
        if (const auto* d = std::get_if<double>(v)) return static_cast<std::int64_t>(*d);
    }
    return std::nullopt;
}

std::optional<bool> Node::boolean(const std::string& key) const {
    if (const auto* v = find(key)) {
        if (const auto* b = std::get_if<bool>(v)) return *b;
    }
    return std::nullopt;
}

std::optional<Date> Node::date(const std::string& key) const {
    if (const auto* v = find(key)) {
        if (const auto* d = std::get_if<Date>(v)) return *d;
    }
    return std::nullopt;
}

const Node* KnowledgeGraph::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

const Node& KnowledgeGraph::node(std::string_view id) const {
    const Node* n = find(id);
    if (!n) throw Error(Errc::NodeNotFound, "no node '" + std::string(id) + "'");
    return *n;
}

std::vector<const Edge*> KnowledgeGraph::out_edges(std::string_view id) const {
    std::vector<const Edge*> result;
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return result;
    for (auto e : out_[it->second]) result.push_back(&edges_[e]);
    return result;
}

std::vector<const Edge*> KnowledgeGraph::out_edges(std::string_view id, Relation relation) const {
    auto all = out_edges(id);
    std::erase_if(all, [relation](const Edge* e) { return e->relation != relation; });
    return all;
}

std::vector<const Edge*> KnowledgeGraph::in_edges(std::string_view id, Relation relation) const {
    std::vector<const Edge*> result;
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return result;
    for (auto e : in_[it->second]) {
        if (edges_[e].relation == relation) result.push_back(&edges_[e]);
    }
    return result;
}

const Node* KnowledgeGraph::find_title(std::string_view name) const {
    if (const Node* n = find(name); n && n->label == Label::JobTitle) return n;
    const std::string wanted = lowercase(name);
    for (const auto& n : nodes_) {
        if (n.label != Label::JobTitle) continue;
        if (lowercase(n.string_or("title")) == wanted) return &n;
        std::stringstream aliases(n.string_or("aliases"));
        for (std::string alias; std::getline(aliases, alias, '|');) {
            if (!alias.empty() && lowercase(alias) == wanted) return &n;
        }
    }
    return nullptr;
}

std::vector<const Node*> KnowledgeGraph::nodes_with_label(Label label) const {
    std::vector<const Node*> result;
    for (const auto& n : nodes_) {
        if (n.label == label) result.push_back(&n);
    }
    return result;
}

std::vector<Record> KnowledgeGraph::records() const {
    std::vector<Record> result;
    result.reserve(record_order_.size());
    for (auto [is_edge, i] : record_order_) {
        if (is_edge) {
            result.emplace_back(edges_[i]);
        } else {
            result.emplace_back(nodes_[i]);
        }
    }
    return result;
}

KnowledgeGraph load_graph(const std::vector<Record>& records) {
    KnowledgeGraph g;
    // Nodes first so that edges may precede their endpoints in the input.
    for (const auto& r : records) {
        const auto* n = std::get_if<Node>(&r);
        if (!n) continue;
        if (n->id.empty()) throw Error(Errc::InvalidRecord, "node with empty id");
        if (!g.index_.emplace(n->id, g.nodes_.size()).second) {
            throw Error(Errc::DuplicateNode, "duplicate node id '" + n->id + "'");
        }
        g.nodes_.push_back(*n);
    }
    g.out_.resize(g.nodes_.size());
    g.in_.resize(g.nodes_.size());

    std::set<std::tuple<std::string, std::string, Relation>> seen;
    std::size_t node_cursor = 0;
    for (const auto& r : records) {
        if (std::holds_alternative<Node>(r)) {
            g.record_order_.emplace_back(false, node_cursor++);
            continue;
        }
        const auto& e = std::get<Edge>(r);
        auto src = g.index_.find(e.src);
        auto dst = g.index_.find(e.dst);
        if (src == g.index_.end() || dst == g.index_.end()) {
            throw Error(Errc::DanglingEdge, "edge " + e.src + " -> " + e.dst + " references a missing node");
        }
        if (!(e.weight >= 0.0)) {
            throw Error(Errc::InvalidRecord, "negative edge weight on " + e.src + " -> " + e.dst);
        }
        if (!seen.emplace(e.src, e.dst, e.relation).second) {
            throw Error(Errc::DuplicateEdge, "duplicate edge " + e.src + " -> " + e.dst + " (" +
                                                 std::string(to_string(e.relation)) + ")");
        }
        const std::size_t idx = g.edges_.size();
        g.edges_.push_back(e);
        g.out_[src->second].push_back(idx);
        g.in_[dst->second].push_back(idx);
        g.record_order_.emplace_back(true, idx);
    }
    return g;
}

std::string record_to_line(const Record& record) {
    json j;
    if (const auto* n = std::get_if<Node>(&record)) {
        for (const auto& [key, value] : n->properties) j[key] = value_to_json(value);
        j["kind"] = "node";
        j["id"] = n->id;
        j["label"] = to_string(n->label);
    } else {
        const auto& e = std::get<Edge>(record);
        j["kind"] = "edge";
        j["src"] = e.src;
        j["dst"] = e.dst;
        j["relation"] = to_string(e.relation);
        j["weight"] = e.weight;
    }
    return j.dump();
}

Record record_from_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidRecord, e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw Error(Errc::InvalidRecord, "record without a kind field");
    }
    const auto kind = j["kind"].get<std::string>();
    try {
        if (kind == "node") {
            Node n;
            n.id = j.at("id").get<std::string>();
            n.label = parse_label(j.at("label").get<std::string>());
            for (const auto& [key, value] : j.items()) {
                if (key == "kind" || key == "id" || key == "label") continue;
                n.properties.emplace(key, value_from_json(key, value));
            }
            return n;
        }
        if (kind == "edge") {
            Edge e;
            e.src = j.at("src").get<std::string>();
            e.dst = j.at("dst").get<std::string>();
            e.relation = parse_relation(j.at("relation").get<std::string>());
            e.weight = j.contains("weight") ? j["weight"].get<double>() : 1.0;
            return e;
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidRecord, e.what());
    }
    throw Error(Errc::InvalidRecord, "unknown record kind '" + kind + "'");
}

std::vector<Record> read_records(std::istream& in) {
    std::vector<Record> records;
    for (std::string line; std::getline(in, line);) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        records.push_back(record_from_line(line));
    }
    return records;
}

void write_records(std::ostream& out, const std::vector<Record>& records) {
    for (const auto& r : records) out << record_to_line(r) << '\n';
}

KnowledgeGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidRecord, "cannot open graph file " + path);
    return load_graph(read_records(in));
}

void save_graph_file(const KnowledgeGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidRecord, "cannot write graph file " + path);
    write_records(out, graph.records());
}

namespace {

const Node& require_title(const KnowledgeGraph& graph, std::string_view title) {
    const Node& n = graph.node(title);
    if (n.label != Label::JobTitle) {
        throw Error(Errc::WrongLabel, "node '" + n.id + "' is " + std::string(to_string(n.label)) +
                                          ", expected JobTitle");
    }
    return n;
}

}  // namespace

std::vector<std::string> adjacent_titles(const KnowledgeGraph& graph, std::string_view title) {
    const Node& from = require_title(graph, title);
    std::vector<const Edge*> edges;
    for (const Edge* e : graph.out_edges(from.id, Relation::TransitionsTo)) {
        if (graph.node(e->dst).label == Label::JobTitle) edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) {
        return std::tie(a->weight, a->dst) < std::tie(b->weight, b->dst);
    });
    std::vector<std::string> ids;
    ids.reserve(edges.size());
    for (const Edge* e : edges) ids.push_back(e->dst);
    return ids;
}

std::vector<const Node*> openings_for_title(const KnowledgeGraph& graph, std::string_view title,
                                            bool active_only, std::size_t limit) {
    const Node& from = require_title(graph, title);
    std::vector<const Node*> openings;
    for (const Edge* e : graph.out_edges(from.id, Relation::HasOpening)) {
        const Node& o = graph.node(e->dst);
        if (o.label != Label::Opening) continue;
        if (active_only && !o.boolean("active").value_or(false)) continue;
        openings.push_back(&o);
    }
    std::sort(openings.begin(), openings.end(), [](const Node* a, const Node* b) {
        const auto da = a->date("posting_date").value_or(Date{});
        const auto db = b->date("posting_date").value_or(Date{});
        if (da != db) return da > db;
        return a->id < b->id;
    });
    if (openings.size() > limit) openings.resize(limit);
    return openings;
}

Path weighted_shortest_path(const KnowledgeGraph& graph, std::string_view src, std::string_view dst) {
    const Node& from = graph.node(src);
    const Node& to = graph.node(dst);
    if (from.id == to.id) return Path{{from.id}, 0.0};

    // Keys (distance, node sequence) only grow when a path is extended, so
    // settling in key order yields the lexicographically smallest optimum.
    struct Label_ {
        double dist;
        std::vector<std::string> path;
        bool operator>(const Label_& o) const { return std::tie(dist, path) > std::tie(o.dist, o.path); }
    };
    std::priority_queue<Label_, std::vector<Label_>, std::greater<>> frontier;
    std::unordered_map<std::string, Label_> best;
    std::set<std::string> settled;

    frontier.push({0.0, {from.id}});
    best[from.id] = {0.0, {from.id}};
    while (!frontier.empty()) {
        Label_ cur = frontier.top();
        frontier.pop();
        const std::string& at = cur.path.back();
        if (settled.count(at)) continue;
        settled.insert(at);
        if (at == to.id) return Path{std::move(cur.path), cur.dist};
        for (const Edge* e : graph.out_edges(at, Relation::TransitionsTo)) {
            if (settled.count(e->dst)) continue;
            Label_ next{cur.dist + e->weight, cur.path};
            next.path.push_back(e->dst);
            auto it = best.find(e->dst);
            if (it == best.end() || it->second > next) {
                best[e->dst] = next;
                frontier.push(std::move(next));
            }
        }
    }
    throw Error(Errc::NoPath, "no path from " + from.id + " to " + to.id);
}

}  // namespace jobrec::kgraph
