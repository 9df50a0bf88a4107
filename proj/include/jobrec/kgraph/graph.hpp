#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace jobrec::kgraph {

enum class Label { JobTitle, Opening, Associate, Skill, JobFamily };
enum class Relation { TransitionsTo, HasOpening, RequiresSkill, HasSkill, InFamily };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Relation relation) noexcept;
Label parse_label(std::string_view text);
Relation parse_relation(std::string_view text);

// ISO-8601 calendar date; lexical order is chronological order.
struct Date {
    std::string iso;
    auto operator<=>(const Date&) const = default;
};

using Value = std::variant<std::string, std::int64_t, double, bool, Date>;
using Properties = std::map<std::string, Value>;

struct Node {
    std::string id;
    Label label = Label::JobTitle;
    Properties properties;

    const Value* find(const std::string& key) const;
    std::string string_or(const std::string& key, std::string fallback = {}) const;
    std::optional<std::int64_t> integer(const std::string& key) const;
    std::optional<bool> boolean(const std::string& key) const;
    std::optional<Date> date(const std::string& key) const;

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::string src;
    std::string dst;
    Relation relation = Relation::TransitionsTo;
    double weight = 1.0;

    bool operator==(const Edge&) const = default;
};

using Record = std::variant<Node, Edge>;

struct Path {
    std::vector<std::string> nodes;
    double total_weight = 0.0;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

// Immutable after construction; concurrent readers need no synchronisation.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    const Node* find(std::string_view id) const;
    // Throws NodeNotFound.
    const Node& node(std::string_view id) const;

    std::vector<const Edge*> out_edges(std::string_view id) const;
    std::vector<const Edge*> out_edges(std::string_view id, Relation relation) const;
    std::vector<const Edge*> in_edges(std::string_view id, Relation relation) const;

    // Resolves a JobTitle by id, `title` property or one of its `|`-separated
    // `aliases`, case-insensitively.
    const Node* find_title(std::string_view name) const;

    std::vector<const Node*> nodes_with_label(Label label) const;

    // Records in the order they were loaded.
    std::vector<Record> records() const;

private:
    friend KnowledgeGraph load_graph(const std::vector<Record>& records);

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::pair<bool, std::size_t>> record_order_;  // (is_edge, index)
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

// Throws DuplicateNode, DanglingEdge, DuplicateEdge, InvalidRecord.
KnowledgeGraph load_graph(const std::vector<Record>& records);

// Line-delimited JSON, one flat object per line with a `kind` field.
std::vector<Record> read_records(std::istream& in);
void write_records(std::ostream& out, const std::vector<Record>& records);
std::string record_to_line(const Record& record);
Record record_from_line(std::string_view line);

KnowledgeGraph load_graph_file(const std::string& path);
void save_graph_file(const KnowledgeGraph& graph, const std::string& path);

// JobTitle ids one TRANSITIONS_TO hop away, by ascending weight then id.
std::vector<std::string> adjacent_titles(const KnowledgeGraph& graph, std::string_view title);

std::vector<const Node*> openings_for_title(const KnowledgeGraph& graph, std::string_view title,
                                            bool active_only, std::size_t limit = kUnlimited);

// Minimum total weight over TRANSITIONS_TO edges; equal weights resolve to the
// lexicographically smallest node-id sequence. Throws NoPath, NodeNotFound.
Path weighted_shortest_path(const KnowledgeGraph& graph, std::string_view src,
                            std::string_view dst);

std::string lowercase(std::string_view text);

}  // namespace jobrec::kgraph
