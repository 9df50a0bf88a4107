#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace jobrec::kgraph {
class KnowledgeGraph;
}

namespace jobrec::lm {

enum class EntityType { Title, City, Skill, Family };

struct EntityMention {
    EntityType type;
    std::string canonical;  // node id for titles and skills, display name otherwise
    std::size_t position;   // byte offset of the first mention
    std::size_t length = 0;
};

// Surface-form dictionary used by the stub backend to capture entities.
class Gazetteer {
public:
    void add(EntityType type, std::string surface, std::string canonical);

    // Titles (names and aliases), skills, cities and families found in a graph.
    static Gazetteer from_graph(const kgraph::KnowledgeGraph& graph);

    // Longest match wins at each position; word boundaries required; one
    // mention per canonical entity, ordered by first appearance.
    std::vector<EntityMention> extract(std::string_view text) const;

private:
    struct Entry {
        EntityType type;
        std::string surface;  // lowercase
        std::string canonical;
    };
    std::vector<Entry> entries_;
};

bool word_boundary_find(std::string_view haystack_lower, std::string_view needle_lower, std::size_t from,
                        std::size_t& at);

}  // namespace jobrec::lm
