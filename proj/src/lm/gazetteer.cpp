#include "jobrec/lm/gazetteer.hpp"

#include "jobrec/kgraph/graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace jobrec::lm {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

bool word_boundary_find(std::string_view hay, std::string_view needle, std::size_t from, std::size_t& at) {
    if (needle.empty()) return false;
    for (std::size_t pos = hay.find(needle, from); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
        const bool left_ok = pos == 0 || !word_char(hay[pos - 1]) || !word_char(needle.front());
        const std::size_t end = pos + needle.size();
        const bool right_ok = end >= hay.size() || !word_char(hay[end]) || !word_char(needle.back());
        if (left_ok && right_ok) {
            at = pos;
            return true;
        }
    }
    return false;
}

void Gazetteer::add(EntityType type, std::string surface, std::string canonical) {
    surface = kgraph::lowercase(surface);
    if (surface.empty()) return;
    for (const auto& e : entries_) {
        if (e.type == type && e.surface == surface) return;
    }
    entries_.push_back({type, std::move(surface), std::move(canonical)});
    // Longest surface first so "senior ml engineer" beats "ml engineer".
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& a, const Entry& b) { return a.surface.size() > b.surface.size(); });
}

Gazetteer Gazetteer::from_graph(const kgraph::KnowledgeGraph& graph) {
    using kgraph::Label;
    Gazetteer g;
    for (const auto& n : graph.nodes()) {
        switch (n.label) {
            case Label::JobTitle: {
                g.add(EntityType::Title, n.string_or("title"), n.id);
                std::stringstream aliases(n.string_or("aliases"));
                for (std::string a; std::getline(aliases, a, '|');) g.add(EntityType::Title, a, n.id);
                break;
            }
            case Label::Skill:
                g.add(EntityType::Skill, n.string_or("name", n.id), n.id);
                g.add(EntityType::Skill, n.id, n.id);
                break;
            case Label::Opening: {
                auto city = n.string_or("city");
                if (!city.empty()) g.add(EntityType::City, city, city);
                auto family = n.string_or("job_family");
                if (!family.empty()) g.add(EntityType::Family, family, family);
                break;
            }
            case Label::JobFamily: {
                auto name = n.string_or("name", n.id);
                g.add(EntityType::Family, name, name);
                break;
            }
            case Label::Associate: break;
        }
    }
    return g;
}

std::vector<EntityMention> Gazetteer::extract(std::string_view text) const {
    const std::string lower = kgraph::lowercase(text);
    std::vector<bool> claimed(lower.size(), false);
    std::vector<EntityMention> found;
    for (const auto& e : entries_) {
        std::size_t from = 0, at = 0;
        while (word_boundary_find(lower, e.surface, from, at)) {
            from = at + 1;
            bool overlaps = false;
            for (std::size_t i = at; i < at + e.surface.size(); ++i) overlaps |= claimed[i];
            if (overlaps) continue;
            for (std::size_t i = at; i < at + e.surface.size(); ++i) claimed[i] = true;
            found.push_back({e.type, e.canonical, at, e.surface.size()});
        }
    }
    std::sort(found.begin(), found.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.position < b.position; });
    std::vector<EntityMention> unique;
    std::set<std::pair<EntityType, std::string>> seen;
    for (auto& m : found) {
        if (seen.emplace(m.type, m.canonical).second) unique.push_back(std::move(m));
    }
    return unique;
}

}  // namespace jobrec::lm
