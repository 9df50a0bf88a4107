#include "jobrec/tools/career.hpp"

#include "jobrec/error.hpp"
#include "jobrec/kgraph/templates.hpp"

#include <algorithm>
#include <set>

namespace jobrec::tools {

using nlohmann::json;

json to_json(const CareerPath& path, const kgraph::KnowledgeGraph& graph) {
    json titles = json::array();
    for (const auto& t : path.titles) {
        const auto* n = graph.find(t);
        titles.push_back({{"id", t}, {"name", n ? n->string_or("title", t) : t}});
    }
    json hops = json::array();
    for (const auto& h : path.hops) {
        hops.push_back({{"from", h.from}, {"to", h.to}, {"weight", h.edge_weight}, {"skill_gap", h.skill_gap}});
    }
    return {{"titles", titles}, {"hops", hops}, {"score", path.score}};
}

namespace {

double edge_weight(const kgraph::KnowledgeGraph& graph, const std::string& a, const std::string& b) {
    for (const auto* e : graph.out_edges(a, kgraph::Relation::TransitionsTo)) {
        if (e->dst == b) return e->weight;
    }
    return 0.0;
}

std::size_t gap_size(const kgraph::KnowledgeGraph& graph, const agent::UserProfile& profile, const std::string& title) {
    return kgraph::skill_gap(graph, profile.skills, graph.node(title)).size();
}

}  // namespace

CareerPath career_path_to(const agent::UserProfile& profile, const std::string& destination,
                          const kgraph::KnowledgeGraph& graph) {
    const auto& dest = kgraph::resolve_title(graph, destination);
    const auto& current = graph.node(profile.current_title);
    kgraph::Path path;
    try {
        path = kgraph::weighted_shortest_path(graph, current.id, dest.id);
    } catch (const Error& e) {
        if (e.code() == Errc::NoPath) {
            throw Error(Errc::UnreachableDestination, "no transition path from " + current.id + " to " + dest.id);
        }
        throw;
    }
    CareerPath out;
    out.titles = path.nodes;
    out.score = path.total_weight;
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        out.hops.push_back({path.nodes[i], path.nodes[i + 1], edge_weight(graph, path.nodes[i], path.nodes[i + 1]),
                            gap_size(graph, profile, path.nodes[i + 1])});
    }
    return out;
}

double hop_desirability(const kgraph::KnowledgeGraph& graph, const agent::UserProfile& profile,
                        const InterestState& interest, const ScoringWeights& weights, const kgraph::Edge& edge) {
    const auto& target = graph.node(edge.dst);
    const auto required = kgraph::required_skills(graph, target);
    double overlap = 0.0;
    if (!required.empty()) {
        std::size_t held = 0;
        for (const auto& s : required) held += profile.skills.count(s);
        overlap = static_cast<double>(held) / static_cast<double>(required.size());
    }
    const double affinity = interest.affinity(target.string_or("job_family"), weights.gamma);
    return (1.0 / (1.0 + edge.weight)) * (0.5 + 0.5 * overlap) * std::max(0.0, 1.0 + weights.beta * affinity);
}

std::vector<CareerPath> career_growth(const agent::UserProfile& profile, const InterestState& interest,
                                      const kgraph::KnowledgeGraph& graph, const ScoringWeights& weights,
                                      const GrowthOptions& options) {
    const std::string start = options.start_title.empty()
                                  ? graph.node(profile.current_title).id
                                  : kgraph::resolve_title(graph, options.start_title).id;
    if (options.depth == 0) throw Error(Errc::InvalidArgument, "growth depth must be >= 1");

    struct Partial {
        std::vector<std::string> titles;
        std::vector<CareerHop> hops;
        double score = 1.0;
    };
    auto better = [](const Partial& a, const Partial& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.titles < b.titles;
    };

    std::vector<Partial> frontier{Partial{{start}, {}, 1.0}};
    std::vector<Partial> finished;
    for (std::size_t d = 0; d < options.depth && !frontier.empty(); ++d) {
        std::vector<Partial> next;
        for (const auto& p : frontier) {
            bool extended = false;
            for (const auto* e : graph.out_edges(p.titles.back(), kgraph::Relation::TransitionsTo)) {
                if (graph.node(e->dst).label != kgraph::Label::JobTitle) continue;
                if (std::find(p.titles.begin(), p.titles.end(), e->dst) != p.titles.end()) continue;
                Partial q = p;
                q.titles.push_back(e->dst);
                q.hops.push_back({e->src, e->dst, e->weight, gap_size(graph, profile, e->dst)});
                q.score *= hop_desirability(graph, profile, interest, weights, *e);
                next.push_back(std::move(q));
                extended = true;
            }
            if (!extended && p.titles.size() > 1) finished.push_back(p);
        }
        std::sort(next.begin(), next.end(), better);
        if (next.size() > options.beam_width) next.resize(options.beam_width);
        frontier = std::move(next);
    }
    for (auto& p : frontier) finished.push_back(std::move(p));
    std::sort(finished.begin(), finished.end(), better);

    std::vector<CareerPath> result;
    std::set<std::string> first_hops;
    for (auto& p : finished) {
        if (result.size() >= options.n_paths) break;
        if (!first_hops.insert(p.titles[1]).second) continue;
        result.push_back({std::move(p.titles), std::move(p.hops), p.score});
    }
    return result;
}

}  // namespace jobrec::tools
