#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/kgraph/graph.hpp"
#include "jobrec/tools/scoring.hpp"

#include <string>
#include <vector>

namespace jobrec::tools {

struct CareerHop {
    std::string from;
    std::string to;
    double edge_weight = 0.0;
    std::size_t skill_gap = 0;  // skills of `to` the user does not hold
};

struct CareerPath {
    std::vector<std::string> titles;
    std::vector<CareerHop> hops;
    // Total transition cost for explicit destinations; product of hop
    // desirabilities for growth paths.
    double score = 0.0;
};

nlohmann::json to_json(const CareerPath& path, const kgraph::KnowledgeGraph& graph);

// Shortest transition path from the profile's current title. NoPath surfaces
// as UnreachableDestination.
CareerPath career_path_to(const agent::UserProfile& profile, const std::string& destination,
                          const kgraph::KnowledgeGraph& graph);

struct GrowthOptions {
    std::size_t n_paths = 3;
    std::size_t depth = 3;
    std::size_t beam_width = 8;
    std::string start_title;  // defaults to the profile's current title
};

// (1 / (1 + w)) * (0.5 + 0.5 * skill overlap) * max(0, 1 + beta * family affinity)
double hop_desirability(const kgraph::KnowledgeGraph& graph, const agent::UserProfile& profile,
                        const InterestState& interest, const ScoringWeights& weights, const kgraph::Edge& edge);

// Beam search over transitions; returns up to n_paths maximal paths with
// pairwise distinct first hops, best score first.
std::vector<CareerPath> career_growth(const agent::UserProfile& profile, const InterestState& interest,
                                      const kgraph::KnowledgeGraph& graph, const ScoringWeights& weights,
                                      const GrowthOptions& options = {});

}  // namespace jobrec::tools
