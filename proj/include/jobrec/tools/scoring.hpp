#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/kgraph/graph.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace jobrec::tools {

struct ScoringWeights {
    double skills = 1.0;
    double location = 1.0;
    double education = 1.0;
    double title_affinity = 1.0;
    double beta = 1.0;   // interest strength
    double gamma = 1.0;  // dislike penalty

    // Throws InvalidArgument unless all weights are >= 0 and some entity weight is > 0.
    void validate() const;

    static constexpr std::size_t kDimensions = 6;
    std::array<double, kDimensions> to_array() const;
    static ScoringWeights from_array(const std::array<double, kDimensions>& v);

    bool operator==(const ScoringWeights&) const = default;
};

struct FamilyInterest {
    int clicks = 0;
    int saves = 0;
    int likes = 0;
    int dislikes = 0;

    bool operator==(const FamilyInterest&) const = default;
};

enum class InteractionKind { Click, Save, Like, Dislike };

std::string_view to_string(InteractionKind kind) noexcept;
InteractionKind parse_interaction(std::string_view text);

struct InterestState {
    std::map<std::string, FamilyInterest> families;

    void record(const std::string& family, InteractionKind kind);
    // (clicks + saves + likes - gamma * dislikes) / (1 + all interactions); 0 without signal.
    double affinity(const std::string& family, double gamma) const;

    bool operator==(const InterestState&) const = default;
};

nlohmann::json to_json(const InterestState& interest);
InterestState interest_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScoringWeights& weights);
ScoringWeights weights_from_json(const nlohmann::json& j);

namespace category {
inline constexpr const char* kSkills = "skills";
inline constexpr const char* kLocation = "location";
inline constexpr const char* kEducation = "education";
inline constexpr const char* kTitleAffinity = "title_affinity";
}  // namespace category

struct EntityScore {
    double base = 0.0;
    std::map<std::string, double> breakdown;  // only categories present on the opening
};

struct ScoredOpening {
    std::string opening;
    std::string title;
    std::string family;
    std::string city;
    std::string posting_date;
    double base = 0.0;
    double adjusted = 0.0;
    std::map<std::string, double> breakdown;
};

nlohmann::json to_json(const ScoredOpening& scored);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Weighted mean of per-category similarities over the categories the opening
// carries. Throws Unscoreable when it carries none.
EntityScore entity_match_score(const kgraph::KnowledgeGraph& graph, const agent::UserProfile& profile,
                               const kgraph::Node& opening, const ScoringWeights& weights);

// base * max(0, 1 + beta * affinity(family)).
double interest_adjust(double base, const std::string& family, const InterestState& interest,
                       const ScoringWeights& weights);

struct RecommendOptions {
    std::size_t k = 20;
    bool include_current_title = true;
    std::size_t per_title_limit = 50;
    // Optional filters; empty means unrestricted.
    std::string title;  // candidates come from this title instead of the neighbourhood
    std::string city;
    std::string family;
};

// Scores and orders the given openings: adjusted desc, posting date desc, id.
std::vector<ScoredOpening> rank_openings(const kgraph::KnowledgeGraph& graph, const agent::UserProfile& profile,
                                         const InterestState& interest, const ScoringWeights& weights,
                                         const std::vector<std::string>& opening_ids, std::size_t k);

// Throws NodeNotFound when the profile's current title is unknown.
std::vector<ScoredOpening> recommend_jobs(const agent::UserProfile& profile, const InterestState& interest,
                                          const kgraph::KnowledgeGraph& graph, const ScoringWeights& weights,
                                          const RecommendOptions& options = {});

// Title node that lists `opening` via HAS_OPENING, or nullptr.
const kgraph::Node* title_of_opening(const kgraph::KnowledgeGraph& graph, const kgraph::Node& opening);
std::set<std::string> opening_skills(const kgraph::KnowledgeGraph& graph, const kgraph::Node& opening);

}  // namespace jobrec::tools
