#include "jobrec/tools/scoring.hpp"

#include "jobrec/error.hpp"
#include "jobrec/kgraph/templates.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace jobrec::tools {

using nlohmann::json;

void ScoringWeights::validate() const {
    for (double w : to_array()) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidArgument, "scoring weights must be >= 0");
    }
    if (skills + location + education + title_affinity <= 0.0) {
        throw Error(Errc::InvalidArgument, "at least one entity weight must be positive");
    }
}

std::array<double, ScoringWeights::kDimensions> ScoringWeights::to_array() const {
    return {skills, location, education, title_affinity, beta, gamma};
}

ScoringWeights ScoringWeights::from_array(const std::array<double, kDimensions>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

std::string_view to_string(InteractionKind kind) noexcept {
    switch (kind) {
        case InteractionKind::Click: return "click";
        case InteractionKind::Save: return "save";
        case InteractionKind::Like: return "like";
        case InteractionKind::Dislike: return "dislike";
    }
    return "?";
}

InteractionKind parse_interaction(std::string_view text) {
    for (auto k : {InteractionKind::Click, InteractionKind::Save, InteractionKind::Like, InteractionKind::Dislike}) {
        if (to_string(k) == text) return k;
    }
    throw Error(Errc::InvalidArgument, "unknown interaction kind '" + std::string(text) + "'");
}

void InterestState::record(const std::string& family, InteractionKind kind) {
    auto& f = families[family];
    switch (kind) {
        case InteractionKind::Click: ++f.clicks; break;
        case InteractionKind::Save: ++f.saves; break;
        case InteractionKind::Like: ++f.likes; break;
        case InteractionKind::Dislike: ++f.dislikes; break;
    }
}

double InterestState::affinity(const std::string& family, double gamma) const {
    auto it = families.find(family);
    if (it == families.end()) return 0.0;
    const auto& f = it->second;
    const double positive = f.clicks + f.saves + f.likes;
    return (positive - gamma * f.dislikes) / (1.0 + positive + f.dislikes);
}

json to_json(const InterestState& interest) {
    json j = json::object();
    for (const auto& [family, f] : interest.families) {
        j[family] = {{"clicks", f.clicks}, {"saves", f.saves}, {"likes", f.likes}, {"dislikes", f.dislikes}};
    }
    return j;
}

InterestState interest_from_json(const json& j) {
    InterestState s;
    for (const auto& [family, f] : j.items()) {
        s.families[family] = {f.value("clicks", 0), f.value("saves", 0), f.value("likes", 0), f.value("dislikes", 0)};
    }
    return s;
}

json to_json(const ScoringWeights& w) {
    return {{"skills", w.skills},         {"location", w.location}, {"education", w.education},
            {"title_affinity", w.title_affinity}, {"beta", w.beta},         {"gamma", w.gamma}};
}

ScoringWeights weights_from_json(const json& j) {
    ScoringWeights w;
    w.skills = j.value("skills", w.skills);
    w.location = j.value("location", w.location);
    w.education = j.value("education", w.education);
    w.title_affinity = j.value("title_affinity", w.title_affinity);
    w.beta = j.value("beta", w.beta);
    w.gamma = j.value("gamma", w.gamma);
    w.validate();
    return w;
}

json to_json(const ScoredOpening& s) {
    return {{"opening", s.opening}, {"title", s.title},       {"family", s.family},
            {"city", s.city},       {"posting_date", s.posting_date}, {"base", s.base},
            {"adjusted", s.adjusted}, {"breakdown", s.breakdown}};
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& x : a) common += b.count(x);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

const kgraph::Node* title_of_opening(const kgraph::KnowledgeGraph& graph, const kgraph::Node& opening) {
    for (const auto* e : graph.in_edges(opening.id, kgraph::Relation::HasOpening)) {
        const auto& n = graph.node(e->src);
        if (n.label == kgraph::Label::JobTitle) return &n;
    }
    return nullptr;
}

std::set<std::string> opening_skills(const kgraph::KnowledgeGraph& graph, const kgraph::Node& opening) {
    std::set<std::string> skills;
    for (const auto* e : graph.out_edges(opening.id, kgraph::Relation::RequiresSkill)) skills.insert(e->dst);
    if (skills.empty()) {
        if (const auto* title = title_of_opening(graph, opening)) skills = kgraph::required_skills(graph, *title);
    }
    return skills;
}

EntityScore entity_match_score(const kgraph::KnowledgeGraph& graph, const agent::UserProfile& profile,
                               const kgraph::Node& opening, const ScoringWeights& weights) {
    EntityScore score;
    double weighted = 0.0;
    double total_weight = 0.0;
    auto add = [&](const char* name, double weight, double sim) {
        score.breakdown[name] = sim;
        weighted += weight * sim;
        total_weight += weight;
    };

    const auto skills = opening_skills(graph, opening);
    if (!skills.empty()) add(category::kSkills, weights.skills, jaccard(profile.skills, skills));

    const auto city = opening.string_or("city");
    if (!city.empty() && !profile.location.empty()) {
        double sim = 0.0;
        if (kgraph::lowercase(city) == kgraph::lowercase(profile.location)) {
            sim = 1.0;
        } else {
            const auto region = opening.string_or("region");
            if (!region.empty() && kgraph::lowercase(region) == kgraph::lowercase(profile.region)) sim = 0.25;
        }
        add(category::kLocation, weights.location, sim);
    }

    if (auto edu = opening.integer("education")) {
        const double gap = std::abs(static_cast<double>(*edu - profile.education));
        add(category::kEducation, weights.education, std::max(0.0, 1.0 - gap / agent::kEducationScaleMax));
    }

    if (const auto* title = title_of_opening(graph, opening); title && graph.find(profile.current_title)) {
        const auto adjacent = kgraph::adjacent_titles(graph, profile.current_title);
        const bool near = std::find(adjacent.begin(), adjacent.end(), title->id) != adjacent.end();
        add(category::kTitleAffinity, weights.title_affinity, near ? 1.0 : 0.0);
    }

    if (score.breakdown.empty()) throw Error(Errc::Unscoreable, "opening " + opening.id + " has nothing to score");
    score.base = total_weight > 0.0 ? weighted / total_weight : 0.0;
    score.base = std::clamp(score.base, 0.0, 1.0);
    return score;
}

double interest_adjust(double base, const std::string& family, const InterestState& interest,
                       const ScoringWeights& weights) {
    const double a = interest.affinity(family, weights.gamma);
    return base * std::max(0.0, 1.0 + weights.beta * a);
}

std::vector<ScoredOpening> rank_openings(const kgraph::KnowledgeGraph& graph, const agent::UserProfile& profile,
                                         const InterestState& interest, const ScoringWeights& weights,
                                         const std::vector<std::string>& opening_ids, std::size_t k) {
    std::vector<ScoredOpening> scored;
    std::set<std::string> seen;
    for (const auto& id : opening_ids) {
        if (!seen.insert(id).second) continue;
        const auto& o = graph.node(id);
        EntityScore s;
        try {
            s = entity_match_score(graph, profile, o, weights);
        } catch (const Error& e) {
            if (e.code() == Errc::Unscoreable) continue;
            throw;
        }
        ScoredOpening so;
        so.opening = o.id;
        const auto* title = title_of_opening(graph, o);
        so.title = title ? title->id : std::string{};
        so.family = o.string_or("job_family");
        so.city = o.string_or("city");
        so.posting_date = o.string_or("posting_date");
        so.base = s.base;
        so.adjusted = interest_adjust(s.base, so.family, interest, weights);
        so.breakdown = std::move(s.breakdown);
        scored.push_back(std::move(so));
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredOpening& a, const ScoredOpening& b) {
        if (a.adjusted != b.adjusted) return a.adjusted > b.adjusted;
        if (a.posting_date != b.posting_date) return a.posting_date > b.posting_date;
        return a.opening < b.opening;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<ScoredOpening> recommend_jobs(const agent::UserProfile& profile, const InterestState& interest,
                                          const kgraph::KnowledgeGraph& graph, const ScoringWeights& weights,
                                          const RecommendOptions& options) {
    const auto& current = graph.node(profile.current_title);
    std::vector<std::string> titles;
    if (!options.title.empty()) {
        titles.push_back(kgraph::resolve_title(graph, options.title).id);
    } else {
        titles = kgraph::adjacent_titles(graph, current.id);
        if (options.include_current_title) titles.push_back(current.id);
    }
    const std::string city = kgraph::lowercase(options.city);
    const std::string family = kgraph::lowercase(options.family);
    std::vector<std::string> candidates;
    for (const auto& t : titles) {
        for (const auto* o : kgraph::openings_for_title(graph, t, true, options.per_title_limit)) {
            if (!city.empty() && kgraph::lowercase(o->string_or("city")) != city) continue;
            if (!family.empty() && kgraph::lowercase(o->string_or("job_family")) != family) continue;
            candidates.push_back(o->id);
        }
    }
    return rank_openings(graph, profile, interest, weights, candidates, options.k);
}

}  // namespace jobrec::tools
