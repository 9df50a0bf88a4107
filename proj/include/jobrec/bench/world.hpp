#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/kgraph/graph.hpp"
#include "jobrec/tools/applications.hpp"
#include "jobrec/tools/scoring.hpp"
#include "jobrec/tuning/ctr.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace jobrec::bench {

struct WorldConfig {
    std::size_t titles = 20;
    std::size_t users = 50;
    std::size_t families = 4;
    std::size_t cities = 6;
    std::size_t openings_per_title = 5;
    std::size_t targets_per_title = 3;        // distinct next titles per title
    double modal_probability = 0.6;           // weight of the planted most likely next title
    std::size_t records_per_title = 40;       // training transitions per title
    std::size_t impressions_per_user = 60;
    std::size_t warmup_impressions = 10;      // clicks folded into the seeded interest state
    std::size_t shown_per_impression = 10;
    double favorite_click_rate = 0.8;
    double other_click_rate = 0.1;
    std::size_t history_exchanges = 2;        // stored past user/assistant exchanges per user
    int first_year = 2020;
    int test_year = 2025;

    // Throws ConfigInvalid.
    void validate() const;
    nlohmann::json to_json() const;
    static WorldConfig from_json(const nlohmann::json& j);
};

struct TransitionRecord {
    std::string user;
    std::string from;
    std::string to;
    int year = 0;

    bool operator==(const TransitionRecord&) const = default;
};

struct SyntheticWorld {
    std::uint64_t seed = 0;
    WorldConfig config;
    std::vector<kgraph::Record> records;
    std::shared_ptr<const kgraph::KnowledgeGraph> graph;
    std::map<std::string, agent::UserProfile> profiles;
    std::map<std::string, tools::InterestState> interests;
    tuning::ClickLog clicks;
    std::vector<TransitionRecord> transitions;
    tools::ApplicationStore applications;
    std::map<std::string, agent::History> histories;  // conversations stored before the benchmark
    // Ground truth kept for checks: each user's latent favourite family and
    // each title's planted next-title distribution.
    std::map<std::string, std::string> favorite_family;
    std::map<std::string, std::vector<std::pair<std::string, double>>> planted;

    tuning::ReplayData replay() const { return {graph.get(), &profiles, &interests, &clicks}; }
    std::vector<TransitionRecord> training() const;
    std::vector<TransitionRecord> test() const;
    // Planted most likely next title of `title`.
    const std::string& modal_next(const std::string& title) const;
};

// Fully determined by (seed, config). Throws ConfigInvalid.
SyntheticWorld gen_world(std::uint64_t seed, const WorldConfig& config = {});

// File name -> contents; equal worlds serialize byte-identically.
std::map<std::string, std::string> serialize_world(const SyntheticWorld& world);
void save_world(const SyntheticWorld& world, const std::string& dir);
SyntheticWorld load_world(const std::string& dir);

nlohmann::json to_json(const TransitionRecord& record);
TransitionRecord transition_from_json(const nlohmann::json& j);

}  // namespace jobrec::bench
