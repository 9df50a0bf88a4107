#pragma once

#include "jobrec/bench/metrics.hpp"
#include "jobrec/bench/world.hpp"
#include "jobrec/service/chat_service.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace jobrec::bench {

// Sessions that never reach their target count as this many rounds.
inline constexpr int kMaxRounds = 20;

// Met when the response contains every `all_of` phrase and, if any are
// given, at least one `any_of` phrase.
struct TargetPredicate {
    std::vector<std::string> all_of;
    std::vector<std::string> any_of;

    bool operator()(const std::string& response) const;
};

struct DialogueScript {
    std::string id;
    std::string user;
    std::string kind;  // "simple" or "complex", by the query that should answer it
    std::vector<std::string> messages;
    TargetPredicate target;
};

nlohmann::json scripts_to_json(const std::vector<DialogueScript>& scripts);
std::vector<DialogueScript> scripts_from_json(const nlohmann::json& j);
std::vector<DialogueScript> load_scripts(const std::string& path);

// Scripts over the world's users and titles, `simple_fraction` of them
// answerable by one direct tool call.
std::vector<DialogueScript> make_scripts(const SyntheticWorld& world, std::size_t count, double simple_fraction,
                                         std::uint64_t seed);

struct SimulationResult {
    std::vector<int> rounds;           // per script, capped at kMaxRounds
    std::vector<double> latency_ms;    // per message, submission to terminal event
    std::vector<std::string> errors;   // "script id: message" for failed sessions
};

// Feeds each script through a fresh session of a service built from
// `config` over the world. Throws ContractViolation on an empty script list.
SimulationResult simulate_dialogues(const service::ServiceConfig& config, const std::vector<DialogueScript>& scripts,
                                    const SyntheticWorld& world);

struct VariantSpec {
    std::string name;
    service::ServiceConfig config;
};

struct VariantMetrics {
    std::string name;
    std::size_t n = 0;  // scripts run
    double hit = 0.0;
    double ndcg = 0.0;
    double map = 0.0;
    double pct_hit_real_trans = 0.0;
    double mean_rounds = 0.0;
    LatencySummary latency;
    std::vector<std::string> script_ids;  // parallel to rounds
    std::vector<int> rounds;
    std::vector<double> latency_ms;
    std::vector<std::string> errors;
};

struct PairwiseTest {
    std::string a;
    std::string b;
    TTestResult rounds;
    TTestResult latency;
};

enum class Assignment {
    Random,   // each script goes to one uniformly drawn variant
    Crossed,  // every script runs under every variant
};

struct AbReport {
    std::vector<VariantMetrics> variants;
    std::vector<PairwiseTest> tests;
    double frequency_pct_hit_real_trans = 0.0;

    const VariantMetrics& variant(const std::string& name) const;
    nlohmann::json to_json() const;
};

// Ranking metrics at this cutoff, over the world's click log.
inline constexpr std::size_t kRankCutoff = 10;

// Throws ConfigInvalid with fewer than two variants.
AbReport run_ab(const std::vector<VariantSpec>& variants, const SyntheticWorld& world,
                const std::vector<DialogueScript>& scripts, std::uint64_t seed,
                Assignment assignment = Assignment::Random);

// Next-title prediction of the system: first step of the best growth path.
std::map<std::string, std::string> predict_next_titles(const SyntheticWorld& world,
                                                       const tools::ScoringWeights& weights);

}  // namespace jobrec::bench
