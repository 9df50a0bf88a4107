#pragma once

#include "jobrec/agent/types.hpp"
#include "jobrec/kgraph/graph.hpp"
#include "jobrec/tools/scoring.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace jobrec::tuning {

struct ClickRecord {
    std::string user;
    std::vector<std::string> shown;  // rank order
    std::vector<std::string> clicked;
    std::int64_t ts = 0;

    bool operator==(const ClickRecord&) const = default;
};

// Line-delimited JSON {user, shown, clicked, ts}. Throws InvalidRecord when a
// clicked id was never shown.
struct ClickLog {
    std::vector<ClickRecord> records;

    void validate() const;
    static ClickLog read(std::istream& in);
    void write(std::ostream& out) const;
    static ClickLog load_file(const std::string& path);
    void save_file(const std::string& path) const;
};

// Everything a replay needs besides the weights.
struct ReplayData {
    const kgraph::KnowledgeGraph* graph = nullptr;
    const std::map<std::string, agent::UserProfile>* profiles = nullptr;
    const std::map<std::string, tools::InterestState>* interests = nullptr;  // optional
    const ClickLog* log = nullptr;
};

// Share of impressions whose re-ranked top k contains a clicked opening.
// Throws EmptyLog.
double estimate_ctr(const tools::ScoringWeights& weights, const ReplayData& data, std::size_t k);

}  // namespace jobrec::tuning
