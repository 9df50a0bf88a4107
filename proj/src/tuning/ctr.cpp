#include "jobrec/tuning/ctr.hpp"

#include "jobrec/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace jobrec::tuning {

using nlohmann::json;

void ClickLog::validate() const {
    for (const auto& r : records) {
        const std::set<std::string> shown(r.shown.begin(), r.shown.end());
        for (const auto& c : r.clicked) {
            if (!shown.count(c)) throw Error(Errc::InvalidRecord, "clicked " + c + " was not shown to " + r.user);
        }
    }
}

ClickLog ClickLog::read(std::istream& in) {
    ClickLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = json::parse(line);
            log.records.push_back({j.at("user").get<std::string>(), j.at("shown").get<std::vector<std::string>>(),
                                   j.at("clicked").get<std::vector<std::string>>(), j.value("ts", std::int64_t{0})});
        } catch (const json::exception& e) {
            throw Error(Errc::InvalidRecord, std::string("click record: ") + e.what());
        }
    }
    log.validate();
    return log;
}

void ClickLog::write(std::ostream& out) const {
    for (const auto& r : records) {
        out << json{{"user", r.user}, {"shown", r.shown}, {"clicked", r.clicked}, {"ts", r.ts}}.dump() << '\n';
    }
}

ClickLog ClickLog::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidRecord, "cannot open click log " + path);
    return read(in);
}

void ClickLog::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidRecord, "cannot write click log " + path);
    write(out);
}

double estimate_ctr(const tools::ScoringWeights& weights, const ReplayData& data, std::size_t k) {
    if (!data.log || data.log->records.empty()) throw Error(Errc::EmptyLog, "no impressions to replay");
    if (!data.graph || !data.profiles) throw Error(Errc::ContractViolation, "replay needs a graph and profiles");
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be positive");
    weights.validate();

    static const tools::InterestState kNoInterest;
    std::size_t hits = 0;
    for (const auto& r : data.log->records) {
        if (r.clicked.empty()) continue;
        auto p = data.profiles->find(r.user);
        if (p == data.profiles->end()) throw Error(Errc::InvalidRecord, "click log names unknown user " + r.user);
        const tools::InterestState* interest = &kNoInterest;
        if (data.interests) {
            if (auto it = data.interests->find(r.user); it != data.interests->end()) interest = &it->second;
        }
        const auto top = tools::rank_openings(*data.graph, p->second, *interest, weights, r.shown, k);
        const bool hit = std::any_of(top.begin(), top.end(), [&](const tools::ScoredOpening& s) {
            return std::find(r.clicked.begin(), r.clicked.end(), s.opening) != r.clicked.end();
        });
        hits += hit;
    }
    return static_cast<double>(hits) / static_cast<double>(data.log->records.size());
}

}  // namespace jobrec::tuning
