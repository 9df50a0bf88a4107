#include "jobrec/tools/applications.hpp"

#include "jobrec/error.hpp"

#include <fstream>

namespace jobrec::tools {

using nlohmann::json;

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::Submitted: return "submitted";
        case Stage::Screening: return "screening";
        case Stage::Interview: return "interview";
        case Stage::Offer: return "offer";
        case Stage::Rejected: return "rejected";
    }
    return "?";
}

Stage parse_stage(std::string_view text) {
    for (auto s : {Stage::Submitted, Stage::Screening, Stage::Interview, Stage::Offer, Stage::Rejected}) {
        if (to_string(s) == text) return s;
    }
    throw Error(Errc::InvalidArgument, "unknown application stage '" + std::string(text) + "'");
}

json to_json(const ApplicationRecord& r) {
    json j{{"user", r.user}, {"opening", r.opening}, {"stage", to_string(r.stage)}, {"updated_ms", r.updated_ms}};
    if (r.interview_ms) j["interview_ms"] = *r.interview_ms;
    return j;
}

ApplicationStore::ApplicationStore(std::vector<ApplicationRecord> records) : records_(std::move(records)) {}

ApplicationStore ApplicationStore::from_json(const json& j) {
    std::vector<ApplicationRecord> records;
    try {
        for (const auto& r : j) {
            ApplicationRecord rec;
            rec.user = r.at("user").get<std::string>();
            rec.opening = r.at("opening").get<std::string>();
            rec.stage = parse_stage(r.at("stage").get<std::string>());
            rec.updated_ms = r.at("updated_ms").get<std::int64_t>();
            if (r.contains("interview_ms")) rec.interview_ms = r["interview_ms"].get<std::int64_t>();
            records.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed application fixture: ") + e.what());
    }
    return ApplicationStore(std::move(records));
}

ApplicationStore ApplicationStore::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open application fixture " + path);
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidArgument, e.what());
    }
}

json ApplicationStore::to_json() const {
    json j = json::array();
    for (const auto& r : records_) j.push_back(tools::to_json(r));
    return j;
}

const ApplicationRecord& ApplicationStore::latest(const std::string& user) const {
    const ApplicationRecord* best = nullptr;
    for (const auto& r : records_) {
        if (r.user != user) continue;
        if (!best || r.updated_ms > best->updated_ms) best = &r;
    }
    if (!best) throw Error(Errc::NoApplications, "no applications for user " + user);
    return *best;
}

}  // namespace jobrec::tools
