#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jobrec::tools {

enum class Stage { Submitted, Screening, Interview, Offer, Rejected };

std::string_view to_string(Stage stage) noexcept;
Stage parse_stage(std::string_view text);

struct ApplicationRecord {
    std::string user;
    std::string opening;
    Stage stage = Stage::Submitted;
    std::int64_t updated_ms = 0;
    std::optional<std::int64_t> interview_ms;

    bool operator==(const ApplicationRecord&) const = default;
};

nlohmann::json to_json(const ApplicationRecord& record);

// Fixture format: JSON array of {user, opening, stage, updated_ms, interview_ms?}.
class ApplicationStore {
public:
    ApplicationStore() = default;
    explicit ApplicationStore(std::vector<ApplicationRecord> records);

    static ApplicationStore from_json(const nlohmann::json& j);
    static ApplicationStore load_file(const std::string& path);
    nlohmann::json to_json() const;

    const std::vector<ApplicationRecord>& records() const noexcept { return records_; }

    // Most recently updated record of the user; throws NoApplications.
    const ApplicationRecord& latest(const std::string& user) const;

private:
    std::vector<ApplicationRecord> records_;
};

}  // namespace jobrec::tools
