#include "jobrec/service/cache.hpp"

#include <cctype>
#include <chrono>

namespace jobrec::service {

std::int64_t system_clock_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string normalize_query(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isspace(u)) {
            pending_space = !out.empty();
        } else if (std::isalnum(u) || u >= 0x80) {
            if (pending_space) out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(u));
        }
    }
    return out;
}

std::string cache_key(std::string_view query, std::string_view segment, agent::ToolHint tool) {
    return std::string(segment) + '\x1f' + std::string(agent::to_string(tool)) + '\x1f' + normalize_query(query);
}

std::optional<nlohmann::json> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    if (clock_() > it->second.stored_ms + it->second.ttl_ms) return std::nullopt;
    return std::optional<nlohmann::json>(std::in_place, it->second.value);
}

void ResponseCache::store(const std::string& key, nlohmann::json value, std::int64_t ttl_ms) {
    const auto now = clock_();
    std::lock_guard lock(mutex_);
    entries_[key] = CacheEntry{std::move(value), now, ttl_ms};
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

// Title-level keys are only safe for answers that do not depend on the
// individual's applications, skills or live interest state.
bool SimplePathCache::eligible(agent::ToolHint tool) noexcept {
    switch (tool) {
        case agent::ToolHint::ApplicationStatus:
        case agent::ToolHint::JobRecommend:
        case agent::ToolHint::SkillGap:
        case agent::ToolHint::Mentor: return false;
        default: return true;
    }
}

std::optional<nlohmann::json> SimplePathCache::lookup(const std::string& query, const agent::UserProfile& profile,
                                                      agent::ToolHint tool) {
    if (!eligible(tool) || ttl_ms_ <= 0) return std::nullopt;
    return cache_.lookup(cache_key(query, profile.current_title, tool));
}

void SimplePathCache::store(const std::string& query, const agent::UserProfile& profile, agent::ToolHint tool,
                            const nlohmann::json& payload) {
    if (!eligible(tool) || ttl_ms_ <= 0) return;
    cache_.store(cache_key(query, profile.current_title, tool), payload, ttl_ms_);
}

}  // namespace jobrec::service
