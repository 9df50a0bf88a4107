#pragma once

#include "jobrec/exec/orchestrator.hpp"

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace jobrec::service {

// Milliseconds since an arbitrary epoch; injectable for TTL tests.
using ClockMs = std::function<std::int64_t()>;
std::int64_t system_clock_ms();

// Lowercase, punctuation stripped, whitespace collapsed and trimmed.
std::string normalize_query(std::string_view text);

// Canonical key: user segment (current title), tool and normalized query.
std::string cache_key(std::string_view query, std::string_view segment, agent::ToolHint tool);

struct CacheEntry {
    nlohmann::json value;
    std::int64_t stored_ms = 0;
    std::int64_t ttl_ms = 0;
};

// Thread-safe TTL map. Expired entries are never served.
class ResponseCache {
public:
    explicit ResponseCache(ClockMs clock = system_clock_ms) : clock_(std::move(clock)) {}

    std::optional<nlohmann::json> lookup(const std::string& key) const;
    void store(const std::string& key, nlohmann::json value, std::int64_t ttl_ms);
    std::size_t size() const;

private:
    ClockMs clock_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CacheEntry> entries_;
};

// Simple-path adapter keyed by the user's current title. Tools whose answer
// depends on the individual user are never cached.
class SimplePathCache final : public exec::SimpleCache {
public:
    SimplePathCache(ResponseCache& cache, std::int64_t ttl_ms) : cache_(cache), ttl_ms_(ttl_ms) {}

    static bool eligible(agent::ToolHint tool) noexcept;

    std::optional<nlohmann::json> lookup(const std::string& query, const agent::UserProfile& profile,
                                         agent::ToolHint tool) override;
    void store(const std::string& query, const agent::UserProfile& profile, agent::ToolHint tool,
               const nlohmann::json& payload) override;

private:
    ResponseCache& cache_;
    std::int64_t ttl_ms_;
};

}  // namespace jobrec::service
