#pragma once

#include "jobrec/agent/types.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace jobrec::service {

class ProfileClient {
public:
    virtual ~ProfileClient() = default;
    // Throws ProfileNotFound.
    virtual agent::UserProfile fetch(const std::string& user) const = 0;
};

class InMemoryProfileClient final : public ProfileClient {
public:
    explicit InMemoryProfileClient(std::map<std::string, agent::UserProfile> profiles)
        : profiles_(std::move(profiles)) {}
    agent::UserProfile fetch(const std::string& user) const override;

private:
    std::map<std::string, agent::UserProfile> profiles_;
};

// JSON object {user id: profile}, read once at construction.
class FileProfileClient final : public ProfileClient {
public:
    explicit FileProfileClient(const std::string& path);
    agent::UserProfile fetch(const std::string& user) const override;

private:
    std::map<std::string, agent::UserProfile> profiles_;
};

nlohmann::json profiles_to_json(const std::map<std::string, agent::UserProfile>& profiles);
std::map<std::string, agent::UserProfile> profiles_from_json(const nlohmann::json& j);

// Per-user conversation history. Implementations are thread-safe.
class ConversationStore {
public:
    virtual ~ConversationStore() = default;
    // Throws StoreUnavailable.
    virtual agent::History load(const std::string& user) const = 0;
    virtual void append(const std::string& user, const agent::ChatTurn& turn) = 0;
};

class InMemoryConversationStore final : public ConversationStore {
public:
    agent::History load(const std::string& user) const override;
    void append(const std::string& user, const agent::ChatTurn& turn) override;

private:
    mutable std::mutex mutex_;
    std::map<std::string, agent::History> turns_;
};

// One line-delimited JSON file per user under `dir`.
class FileConversationStore final : public ConversationStore {
public:
    explicit FileConversationStore(std::string dir);
    agent::History load(const std::string& user) const override;
    void append(const std::string& user, const agent::ChatTurn& turn) override;

private:
    std::string path_for(const std::string& user) const;

    std::string dir_;
    mutable std::mutex mutex_;
};

// In-process publish/subscribe. Delivery is synchronous and ordered per
// topic; a broker adapter would implement the same two calls.
class MessageBus {
public:
    using Handler = std::function<void(const nlohmann::json&)>;

    std::size_t subscribe(const std::string& topic, Handler handler);
    void unsubscribe(std::size_t id);
    void publish(const std::string& topic, const nlohmann::json& message);

private:
    struct Subscription {
        std::size_t id;
        std::string topic;
        Handler handler;
    };
    std::mutex mutex_;
    std::size_t next_id_ = 1;
    std::vector<Subscription> subscriptions_;
    std::map<std::string, std::unique_ptr<std::mutex>> topic_locks_;
};

}  // namespace jobrec::service
