#include "jobrec/service/stores.hpp"

#include "jobrec/error.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>

namespace jobrec::service {

namespace fs = std::filesystem;
using nlohmann::json;

agent::UserProfile InMemoryProfileClient::fetch(const std::string& user) const {
    auto it = profiles_.find(user);
    if (it == profiles_.end()) throw Error(Errc::ProfileNotFound, "no profile for " + user);
    return it->second;
}

FileProfileClient::FileProfileClient(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::StoreUnavailable, "cannot open profiles " + path);
    try {
        profiles_ = profiles_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(Errc::StoreUnavailable, "unreadable profiles " + path + ": " + e.what());
    }
}

agent::UserProfile FileProfileClient::fetch(const std::string& user) const {
    auto it = profiles_.find(user);
    if (it == profiles_.end()) throw Error(Errc::ProfileNotFound, "no profile for " + user);
    return it->second;
}

json profiles_to_json(const std::map<std::string, agent::UserProfile>& profiles) {
    json j = json::object();
    for (const auto& [id, p] : profiles) j[id] = agent::to_json(p);
    return j;
}

std::map<std::string, agent::UserProfile> profiles_from_json(const json& j) {
    std::map<std::string, agent::UserProfile> out;
    for (const auto& [id, p] : j.items()) out[id] = agent::profile_from_json(p);
    return out;
}

agent::History InMemoryConversationStore::load(const std::string& user) const {
    std::lock_guard lock(mutex_);
    auto it = turns_.find(user);
    return it == turns_.end() ? agent::History{} : it->second;
}

void InMemoryConversationStore::append(const std::string& user, const agent::ChatTurn& turn) {
    std::lock_guard lock(mutex_);
    turns_[user].push_back(turn);
}

FileConversationStore::FileConversationStore(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw Error(Errc::StoreUnavailable, "cannot use directory " + dir_);
}

std::string FileConversationStore::path_for(const std::string& user) const {
    std::string safe;
    for (char c : user) safe += std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ? c : '_';
    return (fs::path(dir_) / (safe + ".jsonl")).string();
}

agent::History FileConversationStore::load(const std::string& user) const {
    std::lock_guard lock(mutex_);
    agent::History out;
    const auto path = path_for(user);
    if (!fs::exists(path)) return out;
    std::ifstream in(path);
    if (!in) throw Error(Errc::StoreUnavailable, "cannot read " + path);
    std::string line;
    try {
        while (std::getline(in, line)) {
            if (!line.empty()) out.push_back(agent::turn_from_json(json::parse(line)));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::StoreUnavailable, "corrupt history " + path + ": " + e.what());
    }
    return out;
}

void FileConversationStore::append(const std::string& user, const agent::ChatTurn& turn) {
    std::lock_guard lock(mutex_);
    const auto path = path_for(user);
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error(Errc::StoreUnavailable, "cannot write " + path);
    out << agent::to_json(turn).dump() << '\n';
    if (!out) throw Error(Errc::StoreUnavailable, "cannot write " + path);
}

std::size_t MessageBus::subscribe(const std::string& topic, Handler handler) {
    std::lock_guard lock(mutex_);
    const auto id = next_id_++;
    subscriptions_.push_back({id, topic, std::move(handler)});
    topic_locks_.try_emplace(topic, std::make_unique<std::mutex>());
    return id;
}

void MessageBus::unsubscribe(std::size_t id) {
    std::lock_guard lock(mutex_);
    std::erase_if(subscriptions_, [id](const Subscription& s) { return s.id == id; });
}

void MessageBus::publish(const std::string& topic, const json& message) {
    std::vector<Handler> handlers;
    std::mutex* topic_lock = nullptr;
    {
        std::lock_guard lock(mutex_);
        for (const auto& s : subscriptions_) {
            if (s.topic == topic) handlers.push_back(s.handler);
        }
        topic_lock = topic_locks_.try_emplace(topic, std::make_unique<std::mutex>()).first->second.get();
    }
    std::lock_guard order(*topic_lock);
    for (const auto& h : handlers) h(message);
}

}  // namespace jobrec::service
