// jobrec: the chat service, over HTTP or from the command line.
#include "jobrec/bench/demo_world.hpp"
#include "jobrec/bench/world.hpp"
#include "jobrec/error.hpp"
#include "jobrec/service/http_api.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>

using namespace jobrec;

namespace {

service::HttpApi* g_api = nullptr;

struct Options {
    std::string world_dir;
    std::string config_path;
    std::string history_dir;
};

std::unique_ptr<service::ChatService> build_service(const Options& o) {
    const auto config =
        o.config_path.empty() ? service::ServiceConfig{} : service::ServiceConfig::load_file(o.config_path);
    service::ServiceDeps deps;
    std::map<std::string, agent::UserProfile> profiles;
    std::map<std::string, agent::History> histories;
    if (o.world_dir.empty()) {
        deps.graph = std::make_shared<const kgraph::KnowledgeGraph>(bench::demo_world());
        deps.applications = std::make_shared<const tools::ApplicationStore>(bench::demo_applications());
        profiles = bench::demo_profiles();
    } else {
        auto world = bench::load_world(o.world_dir);
        deps.graph = world.graph;
        deps.applications = std::make_shared<const tools::ApplicationStore>(world.applications);
        profiles = world.profiles;
        histories = world.histories;
    }
    deps.backend = service::make_backend(config, *deps.graph);
    deps.profiles = std::make_shared<const service::InMemoryProfileClient>(std::move(profiles));
    if (o.history_dir.empty()) {
        auto store = std::make_shared<service::InMemoryConversationStore>();
        for (const auto& [user, turns] : histories) {
            for (const auto& t : turns) store->append(user, t);
        }
        deps.conversations = store;
    } else {
        deps.conversations = std::make_shared<service::FileConversationStore>(o.history_dir);
    }
    deps.bus = std::make_shared<service::MessageBus>();
    return std::make_unique<service::ChatService>(config, deps);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational job recommendation service"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--world", o.world_dir, "world directory from `bench gen`; the built-in demo world otherwise");
    app.add_option("--config", o.config_path, "service configuration JSON");
    app.add_option("--history-dir", o.history_dir, "persist conversations here; in memory otherwise");
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose);

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP/SSE API");
    serve->add_option("--host", host);
    serve->add_option("--port", port)->check(CLI::Range(0, 65535));

    std::string user = "u_alex";
    std::vector<std::string> messages;
    bool events = false;
    auto* ask = app.add_subcommand("ask", "Send messages in one session and print the replies");
    ask->add_option("--user", user);
    ask->add_option("messages", messages)->required();
    ask->add_flag("--events", events, "print every event frame instead of the final text");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
    try {
        auto svc = build_service(o);
        if (*serve) {
            service::HttpApi api(*svc);
            api.bind(host, port);
            g_api = &api;
            std::signal(SIGINT, [](int) { if (g_api) g_api->stop(); });
            std::signal(SIGTERM, [](int) { if (g_api) g_api->stop(); });
            api.listen();
            g_api = nullptr;
        } else {
            const auto session = svc->open_session(user).id;
            for (const auto& m : messages) {
                std::cout << "> " << m << '\n';
                for (const auto& e : svc->post_message(session, m)) {
                    if (events) {
                        std::cout << e.dump() << '\n';
                    } else if (e["type"] == "final") {
                        std::cout << e["payload"]["text"].get<std::string>() << "\n\n";
                    } else if (e["type"] == "error") {
                        std::cout << "error: " << e["payload"]["message"].get<std::string>() << "\n\n";
                    }
                }
            }
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
