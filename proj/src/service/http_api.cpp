#include "jobrec/service/http_api.hpp"

#include "jobrec/error.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace jobrec::service {

using nlohmann::json;

int http_status(Errc code) noexcept {
    switch (code) {
        case Errc::SessionNotFound:
        case Errc::ProfileNotFound:
        case Errc::NodeNotFound: return 404;
        case Errc::EmptyQuery:
        case Errc::InvalidArgument:
        case Errc::WrongLabel: return 400;
        case Errc::StoreUnavailable:
        case Errc::BackendTimeout:
        case Errc::BackendError: return 503;
        default: return 500;
    }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, Errc code, const std::string& message) {
    send_json(res, http_status(code), {{"error", errc_name(code)}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw Error(Errc::InvalidArgument, "body must be a JSON object");
    return body;
}

std::string required_string(const json& body, const char* key) {
    if (!body.contains(key) || !body[key].is_string()) {
        throw Error(Errc::InvalidArgument, std::string("missing string field '") + key + "'");
    }
    return body[key].get<std::string>();
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
        send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
}

}  // namespace

struct HttpApi::Impl {
    ChatService& service;
    httplib::Server server;

    explicit Impl(ChatService& s) : service(s) {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}});
        });
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto snap = service.open_session(required_string(parse_body(req), "user"));
                send_json(res, 201, {{"session", snap.id}, {"user", snap.user}, {"turns", snap.turns.size()}});
            });
        });
        server.Post(R"(/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                const auto text = required_string(parse_body(req), "text");
                (void)service.snapshot(id);  // 404 before the stream starts
                res.set_header("Cache-Control", "no-cache");
                res.set_chunked_content_provider("text/event-stream", [this, id, text](std::size_t,
                                                                                       httplib::DataSink& sink) {
                    service.post_message(id, text, [&](const json& event) {
                        const auto frame = "data: " + event.dump() + "\n\n";
                        sink.write(frame.data(), frame.size());
                    });
                    sink.done();
                    return true;
                });
            });
        });
        server.Post(R"(/sessions/([^/]+)/interactions)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = parse_body(req);
                const auto kind = tools::parse_interaction(required_string(body, "kind"));
                const auto interest = service.interact(req.matches[1], required_string(body, "opening"), kind);
                send_json(res, 200, {{"interest", tools::to_json(interest)}});
            });
        });
    }
};

HttpApi::HttpApi(ChatService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpApi::~HttpApi() = default;

int HttpApi::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : impl_->server.bind_to_port(host, port) ? port : -1;
    if (bound < 0) throw Error(Errc::ConfigInvalid, "cannot bind " + host + ":" + std::to_string(port));
    spdlog::info("listening on {}:{}", host, bound);
    return bound;
}

void HttpApi::listen() { impl_->server.listen_after_bind(); }
void HttpApi::stop() { impl_->server.stop(); }
void HttpApi::wait_until_ready() { impl_->server.wait_until_ready(); }

}  // namespace jobrec::service
