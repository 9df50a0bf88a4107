#pragma once

#include "jobrec/error.hpp"
#include "jobrec/service/chat_service.hpp"

#include <memory>
#include <string>

namespace jobrec::service {

// HTTP front end:
//   POST /sessions                     {user}            -> {session, user, turns}
//   POST /sessions/{id}/messages       {text}            -> text/event-stream, one `data:` frame per event
//   POST /sessions/{id}/interactions   {opening, kind}   -> {interest}
//   GET  /health
class HttpApi {
public:
    explicit HttpApi(ChatService& service);
    ~HttpApi();

    // Binds to host on `port` (0 picks a free one) and returns the port.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void listen();
    void stop();
    void wait_until_ready();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Status code for a library error.
int http_status(Errc code) noexcept;

}  // namespace jobrec::service
