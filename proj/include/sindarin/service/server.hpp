#pragma once

#include "sindarin/service/protocol.hpp"

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sindarin::service {

struct ServerOptions {
    std::uint16_t port = 0;  // 0 picks a free port
    std::string host = "127.0.0.1";
    std::string ui_dir;      // static files for plain HTTP GETs; empty serves nothing
};

/// TCP listener. A connection that opens with an HTTP GET is either upgraded
/// to a WebSocket (one request per text message) or answered from ui_dir;
/// anything else is NDJSON, one request per line.
class Server {
public:
    Server(Service& service, ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting. Returns the bound port.
    std::uint16_t start();
    void stop();
    /// Blocks until stop() is called from another thread.
    void wait();
    std::uint16_t port() const { return port_; }

private:
    void accept_loop();
    void serve(int fd);

    Service& service_;
    ServerOptions options_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::mutex mutex_;
    std::vector<std::thread> workers_;
    std::vector<int> clients_;
};

/// NDJSON over a pair of streams: hello first, then one response per line.
void serve_stdio(Service& service, std::istream& in, std::ostream& out);

/// Sec-WebSocket-Accept for a client key.
std::string websocket_accept(const std::string& key);

} // namespace sindarin::service
