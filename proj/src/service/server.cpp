#include "sindarin/service/server.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace sindarin::service {

namespace {

// How long a fresh connection may stay silent before it is treated as NDJSON
// (NDJSON clients usually wait for the hello).
constexpr int kSniffMillis = 150;

class Socket {
public:
    explicit Socket(int fd) : fd_(fd) {}

    bool write_all(std::string_view data) {
        while (!data.empty()) {
            ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
            if (n <= 0) return false;
            data.remove_prefix(static_cast<std::size_t>(n));
        }
        return true;
    }

    bool fill() {
        char chunk[4096];
        ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n <= 0) return false;
        buf_.append(chunk, static_cast<std::size_t>(n));
        return true;
    }

    bool wait_readable(int millis) {
        if (!buf_.empty()) return true;
        pollfd p{fd_, POLLIN, 0};
        return ::poll(&p, 1, millis) > 0;
    }

    std::optional<std::string> read_line() {
        for (;;) {
            auto nl = buf_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buf_.substr(0, nl);
                buf_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (!fill()) {
                if (buf_.empty()) return std::nullopt;
                std::string rest = std::move(buf_);
                buf_.clear();
                return rest;
            }
        }
    }

    bool read_exact(std::size_t n, std::string& out) {
        while (buf_.size() < n)
            if (!fill()) return false;
        out = buf_.substr(0, n);
        buf_.erase(0, n);
        return true;
    }

    const std::string& buffered() const { return buf_; }

private:
    int fd_;
    std::string buf_;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// -- NDJSON ---------------------------------------------------------------------

void serve_ndjson(Service& service, Socket& sock, std::uint64_t conn) {
    Emit emit = [&](const json& j) { sock.write_all(j.dump() + "\n"); };
    if (!sock.write_all(hello_message().dump() + "\n")) return;
    while (auto line = sock.read_line()) {
        if (trim(*line).empty()) continue;
        json response = service.handle_line(conn, *line, emit);
        if (!sock.write_all(response.dump() + "\n")) return;
    }
}

// -- WebSocket --------------------------------------------------------------------

enum : unsigned char { kContinuation = 0x0, kText = 0x1, kBinary = 0x2, kClose = 0x8, kPing = 0x9, kPong = 0xA };

std::string ws_frame(unsigned char opcode, std::string_view payload) {
    std::string f;
    f.push_back(static_cast<char>(0x80 | opcode));
    if (payload.size() < 126) {
        f.push_back(static_cast<char>(payload.size()));
    } else if (payload.size() <= 0xFFFF) {
        f.push_back(126);
        f.push_back(static_cast<char>(payload.size() >> 8));
        f.push_back(static_cast<char>(payload.size() & 0xFF));
    } else {
        f.push_back(127);
        for (int i = 7; i >= 0; --i) f.push_back(static_cast<char>((static_cast<std::uint64_t>(payload.size()) >> (8 * i)) & 0xFF));
    }
    f.append(payload);
    return f;
}

struct WsFrame {
    bool fin = true;
    unsigned char opcode = 0;
    std::string payload;
};

std::optional<WsFrame> ws_read(Socket& sock) {
    std::string head;
    if (!sock.read_exact(2, head)) return std::nullopt;
    WsFrame f;
    auto b0 = static_cast<unsigned char>(head[0]), b1 = static_cast<unsigned char>(head[1]);
    f.fin = b0 & 0x80;
    f.opcode = b0 & 0x0F;
    bool masked = b1 & 0x80;
    std::uint64_t len = b1 & 0x7F;
    std::string ext;
    if (len == 126) {
        if (!sock.read_exact(2, ext)) return std::nullopt;
        len = (static_cast<unsigned char>(ext[0]) << 8) | static_cast<unsigned char>(ext[1]);
    } else if (len == 127) {
        if (!sock.read_exact(8, ext)) return std::nullopt;
        len = 0;
        for (char c : ext) len = (len << 8) | static_cast<unsigned char>(c);
    }
    if (len > (64u << 20)) return std::nullopt;
    std::string mask;
    if (masked && !sock.read_exact(4, mask)) return std::nullopt;
    if (!sock.read_exact(static_cast<std::size_t>(len), f.payload)) return std::nullopt;
    if (masked)
        for (std::size_t i = 0; i < f.payload.size(); ++i) f.payload[i] = static_cast<char>(f.payload[i] ^ mask[i % 4]);
    return f;
}

void serve_websocket(Service& service, Socket& sock, std::uint64_t conn, const std::string& key) {
    std::string reply = "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                        "Sec-WebSocket-Accept: " + websocket_accept(key) + "\r\n\r\n";
    if (!sock.write_all(reply)) return;
    Emit emit = [&](const json& j) { sock.write_all(ws_frame(kText, j.dump())); };
    if (!sock.write_all(ws_frame(kText, hello_message().dump()))) return;

    std::string message;
    while (auto f = ws_read(sock)) {
        switch (f->opcode) {
        case kPing: sock.write_all(ws_frame(kPong, f->payload)); continue;
        case kPong: continue;
        case kClose: sock.write_all(ws_frame(kClose, f->payload.substr(0, 2))); return;
        case kText:
        case kBinary: message = f->payload; break;
        case kContinuation: message += f->payload; break;
        default: return;
        }
        if (!f->fin) continue;
        json response = service.handle_line(conn, message, emit);
        if (!sock.write_all(ws_frame(kText, response.dump()))) return;
        message.clear();
    }
}

// -- static files ------------------------------------------------------------------

std::string content_type(const std::filesystem::path& p) {
    static const std::map<std::string, std::string> types = {
        {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"}, {".css", "text/css"},
        {".json", "application/json"},          {".svg", "image/svg+xml"},  {".png", "image/png"},
    };
    auto it = types.find(p.extension().string());
    return it == types.end() ? "application/octet-stream" : it->second;
}

void http_reply(Socket& sock, int status, const std::string& reason, const std::string& type, const std::string& body) {
    std::ostringstream out;
    out << "HTTP/1.1 " << status << " " << reason << "\r\nContent-Type: " << type << "\r\nContent-Length: " << body.size()
        << "\r\nConnection: close\r\n\r\n"
        << body;
    sock.write_all(out.str());
}

void serve_static(Socket& sock, const std::string& ui_dir, std::string target) {
    namespace fs = std::filesystem;
    if (ui_dir.empty()) return http_reply(sock, 404, "Not Found", "text/plain", "no ui directory\n");
    target = target.substr(0, target.find_first_of("?#"));
    if (target.empty() || target == "/") target = "/index.html";
    fs::path rel = fs::path(target.substr(1)).lexically_normal();
    if (rel.empty() || rel.is_absolute() || *rel.begin() == "..")
        return http_reply(sock, 403, "Forbidden", "text/plain", "forbidden\n");
    fs::path file = fs::path(ui_dir) / rel;
    std::ifstream in(file, std::ios::binary);
    if (!fs::is_regular_file(file) || !in) return http_reply(sock, 404, "Not Found", "text/plain", "not found\n");
    std::ostringstream body;
    body << in.rdbuf();
    http_reply(sock, 200, "OK", content_type(file), body.str());
}

void serve_http(Service& service, Socket& sock, std::uint64_t conn, const std::string& ui_dir) {
    auto request_line = sock.read_line();
    if (!request_line) return;
    std::map<std::string, std::string> headers;
    while (auto line = sock.read_line()) {
        if (line->empty()) break;
        auto colon = line->find(':');
        if (colon != std::string::npos) headers[lower(trim(line->substr(0, colon)))] = trim(line->substr(colon + 1));
    }
    std::istringstream rl(*request_line);
    std::string method, target;
    rl >> method >> target;
    if (lower(headers["upgrade"]) == "websocket" && headers.count("sec-websocket-key"))
        return serve_websocket(service, sock, conn, headers["sec-websocket-key"]);
    serve_static(sock, ui_dir, target);
}

} // namespace

std::string websocket_accept(const std::string& key) {
    std::string input = key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(input.data()), input.size(), digest);
    unsigned char encoded[4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1];
    int n = EVP_EncodeBlock(encoded, digest, SHA_DIGEST_LENGTH);
    return std::string(reinterpret_cast<char*>(encoded), static_cast<std::size_t>(n));
}

Server::Server(Service& service, ServerOptions options) : service_(service), options_(std::move(options)) {}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(options_.port);
    if (::inet_pton(AF_INET, options_.host.c_str(), &addr.sin_addr) != 1)
        throw std::runtime_error("bad listen address " + options_.host);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("cannot listen on " + options_.host + ":" + std::to_string(options_.port));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
    return port_;
}

void Server::accept_loop() {
    while (running_) {
        pollfd p{listen_fd_, POLLIN, 0};
        if (::poll(&p, 1, 100) <= 0) continue;
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        int yes = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
        std::lock_guard lock(mutex_);
        clients_.push_back(fd);
        workers_.emplace_back([this, fd] { serve(fd); });
    }
}

void Server::serve(int fd) {
    Socket sock(fd);
    std::uint64_t conn = service_.connect();
    try {
        bool http = false;
        if (sock.wait_readable(kSniffMillis)) {
            while (sock.buffered().size() < 4 && sock.fill()) {
            }
            http = sock.buffered().rfind("GET ", 0) == 0;
        }
        if (http) serve_http(service_, sock, conn, options_.ui_dir);
        else serve_ndjson(service_, sock, conn);
    } catch (const std::exception& err) {
        std::cerr << "connection error: " << err.what() << "\n";
    }
    service_.disconnect(conn);
    std::lock_guard lock(mutex_);
    auto it = std::find(clients_.begin(), clients_.end(), fd);
    if (it != clients_.end()) {
        clients_.erase(it);
        ::close(fd);
    }
}

void Server::stop() {
    if (!running_.exchange(false)) return;
    if (acceptor_.joinable()) acceptor_.join();
    ::close(listen_fd_);
    listen_fd_ = -1;
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(mutex_);
        for (int fd : clients_) ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
    }
    for (auto& t : workers)
        if (t.joinable()) t.join();
}

void Server::wait() {
    while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void serve_stdio(Service& service, std::istream& in, std::ostream& out) {
    std::uint64_t conn = service.connect();
    Emit emit = [&](const json& j) { out << j.dump() << "\n" << std::flush; };
    emit(hello_message());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        emit(service.handle_line(conn, line, emit));
    }
    service.disconnect(conn);
}

} // namespace sindarin::service
