#include "support/wire_client.hpp"

#include "sindarin/service/protocol.hpp"
#include "sindarin/service/server.hpp"

#include <httplib.h>
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace sindarin;
using namespace sindarin::service;

namespace {

const char* const kTarget = "| a | a := OrderedCollection new. a add: 1. Transcript show: 'hi'. a size";

json collect(Service& svc, std::uint64_t conn, const json& req, std::vector<json>* events = nullptr) {
    return svc.handle(conn, req, [&](const json& ev) {
        if (events) events->push_back(ev);
    });
}

json load_schema() {
    std::ifstream in(SINDARIN_SCHEMA);
    return json::parse(in);
}

std::set<std::string> as_set(const json& arr) {
    std::set<std::string> out;
    for (const auto& v : arr) out.insert(v.get<std::string>());
    return out;
}

int connect_to(std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) return -1;
    return fd;
}

void send_all(int fd, const std::string& s) {
    for (std::size_t sent = 0; sent < s.size();) {
        ssize_t n = ::send(fd, s.data() + sent, s.size() - sent, MSG_NOSIGNAL);
        ASSERT_GT(n, 0);
        sent += static_cast<std::size_t>(n);
    }
}

std::string recv_exact(int fd, std::size_t n) {
    std::string out;
    while (out.size() < n) {
        char buf[4096];
        ssize_t got = ::recv(fd, buf, std::min(sizeof buf, n - out.size()), 0);
        if (got <= 0) break;
        out.append(buf, static_cast<std::size_t>(got));
    }
    return out;
}

// A client text frame; clients must mask.
std::string masked_text(const std::string& payload) {
    std::string f;
    f.push_back(static_cast<char>(0x81));
    const unsigned char mask[4] = {0x12, 0x34, 0x56, 0x78};
    if (payload.size() < 126) {
        f.push_back(static_cast<char>(0x80 | payload.size()));
    } else {
        f.push_back(static_cast<char>(0x80 | 126));
        f.push_back(static_cast<char>(payload.size() >> 8));
        f.push_back(static_cast<char>(payload.size() & 0xFF));
    }
    for (unsigned char m : mask) f.push_back(static_cast<char>(m));
    for (std::size_t i = 0; i < payload.size(); ++i) f.push_back(static_cast<char>(payload[i] ^ mask[i % 4]));
    return f;
}

std::string read_server_frame(int fd) {
    std::string head = recv_exact(fd, 2);
    if (head.size() < 2) return {};
    std::size_t len = static_cast<unsigned char>(head[1]) & 0x7F;
    if (len == 126) {
        std::string ext = recv_exact(fd, 2);
        len = (static_cast<unsigned char>(ext[0]) << 8) | static_cast<unsigned char>(ext[1]);
    } else if (len == 127) {
        std::string ext = recv_exact(fd, 8);
        len = 0;
        for (char c : ext) len = (len << 8) | static_cast<unsigned char>(c);
    }
    return recv_exact(fd, len);
}

} // namespace

TEST(WireCodes, AreInjectiveAndRoundTrip) {
    std::set<std::string> seen;
    for (ErrorCode c : kAllErrorCodes) {
        std::string w = wire_code(c);
        EXPECT_TRUE(seen.insert(w).second) << w;
        EXPECT_EQ(host_code(w), c);
        EXPECT_TRUE(std::islower(static_cast<unsigned char>(w[0])));
    }
    EXPECT_EQ(wire_code(ErrorCode::ExecutionAlreadyFinished), "sessionFinished");
    EXPECT_EQ(wire_code(ErrorCode::ScriptFailed), "scriptError");
    EXPECT_FALSE(host_code("noSuchCode"));
}

TEST(Schema, EnumsMatchTheImplementation) {
    json schema = load_schema();
    const json& defs = schema.at("$defs");
    std::set<std::string> ops(op_names().begin(), op_names().end());
    EXPECT_EQ(as_set(defs.at("request").at("properties").at("op").at("enum")), ops);
    EXPECT_EQ(as_set(defs.at("hello").at("properties").at("ops").at("items").at("enum")), ops);
    std::set<std::string> codes;
    for (ErrorCode c : kAllErrorCodes) codes.insert(wire_code(c));
    EXPECT_EQ(as_set(defs.at("errorResponse").at("properties").at("error").at("properties").at("code").at("enum")), codes);
    std::set<std::string> kinds;
    for (auto k : lumen::kAllNodeKinds) kinds.insert(std::string(lumen::to_string(k)));
    EXPECT_EQ(as_set(defs.at("node").at("properties").at("kind").at("enum")), kinds);
    EXPECT_EQ(defs.at("hello").at("properties").at("v").at("const"), kProtocolVersion);
}

TEST(Hello, CarriesVersionOne) {
    json h = hello_message();
    EXPECT_EQ(h.at("v"), 1);
    EXPECT_EQ(h.at("hello"), "sindarin");
    EXPECT_EQ(h.at("ops").size(), op_names().size());
}

TEST(Preview, TruncatesOnUtf8Boundaries) {
    EXPECT_EQ(truncate_preview("short"), "short");
    std::string ascii(200, 'x');
    std::string cut = truncate_preview(ascii);
    EXPECT_EQ(cut, std::string(kPreviewLimit, 'x') + "\xE2\x80\xA6");
    // 'é' is two bytes; 119 ASCII bytes put one straddling the limit
    std::string mixed = std::string(119, 'a') + "\xC3\xA9" + std::string(20, 'b');
    std::string m = truncate_preview(mixed);
    EXPECT_EQ(m, std::string(119, 'a') + "\xE2\x80\xA6");
}

TEST(Service, RequestErrors) {
    Service svc;
    auto conn = svc.connect();
    auto nothing = [](const json&) {};
    json bad = svc.handle_line(conn, "{not json", nothing);
    EXPECT_TRUE(bad.at("id").is_null());
    EXPECT_EQ(bad.at("error").at("code"), "badArgs");
    EXPECT_EQ(collect(svc, conn, {{"id", 1}, {"op", "frobnicate"}}).at("error").at("code"), "unknownOp");
    EXPECT_EQ(collect(svc, conn, {{"id", 1}, {"op", "listSessions"}}).at("error").at("code"), "badArgs");
    EXPECT_EQ(collect(svc, conn, {{"op", "listSessions"}}).at("error").at("code"), "badArgs");
    EXPECT_EQ(collect(svc, conn, {{"id", 2}, {"op", "step"}, {"session", "s99"}}).at("error").at("code"), "unknownSession");
    json syn = collect(svc, conn, {{"id", 3}, {"op", "createSession"}, {"args", {{"source", "1 +"}}}});
    EXPECT_EQ(syn.at("error").at("code"), "syntaxError");
}

TEST(Service, SessionsBelongToTheirConnection) {
    Service svc;
    auto a = svc.connect(), b = svc.connect();
    json r = collect(svc, a, {{"id", 1}, {"op", "createSession"}, {"args", {{"source", kTarget}}}});
    std::string sid = r.at("result").at("session");
    EXPECT_EQ(collect(svc, b, {{"id", 1}, {"op", "step"}, {"session", sid}}).at("error").at("code"), "unknownSession");
    EXPECT_EQ(collect(svc, a, {{"id", 2}, {"op", "listSessions"}}).at("result").at("sessions"), json::array({sid}));
    svc.disconnect(a);
    EXPECT_TRUE(svc.session_ids().empty());
}

TEST(Service, ContinueEmitsOutputAndFinished) {
    Service svc;
    auto conn = svc.connect();
    std::string sid = collect(svc, conn, {{"id", 1}, {"op", "createSession"}, {"args", {{"source", kTarget}}}})
                          .at("result").at("session");
    std::vector<json> events;
    json r = collect(svc, conn, {{"id", 2}, {"op", "continue"}, {"session", sid}}, &events);
    ASSERT_TRUE(r.contains("result")) << r.dump();
    ASSERT_EQ(events.size(), 2u);
    EXPECT_EQ(events[0].at("event"), "output");
    EXPECT_EQ(events[0].at("payload").at("text"), "hi");
    EXPECT_EQ(events[0].at("payload").at("source"), "debuggee");
    EXPECT_EQ(events[1].at("event"), "finished");
    EXPECT_EQ(events[1].at("payload").at("kind"), "executionFinished");
    json again = collect(svc, conn, {{"id", 3}, {"op", "step"}, {"session", sid}});
    EXPECT_EQ(again.at("error").at("code"), "sessionFinished");
}

TEST(Service, SnapshotsRoundTripThroughJson) {
    Service svc;
    auto conn = svc.connect();
    json r = collect(svc, conn, {{"id", 1}, {"op", "createSession"}, {"args", {{"source", kTarget}}}});
    std::string sid = r.at("result").at("session");
    for (int i = 0; i < 4; ++i) collect(svc, conn, {{"id", 10 + i}, {"op", "step"}, {"session", sid}});
    json snap = collect(svc, conn, {{"id", 20}, {"op", "snapshot"}, {"session", sid}}).at("result");
    if (snap.contains("snapshot")) snap = snap.at("snapshot");
    SessionSnapshot parsed = snap.get<SessionSnapshot>();
    EXPECT_EQ(json(parsed), snap);
    EXPECT_FALSE(parsed.finished);
    ASSERT_FALSE(parsed.stack.empty());
    EXPECT_EQ(parsed.stack[0].class_name, "");
    EXPECT_EQ(parsed.stack[0].method, "<main>");
}

TEST(Service, ScriptFailuresCarryAStack) {
    Service svc;
    auto conn = svc.connect();
    std::string sid = collect(svc, conn, {{"id", 1}, {"op", "createSession"}, {"args", {{"source", kTarget}}}})
                          .at("result").at("session");
    json r = collect(svc, conn, {{"id", 2}, {"op", "evalScript"}, {"session", sid}, {"args", {{"script", "nil bar"}}}});
    EXPECT_EQ(r.at("error").at("code"), "scriptError");
    EXPECT_TRUE(r.at("error").at("data").at("stack").is_string());
}

TEST(Stdio, HelloThenOneResponsePerLine) {
    Service svc;
    std::istringstream in("{\"id\":1,\"op\":\"listScenarios\"}\n\n{\"id\":1,\"op\":\"listScenarios\"}\n");
    std::ostringstream out;
    serve_stdio(svc, in, out);
    std::istringstream lines(out.str());
    std::vector<json> msgs;
    for (std::string line; std::getline(lines, line);) msgs.push_back(json::parse(line));
    ASSERT_EQ(msgs.size(), 3u);
    EXPECT_EQ(msgs[0].at("v"), 1);
    EXPECT_EQ(msgs[1].at("result").at("scenarios").size(), 12u);
    EXPECT_EQ(msgs[2].at("error").at("code"), "badArgs");  // duplicate id
}

TEST(WebSocket, AcceptKeyMatchesTheRfcExample) {
    EXPECT_EQ(websocket_accept("dGhlIHNhbXBsZSBub25jZQ=="), "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=");
}

TEST(Server, NdjsonOverTcp) {
    Service svc;
    Server server(svc, {});
    std::uint16_t port = server.start();
    wire::Client c(port);
    EXPECT_EQ(c.hello.at("v"), 1);
    json r = c.call({{"op", "createSession"}, {"args", {{"source", kTarget}}}});
    json step = c.call({{"op", "stepOver"}, {"session", r.at("session")}});
    EXPECT_EQ(step.at("outcome"), "advanced");
    server.stop();
}

TEST(Server, WebSocketUpgrade) {
    Service svc;
    Server server(svc, {});
    std::uint16_t port = server.start();
    int fd = connect_to(port);
    ASSERT_GE(fd, 0);
    send_all(fd, "GET /ws HTTP/1.1\r\nHost: localhost\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                 "Sec-WebSocket-Key: dGhlIHNhbXBsZSBub25jZQ==\r\nSec-WebSocket-Version: 13\r\n\r\n");
    std::string head;
    while (head.find("\r\n\r\n") == std::string::npos) {
        std::string c = recv_exact(fd, 1);
        if (c.empty()) break;
        head += c;
    }
    EXPECT_EQ(head.rfind("HTTP/1.1 101", 0), 0u) << head;
    EXPECT_NE(head.find("s3pPLMBiTxaQ9kYGzzhZRbK+xOo="), std::string::npos);
    EXPECT_EQ(json::parse(read_server_frame(fd)).at("v"), 1);
    send_all(fd, masked_text(R"({"id":7,"op":"listScenarios"})"));
    json resp = json::parse(read_server_frame(fd));
    EXPECT_EQ(resp.at("id"), 7);
    EXPECT_EQ(resp.at("result").at("scenarios").size(), 12u);
    ::close(fd);
    server.stop();
}

TEST(Server, StaticUi) {
    auto dir = std::filesystem::temp_directory_path() / ("sindarin-ui-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "index.html") << "<p>console</p>";
    Service svc;
    Server server(svc, {0, "127.0.0.1", dir.string()});
    std::uint16_t port = server.start();
    httplib::Client http("127.0.0.1", port);
    auto ok = http.Get("/");
    ASSERT_TRUE(ok);
    EXPECT_EQ(ok->status, 200);
    EXPECT_EQ(ok->body, "<p>console</p>");
    EXPECT_EQ(ok->get_header_value("Content-Type"), "text/html; charset=utf-8");
    auto missing = http.Get("/nope.js");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    // httplib normalises paths, so send the traversal by hand
    int fd = connect_to(port);
    send_all(fd, "GET /../secret HTTP/1.1\r\nHost: x\r\n\r\n");
    std::string reply = recv_exact(fd, 12);
    EXPECT_EQ(reply, "HTTP/1.1 403");
    ::close(fd);
    server.stop();
    std::filesystem::remove_all(dir);
}
