#pragma once

#include "sindarin/scenarios.hpp"
#include "sindarin/session.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sindarin::service {

using json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kPreviewLimit = 120;

/// Wire error code for a host error. Injective: no two host codes share one.
std::string wire_code(ErrorCode code);
std::optional<ErrorCode> host_code(const std::string& wire);

/// Bounded rendering of a guest value (canonical serializer, depth 1).
std::string preview(const lumen::Heap& heap, const Value& v);
std::string truncate_preview(std::string text);

struct NodeInfo {
    lumen::NodeId id = 0;
    std::string kind;
    std::uint32_t start = 0;
    std::uint32_t end = 0;
    std::string source_excerpt;
    bool operator==(const NodeInfo&) const = default;
};

struct ValueInfo {
    std::string preview;
    std::string cls;
    std::optional<std::string> ref;  // "obj:<handle>"
    bool operator==(const ValueInfo&) const = default;
};

struct FrameInfo {
    std::uint64_t frame_id = 0;
    std::string class_name;
    std::string selector;
    std::string method;
    std::int64_t pc = 0;
    std::optional<lumen::NodeId> node_id;
    ValueInfo receiver;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> temps;
    bool is_native = false;
    bool operator==(const FrameInfo&) const = default;
};

struct BreakpointInfo {
    std::uint64_t id = 0;
    std::optional<lumen::NodeId> node_id;
    std::optional<std::string> method;
    bool once = false;
    bool enabled = true;
    std::uint64_t hits = 0;
    bool operator==(const BreakpointInfo&) const = default;
};

struct WatchInfo {
    std::uint64_t id = 0;
    std::string kind;  // "call" | "write"
    std::string target;
    std::optional<std::string> selector;
    std::optional<std::string> field;
    std::uint64_t hits = 0;
    bool operator==(const WatchInfo&) const = default;
};

struct PendingMessage {
    std::string selector;
    ValueInfo receiver;
    std::vector<ValueInfo> arguments;
    bool operator==(const PendingMessage&) const = default;
};

struct SessionSnapshot {
    bool finished = false;
    std::string status;
    std::optional<std::string> failure_reason;
    std::optional<NodeInfo> current_node;
    std::optional<PendingMessage> message;
    std::vector<FrameInfo> stack;
    std::string output;
    std::uint64_t steps = 0;
    std::vector<BreakpointInfo> breakpoints;
    std::vector<WatchInfo> watches;
    bool operator==(const SessionSnapshot&) const = default;
};

void to_json(json& j, const NodeInfo& v);
void from_json(const json& j, NodeInfo& v);
void to_json(json& j, const ValueInfo& v);
void from_json(const json& j, ValueInfo& v);
void to_json(json& j, const FrameInfo& v);
void from_json(const json& j, FrameInfo& v);
void to_json(json& j, const BreakpointInfo& v);
void from_json(const json& j, BreakpointInfo& v);
void to_json(json& j, const WatchInfo& v);
void from_json(const json& j, WatchInfo& v);
void to_json(json& j, const PendingMessage& v);
void from_json(const json& j, PendingMessage& v);
void to_json(json& j, const SessionSnapshot& v);
void from_json(const json& j, SessionSnapshot& v);

SessionSnapshot snapshot(const DebugSession& session);
json hit_json(const DebugSession& session, const HitDescriptor& hit);
json node_json(const lumen::Program& program, const lumen::Node& node);
json report_json(const script::ScenarioReport& report);
json halt_json(const script::Halt& halt);

json hello_message();

/// Where a connection's events and responses go, one JSON object per call.
using Emit = std::function<void(const json&)>;

/// The protocol model: sessions, ownership and request dispatch. Thread safe;
/// requests to one session are serialized.
class Service {
public:
    explicit Service(lumen::ExecutionOptions defaults = {});
    ~Service();

    std::uint64_t connect();
    /// Disposes every session the connection owns.
    void disconnect(std::uint64_t connection);

    /// Handles one request. Events are passed to emit before the response,
    /// which is returned (not emitted).
    json handle(std::uint64_t connection, const json& request, const Emit& emit);
    /// Parses one line; malformed JSON answers a badArgs error with id null.
    json handle_line(std::uint64_t connection, const std::string& line, const Emit& emit);

    std::vector<std::string> session_ids() const;

private:
    struct Entry;
    std::shared_ptr<Entry> entry(const std::string& id, std::uint64_t connection);
    json dispatch(std::uint64_t connection, const std::string& op, const json& request, const Emit& emit);

    lumen::ExecutionOptions defaults_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::map<std::uint64_t, std::set<std::int64_t>> seen_ids_;
    std::uint64_t next_session_ = 1;
    std::uint64_t next_connection_ = 1;
};

/// Every op name the service accepts.
const std::vector<std::string>& op_names();

} // namespace sindarin::service
