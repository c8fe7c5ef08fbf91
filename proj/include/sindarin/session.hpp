#pragma once

#include "sindarin/error.hpp"
#include "sindarin/lumen/vm.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sindarin {

namespace script {
struct Binding;
}

using lumen::Value;
using ContextPtr = std::shared_ptr<lumen::Context>;

class DebugSession;
using HitAction = std::function<void(DebugSession&)>;

enum class HitKind { Breakpoint, WatchCall, WatchWrite, UnhandledException, ExecutionFinished };
std::string_view to_string(HitKind kind);

/// Why continue stopped. The triggering instruction has not run yet.
struct HitDescriptor {
    HitKind kind = HitKind::ExecutionFinished;
    std::optional<std::uint64_t> breakpoint;
    std::optional<std::uint64_t> watch;
    const lumen::Node* node = nullptr;
    std::uint64_t frame_id = 0;
    bool removed = false;  // a once breakpoint removed itself

    bool operator==(const HitDescriptor&) const = default;
};

struct Breakpoint {
    std::uint64_t id = 0;
    const lumen::Node* node = nullptr;               // node target
    const lumen::CompiledMethod* method = nullptr;   // method target, hit at pc 0
    HitAction action;
    bool once = false;
    bool enabled = true;
    std::uint64_t hits = 0;

    std::string describe() const;
};

enum class WatchKind { OnCall, OnWrite };

struct Watch {
    std::uint64_t id = 0;
    WatchKind kind = WatchKind::OnCall;
    Value target;
    std::optional<std::string> selector;
    std::optional<std::string> field;
    std::uint64_t hits = 0;
};

/// Read access to one frame. Copies (from copy_frame) keep the values they had
/// when copied; live frames that were popped reject reads of mutable state.
struct FrameView {
    ContextPtr ctx;

    std::uint64_t frame_id() const { return ctx->id; }
    std::size_t pc() const;
    std::optional<FrameView> sender() const;
    const Value& receiver() const { return ctx->receiver; }
    std::string selector() const;
    const lumen::CompiledMethod& method() const { return *ctx->method; }
    std::vector<Value> arguments() const;
    std::vector<Value> temporaries() const;
    std::vector<std::pair<std::string, Value>> named_temporaries() const;
    const std::vector<Value>& value_stack() const;
    const lumen::Node* node() const;
    bool is_dead() const { return ctx->dead; }
};

ContextPtr copy_frame(const ContextPtr& ctx);

class DebugSession {
public:
    /// Compiles source and suspends before main's first instruction.
    static std::unique_ptr<DebugSession> debug(const std::string& source, lumen::ExecutionOptions options = {});
    static std::unique_ptr<DebugSession> debug(std::shared_ptr<const lumen::CompiledProgram> program,
                                               lumen::ExecutionOptions options = {},
                                               std::shared_ptr<lumen::Heap> heap = nullptr);
    explicit DebugSession(std::shared_ptr<lumen::Execution> execution);

    lumen::Execution& execution() { return *exec_; }
    const lumen::Execution& execution() const { return *exec_; }
    std::shared_ptr<lumen::Execution> execution_ptr() const { return exec_; }
    const lumen::CompiledProgram& program() const { return exec_->program(); }

    // stepping
    lumen::StepOutcome step();
    lumen::StepOutcome step_over();
    void step_until(const std::function<bool(DebugSession&)>& predicate);
    void skip();
    void skip_with(Value replacement);
    HitDescriptor resume();  // the "continue" operation

    // stack access
    bool is_execution_finished() const { return exec_->is_finished(); }
    FrameView context() const;
    std::vector<FrameView> stack() const;
    const Value& receiver() const;
    std::string selector() const;
    const lumen::CompiledMethod& method() const;
    std::vector<Value> arguments() const;
    std::vector<Value> temporaries() const;

    // stack modification; only the live top frame may be changed
    void push(const FrameView& frame, Value value);
    Value pop(const FrameView& frame);

    // AST mapping
    const lumen::Node& current_node() const;
    const lumen::Node* find_node(lumen::NodeId id) const;

    // message and assignment introspection at the pending instruction
    Value message_receiver() const;
    std::string message_selector() const;
    std::vector<Value> message_arguments() const;
    Value assignment_value() const;
    std::string assignment_variable_name() const;

    // breakpoints
    std::uint64_t set_breakpoint();
    std::uint64_t set_breakpoint_on(const lumen::Node& node);
    std::uint64_t set_breakpoint_on(const lumen::CompiledMethod& method);
    void when_hit(std::uint64_t id, HitAction action);
    void once(std::uint64_t id);
    void remove_breakpoint(std::uint64_t id);
    const Breakpoint& breakpoint(std::uint64_t id) const;
    std::vector<const Breakpoint*> breakpoints() const;

    // object-centric watches
    std::uint64_t halt_on_call(const Value& object, std::optional<std::string> selector = std::nullopt);
    std::uint64_t halt_on_write(const Value& object, std::optional<std::string> field = std::nullopt);
    void remove_watch(std::uint64_t id);
    std::vector<const Watch*> watches() const;

    const std::optional<HitDescriptor>& last_hit() const { return last_hit_; }

    /// Called with every hit before its action runs; the service turns these into events.
    std::function<void(const HitDescriptor&)> on_hit;

    /// Guest-side proxies for this session, created by the script host.
    std::shared_ptr<script::Binding> binding;

private:
    void require_running() const;
    const lumen::Context& top_frame() const;
    const lumen::Instruction* pending_instruction() const;
    std::optional<HitDescriptor> check_triggers() const;
    HitDescriptor terminal_hit() const;
    HitDescriptor process(HitDescriptor hit);
    void mark_position();
    bool at_marked_position() const;

    std::shared_ptr<lumen::Execution> exec_;
    std::map<std::uint64_t, Breakpoint> breakpoints_;
    std::map<std::uint64_t, Watch> watches_;
    std::uint64_t next_id_ = 1;
    std::optional<HitDescriptor> last_hit_;
    int reentrancy_ = 0;

    struct Position {
        std::uint64_t frame_id = 0;
        std::size_t pc = 0;
        std::uint64_t steps = 0;
    };
    std::optional<Position> suspended_at_;
};

inline constexpr int kMaxReentrancy = 16;

} // namespace sindarin
