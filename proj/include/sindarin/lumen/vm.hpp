#pragma once

#include "sindarin/lumen/compiler.hpp"
#include "sindarin/lumen/value.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sindarin::lumen {

class Execution;
class Context;

// What a primitive (or a host-side send) produced.
struct Answer {
    Value value;
};
struct Pushed {};  // a frame was pushed; its result arrives later
struct Raise {
    Value exception;
};
using PrimResult = std::variant<Answer, Pushed, Raise>;

// Native frames drive loops and handlers from C++ while every block body they
// evaluate still runs as an ordinary, steppable guest frame.
struct NativeReturn {
    Value value;
};
struct NativeSend {
    Value receiver;
    std::string selector;
    std::vector<Value> args;
};
struct NativeSignal {
    Value exception;
};
using NativeStep = std::variant<NativeReturn, NativeSend, NativeSignal>;

class NativeRoutine {
public:
    virtual ~NativeRoutine() = default;
    virtual const CompiledMethod& method() const = 0;
    /// input is empty on the first resume, then carries the answer of the
    /// previous NativeSend.
    virtual NativeStep resume(Execution& exec, Context& ctx, std::optional<Value> input) = 0;
};

/// Guest frame for `on:do:`; the handler search looks for these.
class HandlerRoutine : public NativeRoutine {
public:
    HandlerRoutine(Value body, Value exception_class, Value handler)
        : body_(std::move(body)), exception_class_(std::move(exception_class)), handler_(std::move(handler)) {}
    const CompiledMethod& method() const override;
    NativeStep resume(Execution& exec, Context& ctx, std::optional<Value> input) override;
    bool handles(const Execution& exec, const Value& exception) const;
    const Value& handler() const { return handler_; }

private:
    Value body_;
    Value exception_class_;
    Value handler_;
};

/// A reified activation. Frames are shared so copies, closures and proxies can
/// outlive them; `dead` marks frames no longer on the stack.
class Context {
public:
    std::uint64_t id = 0;
    const CompiledMethod* method = nullptr;
    Value receiver;
    std::vector<Value> slots;  // arguments then temporaries
    std::vector<Value> stack;
    std::size_t pc = 0;
    std::shared_ptr<Context> sender;
    std::shared_ptr<Context> outer;  // lexically enclosing frame of a block
    std::optional<ObjectRef> closure;
    std::shared_ptr<NativeRoutine> native;
    std::optional<Value> native_input;
    bool dead = false;

    bool is_native() const { return native != nullptr; }
    bool is_block() const { return method && method->is_block(); }
    /// The method frame a block was created in (self for method frames).
    const Context& home() const;
    std::shared_ptr<Context> home_ptr(const std::shared_ptr<Context>& self) const;
    std::vector<Value> arguments() const;
    std::vector<Value> temporaries() const;
    /// Node of the instruction at pc; null for native frames or pc at end.
    const Node* current_node() const;
};

enum class ExecStatus { Running, Finished, Failed };
enum class StepOutcome { Advanced, FramePushed, FrameReturned, Finished, Failed };

std::string_view to_string(ExecStatus s);
std::string_view to_string(StepOutcome s);

struct ExecutionOptions {
    std::uint64_t step_budget = 10'000'000;
    std::int64_t seed = 42;
};

struct FinalState {
    ExecStatus status = ExecStatus::Running;
    Value result;
    std::string output;
    std::string failure;      // "ClassName: text" for failed runs
    std::string heap_digest;  // canonical rendering of result and main temporaries
    std::uint64_t steps = 0;
};

class Execution : public std::enable_shared_from_this<Execution> {
public:
    static std::shared_ptr<Execution> create(std::shared_ptr<const CompiledProgram> program,
                                             ExecutionOptions options = {},
                                             std::shared_ptr<Heap> heap = nullptr);

    Execution(std::shared_ptr<const CompiledProgram> program, ExecutionOptions options,
              std::shared_ptr<Heap> heap);
    Execution(const Execution&) = delete;
    Execution& operator=(const Execution&) = delete;

    const CompiledProgram& program() const { return *program_; }
    std::shared_ptr<const CompiledProgram> program_ptr() const { return program_; }
    const ExecutionOptions& options() const { return options_; }
    Heap& heap() { return *heap_; }
    const Heap& heap() const { return *heap_; }
    std::shared_ptr<Heap> heap_ptr() const { return heap_; }

    ExecStatus status() const { return status_; }
    bool is_finished() const { return status_ != ExecStatus::Running; }
    const Value& result() const { return result_; }
    const std::optional<Value>& failure() const { return failure_; }
    std::string failure_reason() const;
    const std::string& output() const { return output_; }
    void write_output(std::string_view text);
    std::function<void(std::string_view)> on_output;

    std::shared_ptr<Context> top() const { return top_; }
    /// Frames top-first.
    std::vector<std::shared_ptr<Context>> stack() const;
    std::size_t depth() const;
    std::uint64_t steps() const { return steps_; }
    std::uint64_t frames_pushed() const { return frames_pushed_; }
    std::uint64_t frames_popped() const { return frames_popped_; }
    /// Names and final values of main's slots once main has returned.
    const std::vector<std::pair<std::string, Value>>& final_main_slots() const { return final_main_slots_; }

    /// Executes one bytecode of the top frame, then settles native frames and
    /// implicit returns. Throws ExecutionAlreadyFinished, VmFault, StepBudgetExceeded.
    StepOutcome step();
    /// Performs pending implicit returns without executing an instruction
    /// (used so an empty main is finished as soon as a session opens).
    void settle_pending();
    /// Replaces the pending instruction's effect with `replacement`.
    void skip(Value replacement);
    FinalState run_to_completion();
    FinalState final_state() const;

    /// Synchronously evaluates a block (or any object understanding cull:) on
    /// a separate frame chain. Throws Error{ScriptFailed} on an unhandled exception.
    Value evaluate(const Value& callable, std::vector<Value> args);

    // -- services for primitives and host objects ------------------------------
    PrimResult send(const Value& receiver, const std::string& selector, std::vector<Value> args,
                    const ClassInfo* lookup_start = nullptr);
    PrimResult invoke_block(ObjectRef block, std::vector<Value> args);
    void push_native(std::shared_ptr<NativeRoutine> routine, Value receiver);
    const ClassInfo* class_of(const Value& v) const;
    const ClassInfo& builtin(std::string_view name) const;
    Value make_exception(std::string_view class_name, std::string text);
    Value new_collection(std::string_view class_name, std::vector<Value> elements);
    Value transcript() const { return transcript_; }
    std::string print_string(const Value& v) const;
    std::string display_string(const Value& v) const;

    void define_global(std::string name, Value value);
    std::optional<Value> global(std::string_view name) const;
    std::function<std::optional<Value>(std::string_view)> global_fallback;

    const ClassInfo* find_class(std::string_view name) const { return program_->find_class(name); }

private:
    struct Operands {
        std::shared_ptr<Context> ctx;
        std::size_t pc = 0;
        std::vector<Value> values;
    };

    std::shared_ptr<Context> new_context(const CompiledMethod* method, Value receiver);
    void push_frame(std::shared_ptr<Context> ctx);
    void execute(const std::shared_ptr<Context>& ctx, const Instruction& ins);
    void settle();
    void unwind_to(const std::shared_ptr<Context>& stop);
    bool on_stack(const Context* frame) const;
    void deliver(const std::shared_ptr<Context>& to, Value value);
    void return_from(const std::shared_ptr<Context>& frame, Value value);
    void non_local_return(const std::shared_ptr<Context>& frame, Value value);
    void handle(PrimResult result, const std::shared_ptr<Context>& requester, std::optional<Operands> restore);
    void signal(Value exception, std::optional<Operands> restore);
    Value& temp_ref(Context& ctx, std::uint32_t slot, std::uint32_t depth);
    std::string render(const Value& v, bool display, int depth) const;

    std::shared_ptr<const CompiledProgram> program_;
    ExecutionOptions options_;
    std::shared_ptr<Heap> heap_;
    std::shared_ptr<Context> top_;
    ExecStatus status_ = ExecStatus::Running;
    Value result_;
    std::optional<Value> failure_;
    std::string output_;
    std::map<std::string, Value, std::less<>> globals_;
    Value transcript_;
    std::uint64_t next_frame_id_ = 1;
    std::uint64_t steps_ = 0;
    std::uint64_t frames_pushed_ = 0;
    std::uint64_t frames_popped_ = 0;
    std::size_t depth_ = 0;
    std::vector<std::pair<std::string, Value>> final_main_slots_;

    // evaluate() nests a frame chain whose bottom frame has no sender.
    int nesting_ = 0;
    std::optional<Value> nested_result_;
};

/// Primitive implementation table keyed by (class, selector). Class-side
/// primitives (sent to a class handle) are registered with meta = true.
using Primitive = std::function<PrimResult(Execution&, const Value& receiver, std::vector<Value>& args)>;
const Primitive* find_primitive(const ClassInfo* cls, std::string_view selector, bool meta = false);
void register_primitive(std::string_view class_name, std::string selector, Primitive fn, bool meta = false);
/// Every selector with a primitive on cls (not inherited).
std::vector<std::string> primitive_selectors(const ClassInfo* cls, bool meta = false);

/// Synthetic method describing a native frame, e.g. "Block>>whileTrue:".
const CompiledMethod& native_method(std::string_view class_name, std::string_view selector);

/// Convenience for tests and the CLI.
FinalState run_source(const std::string& source, ExecutionOptions options = {});

} // namespace sindarin::lumen
