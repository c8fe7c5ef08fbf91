#include "sindarin/script.hpp"

#include <mutex>
#include <set>

namespace sindarin::script {

using namespace lumen;

// Per-session guest proxies, kept so one frame always maps to one guest
// object (scripts compare contexts with ==).
struct Binding {
    ObjectRef self;
    std::map<const Context*, std::pair<ContextPtr, ObjectRef>> frames;
    std::map<std::uint64_t, ObjectRef> breakpoints;
};

namespace {

struct SessionProxy : ForeignObject {
    std::weak_ptr<DebugSession> weak;
    std::shared_ptr<DebugSession> owned;  // sessions a script created itself
    std::shared_ptr<DebugSession> get() const { return owned ? owned : weak.lock(); }
    std::string print_string() const override { return "a ScriptableDebugger"; }
};

struct FrameProxy : ForeignObject {
    FrameView frame;
    std::weak_ptr<DebugSession> session;
    bool copy = false;
    std::string print_string() const override {
        std::string s = frame.method().print_name();
        if (!frame.ctx->native) s += " pc " + std::to_string(frame.ctx->pc);
        return (copy ? "a Context copy(" : "a Context(") + s + ")";
    }
};

struct BreakpointProxy : ForeignObject {
    std::weak_ptr<DebugSession> session;
    std::uint64_t id = 0;
    std::string print_string() const override { return "a Breakpoint(" + std::to_string(id) + ")"; }
};

struct HitProxy : ForeignObject {
    HitDescriptor hit;
    std::string print_string() const override { return "a DebuggerHit(" + std::string(to_string(hit.kind)) + ")"; }
};

template <class T>
T* foreign_of(Execution& e, const Value& v) {
    const auto* ref = std::get_if<ObjectRef>(&v);
    if (!ref) return nullptr;
    HeapObject* obj = e.heap().find(ref->handle);
    return obj ? dynamic_cast<T*>(obj->foreign.get()) : nullptr;
}

ObjectRef new_foreign(Execution& e, std::string_view cls, std::shared_ptr<ForeignObject> f) {
    ObjectRef ref = e.heap().allocate(&e.builtin(cls));
    e.heap().get(ref).foreign = std::move(f);
    return ref;
}

Binding& binding_of(DebugSession& s) {
    if (!s.binding) s.binding = std::make_shared<Binding>();
    return *s.binding;
}

Value wrap_session(Execution& e, const std::shared_ptr<DebugSession>& session, bool owned) {
    Binding& b = binding_of(*session);
    if (b.self.handle != 0) return b.self;
    auto proxy = std::make_shared<SessionProxy>();
    if (owned) proxy->owned = session;
    else proxy->weak = session;
    b.self = new_foreign(e, "ScriptableDebugger", proxy);
    return b.self;
}

Value wrap_frame(Execution& e, const std::shared_ptr<DebugSession>& session, const ContextPtr& ctx) {
    Binding& b = binding_of(*session);
    auto it = b.frames.find(ctx.get());
    if (it != b.frames.end() && it->second.first == ctx) return it->second.second;
    auto proxy = std::make_shared<FrameProxy>();
    proxy->frame = FrameView{ctx};
    proxy->session = session;
    ObjectRef ref = new_foreign(e, "Context", proxy);
    b.frames[ctx.get()] = {ctx, ref};
    return ref;
}

Value wrap_breakpoint(Execution& e, const std::shared_ptr<DebugSession>& session, std::uint64_t id) {
    Binding& b = binding_of(*session);
    auto it = b.breakpoints.find(id);
    if (it != b.breakpoints.end()) return it->second;
    auto proxy = std::make_shared<BreakpointProxy>();
    proxy->session = session;
    proxy->id = id;
    ObjectRef ref = new_foreign(e, "Breakpoint", proxy);
    b.breakpoints[id] = ref;
    return ref;
}

Value wrap_hit(Execution& e, const HitDescriptor& hit) {
    auto proxy = std::make_shared<HitProxy>();
    proxy->hit = hit;
    return new_foreign(e, "DebuggerHit", proxy);
}

Value debugger_error(Execution& e, const Error& err) {
    Value exc = e.make_exception("DebuggerError", err.what());
    HeapObject& obj = e.heap().get(std::get<ObjectRef>(exc));
    int f = obj.cls->field_index("code");
    if (f >= 0) obj.fields[static_cast<std::size_t>(f)] = Symbol{std::string(to_string(err.code()))};
    return exc;
}

std::string symbol_text(const Value& v) {
    if (const auto* s = std::get_if<Symbol>(&v)) return s->name;
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw Error(ErrorCode::BadArgs, "a Symbol is expected");
}

// Wraps a session operation so host errors surface as guest DebuggerErrors.
using SessionOp = std::function<Value(Execution&, const std::shared_ptr<DebugSession>&, std::vector<Value>&)>;

Primitive session_primitive(SessionOp op) {
    return [op](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        auto* proxy = foreign_of<SessionProxy>(e, self);
        auto session = proxy ? proxy->get() : nullptr;
        if (!session) return Raise{e.make_exception("DebuggerError", "the debugging session is gone")};
        try {
            return Answer{op(e, session, args)};
        } catch (const Error& err) {
            return Raise{debugger_error(e, err)};
        }
    };
}

using FrameOp = std::function<Value(Execution&, FrameProxy&, const std::shared_ptr<DebugSession>&, std::vector<Value>&)>;

Primitive frame_primitive(FrameOp op) {
    return [op](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        auto* proxy = foreign_of<FrameProxy>(e, self);
        if (!proxy) return Raise{e.make_exception("DebuggerError", "not a context")};
        auto session = proxy->session.lock();
        if (!session) return Raise{e.make_exception("DebuggerError", "the debugging session is gone")};
        try {
            return Answer{op(e, *proxy, session, args)};
        } catch (const Error& err) {
            return Raise{debugger_error(e, err)};
        }
    };
}

Value array_of(Execution& e, std::vector<Value> values) { return e.new_collection("Array", std::move(values)); }

Value outcome_symbol(StepOutcome o) { return Symbol{std::string(to_string(o))}; }

// Native frame behind `dbg stepUntil: aBlock`: the target steps on the host
// side and the predicate runs as ordinary guest frames, so a debugger
// watching this script sees every predicate evaluation.
class StepUntilRoutine : public NativeRoutine {
public:
    StepUntilRoutine(std::shared_ptr<DebugSession> session, Value predicate)
        : session_(std::move(session)), predicate_(std::move(predicate)) {}
    const CompiledMethod& method() const override { return native_method("ScriptableDebugger", "stepUntil:"); }
    NativeStep resume(Execution& e, Context&, std::optional<Value> input) override {
        if (input) {
            const auto* b = std::get_if<bool>(&*input);
            if (!b) return NativeSignal{e.make_exception("Error", "stepUntil: predicate did not answer a Boolean")};
            if (*b) return NativeReturn{Nil{}};
        }
        try {
            if (!input) {
                if (session_->is_execution_finished())
                    return NativeSignal{debugger_error(e, Error(ErrorCode::ExecutionAlreadyFinished, "execution already finished"))};
            }
            session_->step();
        } catch (const Error& err) {
            return NativeSignal{debugger_error(e, err)};
        }
        if (session_->is_execution_finished()) return NativeReturn{Nil{}};
        return NativeSend{predicate_, "value", {}};
    }

private:
    std::shared_ptr<DebugSession> session_;
    Value predicate_;
};

HitAction guest_action(const std::shared_ptr<Execution>& exec, Value block, Value dbg) {
    std::weak_ptr<Execution> weak = exec;
    return [weak, block, dbg](DebugSession&) {
        auto e = weak.lock();
        if (!e) throw Error(ErrorCode::ScriptFailed, "the script that installed this action has gone");
        e->evaluate(block, {dbg});
    };
}

void install_session_primitives() {
    auto add = [](const char* sel, SessionOp op) { register_primitive("ScriptableDebugger", sel, session_primitive(std::move(op))); };

    // stepping
    add("step", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return outcome_symbol(s->step());
    });
    add("stepOver", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return outcome_symbol(s->step_over());
    });
    register_primitive("ScriptableDebugger", "stepUntil:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        auto* proxy = foreign_of<SessionProxy>(e, self);
        auto session = proxy ? proxy->get() : nullptr;
        if (!session) return Raise{e.make_exception("DebuggerError", "the debugging session is gone")};
        e.push_native(std::make_shared<StepUntilRoutine>(session, args.at(0)), self);
        return Pushed{};
    });
    add("skip", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        s->skip();
        return Nil{};
    });
    add("skipWith:", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>& args) -> Value {
        s->skip_with(args.at(0));
        return Nil{};
    });
    add("continue", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return wrap_hit(e, s->resume());
    });

    // stack access
    add("isExecutionFinished", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return s->is_execution_finished();
    });
    add("context", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return wrap_frame(e, s, s->context().ctx);
    });
    add("stack", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        std::vector<Value> frames;
        for (const auto& f : s->stack()) frames.push_back(wrap_frame(e, s, f.ctx));
        return e.new_collection("ContextStack", std::move(frames));
    });
    add("receiver", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value { return s->receiver(); });
    add("selector", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return Symbol{s->selector()};
    });
    add("method", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return MethodRef{&s->method()};
    });
    add("arguments", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return array_of(e, s->arguments());
    });
    add("temporaries", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return array_of(e, s->temporaries());
    });

    // AST
    add("currentNode", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return NodeRef{&s->current_node()};
    });
    add("nodeWithId:", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>& args) -> Value {
        const auto* id = std::get_if<std::int64_t>(&args.at(0));
        const Node* n = id ? s->find_node(static_cast<NodeId>(*id)) : nullptr;
        if (!n) throw Error(ErrorCode::UnknownTarget, "no such node");
        return NodeRef{n};
    });

    // message and assignment helpers
    add("messageReceiver", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return s->message_receiver();
    });
    add("messageSelector", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return Symbol{s->message_selector()};
    });
    add("messageArguments", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return array_of(e, s->message_arguments());
    });
    add("assignmentValue", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return s->assignment_value();
    });
    add("assignmentVariableName", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return Symbol{s->assignment_variable_name()};
    });

    // breakpoints
    add("setBreakpoint", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return wrap_breakpoint(e, s, s->set_breakpoint());
    });
    add("setBreakpointOn:", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>& args) -> Value {
        const Value& target = args.at(0);
        if (const auto* n = std::get_if<NodeRef>(&target)) return wrap_breakpoint(e, s, s->set_breakpoint_on(*n->node));
        if (const auto* m = std::get_if<MethodRef>(&target)) return wrap_breakpoint(e, s, s->set_breakpoint_on(*m->method));
        if (const auto* r = std::get_if<ObjectRef>(&target)) {
            const HeapObject& obj = e.heap().get(*r);
            if (obj.closure) return wrap_breakpoint(e, s, s->set_breakpoint_on(*obj.closure->method));
        }
        throw Error(ErrorCode::UnknownTarget, e.print_string(target) + " is neither a node nor a method");
    });

    // object-centric
    auto halt_on_call = [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>& args) -> Value {
        std::optional<std::string> sel;
        if (args.size() > 1) sel = symbol_text(args[1]);
        s->halt_on_call(args.at(0), sel);
        (void)e;
        return Nil{};
    };
    add("haltOnCall:", halt_on_call);
    add("haltOnCallTo:", halt_on_call);
    add("haltOnCall:for:", halt_on_call);
    auto halt_on_write = [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>& args) -> Value {
        std::optional<std::string> field;
        if (args.size() > 1) field = symbol_text(args[1]);
        s->halt_on_write(args.at(0), field);
        return Nil{};
    };
    add("haltOnWrite:", halt_on_write);
    add("haltOnWrite:field:", halt_on_write);

    // inspection extras
    add("isFailed", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return s->execution().status() == ExecStatus::Failed;
    });
    add("failureReason", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        if (s->execution().status() != ExecStatus::Failed) return Nil{};
        return s->execution().failure_reason();
    });
    add("result", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return s->execution().result();
    });
    add("output", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return s->execution().output();
    });
    add("stepCount", [](Execution&, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        return static_cast<std::int64_t>(s->execution().steps());
    });
    add("lastHit", [](Execution& e, const std::shared_ptr<DebugSession>& s, std::vector<Value>&) -> Value {
        if (!s->last_hit()) return Nil{};
        return wrap_hit(e, *s->last_hit());
    });

    // ScriptableDebugger debugSource: 'source' opens a session sharing the caller's heap
    register_primitive("ScriptableDebugger", "debugSource:", [](Execution& e, const Value&, std::vector<Value>& args) -> PrimResult {
        const auto* src = std::get_if<std::string>(&args.at(0));
        if (!src) return Raise{e.make_exception("Error", "debugSource: expects a String")};
        try {
            std::shared_ptr<DebugSession> s = DebugSession::debug(compile_source(*src, "<debugged>"), e.options(), e.heap_ptr());
            return Answer{wrap_session(e, s, true)};
        } catch (const Error& err) {
            return Raise{debugger_error(e, err)};
        }
    }, true);
}

void install_frame_primitives() {
    auto add = [](const char* sel, FrameOp op) { register_primitive("Context", sel, frame_primitive(std::move(op))); };
    using S = const std::shared_ptr<DebugSession>&;
    add("pc", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value { return static_cast<std::int64_t>(f.frame.pc()); });
    add("sender", [](Execution& e, FrameProxy& f, S s, std::vector<Value>&) -> Value {
        auto sender = f.frame.sender();
        if (!sender) return Nil{};
        return wrap_frame(e, s, sender->ctx);
    });
    add("receiver", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value { return f.frame.receiver(); });
    add("selector", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value { return Symbol{f.frame.selector()}; });
    add("method", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value { return MethodRef{&f.frame.method()}; });
    add("arguments", [](Execution& e, FrameProxy& f, S, std::vector<Value>&) -> Value { return array_of(e, f.frame.arguments()); });
    add("temporaries", [](Execution& e, FrameProxy& f, S, std::vector<Value>&) -> Value {
        return array_of(e, f.frame.temporaries());
    });
    add("push:", [](Execution&, FrameProxy& f, S s, std::vector<Value>& args) -> Value {
        if (f.copy) throw Error(ErrorCode::NotTopFrame, "a copied context cannot be modified");
        s->push(f.frame, args.at(0));
        return args.at(0);
    });
    add("pop", [](Execution&, FrameProxy& f, S s, std::vector<Value>&) -> Value {
        if (f.copy) throw Error(ErrorCode::NotTopFrame, "a copied context cannot be modified");
        return s->pop(f.frame);
    });
    add("copy", [](Execution& e, FrameProxy& f, S s, std::vector<Value>&) -> Value {
        auto proxy = std::make_shared<FrameProxy>();
        proxy->frame = FrameView{copy_frame(f.frame.ctx)};
        proxy->session = s;
        proxy->copy = true;
        return new_foreign(e, "Context", proxy);
    });
    add("frameId", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value { return static_cast<std::int64_t>(f.frame.frame_id()); });
    add("currentNode", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value {
        const Node* n = f.frame.node();
        return n ? Value{NodeRef{n}} : Value{};
    });
    add("isDead", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value { return f.frame.is_dead(); });
    add("isBlockContext", [](Execution&, FrameProxy& f, S, std::vector<Value>&) -> Value { return f.frame.ctx->is_block(); });
    add("valueStack", [](Execution& e, FrameProxy& f, S, std::vector<Value>&) -> Value { return array_of(e, f.frame.value_stack()); });
}

void install_breakpoint_primitives() {
    auto with_bp = [](std::function<Value(Execution&, BreakpointProxy&, const std::shared_ptr<DebugSession>&, const Value&, std::vector<Value>&)> op) {
        return [op](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
            auto* proxy = foreign_of<BreakpointProxy>(e, self);
            auto session = proxy ? proxy->session.lock() : nullptr;
            if (!session) return Raise{e.make_exception("DebuggerError", "the debugging session is gone")};
            try {
                return Answer{op(e, *proxy, session, self, args)};
            } catch (const Error& err) {
                return Raise{debugger_error(e, err)};
            }
        };
    };
    using S = const std::shared_ptr<DebugSession>&;
    register_primitive("Breakpoint", "whenHit:", with_bp([](Execution& e, BreakpointProxy& bp, S s, const Value& self, std::vector<Value>& args) -> Value {
        Value dbg = binding_of(*s).self.handle ? Value{binding_of(*s).self} : Value{};
        s->when_hit(bp.id, guest_action(e.shared_from_this(), args.at(0), dbg));
        return self;
    }));
    register_primitive("Breakpoint", "remove", with_bp([](Execution&, BreakpointProxy& bp, S s, const Value& self, std::vector<Value>&) -> Value {
        s->remove_breakpoint(bp.id);
        return self;
    }));
    register_primitive("Breakpoint", "once", with_bp([](Execution&, BreakpointProxy& bp, S s, const Value& self, std::vector<Value>&) -> Value {
        s->once(bp.id);
        return self;
    }));
    register_primitive("Breakpoint", "id", with_bp([](Execution&, BreakpointProxy& bp, S, const Value&, std::vector<Value>&) -> Value {
        return static_cast<std::int64_t>(bp.id);
    }));
    register_primitive("Breakpoint", "isInstalled", with_bp([](Execution&, BreakpointProxy& bp, S s, const Value&, std::vector<Value>&) -> Value {
        for (const auto* b : s->breakpoints())
            if (b->id == bp.id) return true;
        return false;
    }));
    register_primitive("Breakpoint", "hitCount", with_bp([](Execution&, BreakpointProxy& bp, S s, const Value&, std::vector<Value>&) -> Value {
        for (const auto* b : s->breakpoints())
            if (b->id == bp.id) return static_cast<std::int64_t>(b->hits);
        return Nil{};
    }));
}

void install_hit_primitives() {
    auto add = [](const char* sel, std::function<Value(const HitDescriptor&)> fn) {
        register_primitive("DebuggerHit", sel, [fn](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
            auto* proxy = foreign_of<HitProxy>(e, self);
            if (!proxy) return Raise{e.make_exception("DebuggerError", "not a hit")};
            return Answer{fn(proxy->hit)};
        });
    };
    add("kind", [](const HitDescriptor& h) -> Value { return Symbol{std::string(to_string(h.kind))}; });
    add("breakpointId", [](const HitDescriptor& h) -> Value {
        return h.breakpoint ? Value{static_cast<std::int64_t>(*h.breakpoint)} : Value{};
    });
    add("watchId", [](const HitDescriptor& h) -> Value { return h.watch ? Value{static_cast<std::int64_t>(*h.watch)} : Value{}; });
    add("node", [](const HitDescriptor& h) -> Value { return h.node ? Value{NodeRef{h.node}} : Value{}; });
    add("frameId", [](const HitDescriptor& h) -> Value { return static_cast<std::int64_t>(h.frame_id); });
    add("removed", [](const HitDescriptor& h) -> Value { return h.removed; });
    add("isFinished", [](const HitDescriptor& h) -> Value {
        return h.kind == HitKind::ExecutionFinished || h.kind == HitKind::UnhandledException;
    });
}

} // namespace

void install_primitives() {
    static std::once_flag once;
    std::call_once(once, [] {
        install_session_primitives();
        install_frame_primitives();
        install_breakpoint_primitives();
        install_hit_primitives();
    });
}

Value session_value(const std::shared_ptr<DebugSession>& session) {
    install_primitives();
    return wrap_session(session->execution(), session, false);
}

std::shared_ptr<DebugSession> session_of(Execution& exec, const Value& v) {
    auto* proxy = foreign_of<SessionProxy>(exec, v);
    return proxy ? proxy->get() : nullptr;
}

Value breakpoint_value(const std::shared_ptr<DebugSession>& session, std::uint64_t id) {
    install_primitives();
    session->breakpoint(id);  // throws UnknownTarget for stale ids
    return wrap_breakpoint(session->execution(), session, id);
}

std::optional<FrameView> frame_of(Execution& exec, const Value& v) {
    auto* proxy = foreign_of<FrameProxy>(exec, v);
    if (!proxy) return std::nullopt;
    return proxy->frame;
}

std::shared_ptr<Execution> prepare_script(const std::shared_ptr<DebugSession>& session, const std::string& source) {
    install_primitives();
    auto program = compile_source(source, "<script>");
    auto exec = Execution::create(program, session->execution().options(), session->execution().heap_ptr());
    exec->define_global("dbg", session_value(session));
    // the debuggee's classes are visible to the script (Bar, AtomViewer >> #displayAtom:)
    std::weak_ptr<const CompiledProgram> target = session->execution().program_ptr();
    exec->global_fallback = [target](std::string_view name) -> std::optional<Value> {
        auto p = target.lock();
        if (const ClassInfo* c = p ? p->find_class(name) : nullptr) return ClassRef{c};
        return std::nullopt;
    };
    return exec;
}

ScriptResult eval_script(const std::shared_ptr<DebugSession>& session, const std::string& source) {
    auto exec = prepare_script(session, source);
    exec->run_to_completion();
    if (exec->status() == ExecStatus::Failed) {
        std::string trace;
        for (const auto& ctx : exec->stack()) {
            trace += ctx->method->print_name();
            if (const Node* n = ctx->current_node()) trace += " at node " + std::to_string(n->id);
            trace += "\n";
        }
        throw Error(ErrorCode::ScriptFailed, "script failed: " + exec->failure_reason(), std::nullopt, trace);
    }
    return ScriptResult{exec->result(), exec->print_string(exec->result()), exec->output(), exec};
}

// -- API table ------------------------------------------------------------------

const std::vector<ApiRow>& api_table() {
    static const std::vector<ApiRow> rows = {
        {"Stepping", "dbg step", "ScriptableDebugger", "step", "DebugSession::step"},
        {"Stepping", "dbg stepOver", "ScriptableDebugger", "stepOver", "DebugSession::step_over"},
        {"Stepping", "dbg stepUntil: aPredicate", "ScriptableDebugger", "stepUntil:", "DebugSession::step_until"},
        {"Stepping", "dbg skipWith: obj", "ScriptableDebugger", "skipWith:", "DebugSession::skip_with"},
        {"Stepping", "dbg skip", "ScriptableDebugger", "skip", "DebugSession::skip"},
        {"Stepping", "dbg continue", "ScriptableDebugger", "continue", "DebugSession::resume"},
        {"Stack Access", "dbg isExecutionFinished", "ScriptableDebugger", "isExecutionFinished", "DebugSession::is_execution_finished"},
        {"Stack Access", "dbg context", "ScriptableDebugger", "context", "DebugSession::context"},
        {"Stack Access", "dbg stack", "ScriptableDebugger", "stack", "DebugSession::stack"},
        {"Stack Access", "ctx pc", "Context", "pc", "FrameView::pc"},
        {"Stack Access", "ctx sender", "Context", "sender", "FrameView::sender"},
        {"Stack Access", "ctx receiver", "Context", "receiver", "FrameView::receiver"},
        {"Stack Access", "ctx selector", "Context", "selector", "FrameView::selector"},
        {"Stack Access", "ctx method", "Context", "method", "FrameView::method"},
        {"Stack Access", "ctx arguments", "Context", "arguments", "FrameView::arguments"},
        {"Stack Access", "ctx temporaries", "Context", "temporaries", "FrameView::temporaries"},
        {"Stack Modification", "ctx push: aValue", "Context", "push:", "DebugSession::push"},
        {"Stack Modification", "ctx pop", "Context", "pop", "DebugSession::pop"},
        {"AST and AST Mapping", "dbg currentNode", "ScriptableDebugger", "currentNode", "DebugSession::current_node"},
        {"AST and AST Mapping", "ast accept: visitor", "AstNode", "accept:", "lumen::visit"},
        {"AST and AST Mapping", "ast is*Node", "AstNode", "isMessageNode", "lumen::classify_node"},
        {"Object-Centric Debugging", "dbg haltOnCall: obj", "ScriptableDebugger", "haltOnCall:", "DebugSession::halt_on_call"},
        {"Object-Centric Debugging", "dbg haltOnCall: obj for: m", "ScriptableDebugger", "haltOnCall:for:", "DebugSession::halt_on_call"},
        {"Object-Centric Debugging", "dbg haltOnWrite: obj", "ScriptableDebugger", "haltOnWrite:", "DebugSession::halt_on_write"},
        {"Object-Centric Debugging", "dbg haltOnWrite: obj field: iv", "ScriptableDebugger", "haltOnWrite:field:", "DebugSession::halt_on_write"},
        {"Breakpoints", "dbg setBreakpoint", "ScriptableDebugger", "setBreakpoint", "DebugSession::set_breakpoint"},
        {"Breakpoints", "dbg setBreakpointOn: T", "ScriptableDebugger", "setBreakpointOn:", "DebugSession::set_breakpoint_on"},
        {"Breakpoints", "bp whenHit: aBlock", "Breakpoint", "whenHit:", "DebugSession::when_hit"},
        {"Breakpoints", "bp remove", "Breakpoint", "remove", "DebugSession::remove_breakpoint"},
        {"Breakpoints", "bp once", "Breakpoint", "once", "DebugSession::once"},
        {"Stack Access Helpers", "dbg receiver", "ScriptableDebugger", "receiver", "DebugSession::receiver"},
        {"Stack Access Helpers", "dbg selector", "ScriptableDebugger", "selector", "DebugSession::selector"},
        {"Stack Access Helpers", "dbg method", "ScriptableDebugger", "method", "DebugSession::method"},
        {"Stack Access Helpers", "dbg arguments", "ScriptableDebugger", "arguments", "DebugSession::arguments"},
        {"Stack Access Helpers", "dbg temporaries", "ScriptableDebugger", "temporaries", "DebugSession::temporaries"},
        {"Stack Access Helpers", "dbg messageReceiver", "ScriptableDebugger", "messageReceiver", "DebugSession::message_receiver"},
        {"Stack Access Helpers", "dbg messageSelector", "ScriptableDebugger", "messageSelector", "DebugSession::message_selector"},
        {"Stack Access Helpers", "dbg messageArguments", "ScriptableDebugger", "messageArguments", "DebugSession::message_arguments"},
        {"Stack Access Helpers", "dbg assignmentValue", "ScriptableDebugger", "assignmentValue", "DebugSession::assignment_value"},
        {"Stack Access Helpers", "dbg assignmentVariableName", "ScriptableDebugger", "assignmentVariableName", "DebugSession::assignment_variable_name"},
    };
    return rows;
}

bool script_reachable(const std::string& class_name, const std::string& selector) {
    install_primitives();
    const ClassInfo* cls = prelude()->find_class(class_name);
    for (const ClassInfo* c = cls; c; c = c->superclass) {
        if (c->methods.count(selector)) return true;
        if (find_primitive(c, selector)) return true;
    }
    return false;
}

} // namespace sindarin::script
