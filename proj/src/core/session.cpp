#include "sindarin/session.hpp"

#include <algorithm>

namespace sindarin {

using lumen::CompiledMethod;
using lumen::Context;
using lumen::Node;
using lumen::Opcode;
using lumen::StepOutcome;

std::string_view to_string(HitKind kind) {
    switch (kind) {
    case HitKind::Breakpoint: return "breakpoint";
    case HitKind::WatchCall: return "watchCall";
    case HitKind::WatchWrite: return "watchWrite";
    case HitKind::UnhandledException: return "unhandledException";
    case HitKind::ExecutionFinished: return "executionFinished";
    }
    return "?";
}

std::string Breakpoint::describe() const {
    if (method) return method->print_name();
    if (node) return "node " + std::to_string(node->id);
    return "?";
}

// -- frames -------------------------------------------------------------------

namespace {

void require_alive(const Context& ctx) {
    if (ctx.dead) throw Error(ErrorCode::DeadFrame, "frame " + std::to_string(ctx.id) + " has returned");
}

} // namespace

std::size_t FrameView::pc() const {
    require_alive(*ctx);
    return ctx->pc;
}

std::optional<FrameView> FrameView::sender() const {
    if (!ctx->sender) return std::nullopt;
    return FrameView{ctx->sender};
}

std::string FrameView::selector() const {
    const CompiledMethod* m = ctx->method;
    if (m->is_block() && m->home) return m->home->selector;
    return m->selector;
}

std::vector<Value> FrameView::arguments() const {
    require_alive(*ctx);
    return ctx->arguments();
}

std::vector<Value> FrameView::temporaries() const {
    require_alive(*ctx);
    return ctx->temporaries();
}

std::vector<std::pair<std::string, Value>> FrameView::named_temporaries() const {
    require_alive(*ctx);
    std::vector<std::pair<std::string, Value>> out;
    for (std::size_t i = 0; i < ctx->slots.size() && i < ctx->method->slot_names.size(); ++i)
        out.emplace_back(ctx->method->slot_names[i], ctx->slots[i]);
    return out;
}

const std::vector<Value>& FrameView::value_stack() const {
    require_alive(*ctx);
    return ctx->stack;
}

const Node* FrameView::node() const {
    if (ctx->dead) return nullptr;
    return ctx->current_node();
}

ContextPtr copy_frame(const ContextPtr& ctx) {
    auto copy = std::make_shared<Context>(*ctx);
    copy->dead = false;
    copy->native = nullptr;
    copy->native_input.reset();
    copy->method = ctx->method;
    return copy;
}

// -- session ------------------------------------------------------------------

std::unique_ptr<DebugSession> DebugSession::debug(const std::string& source, lumen::ExecutionOptions options) {
    return debug(lumen::compile_source(source), options);
}

std::unique_ptr<DebugSession> DebugSession::debug(std::shared_ptr<const lumen::CompiledProgram> program,
                                                  lumen::ExecutionOptions options,
                                                  std::shared_ptr<lumen::Heap> heap) {
    return std::make_unique<DebugSession>(lumen::Execution::create(std::move(program), options, std::move(heap)));
}

DebugSession::DebugSession(std::shared_ptr<lumen::Execution> execution) : exec_(std::move(execution)) {
    // an empty main has nothing to suspend on
    exec_->settle_pending();
}

void DebugSession::require_running() const {
    if (exec_->is_finished()) throw Error(ErrorCode::ExecutionAlreadyFinished, "execution already finished");
}

const Context& DebugSession::top_frame() const {
    if (!exec_->top()) throw Error(ErrorCode::ExecutionAlreadyFinished, "execution already finished");
    return *exec_->top();
}

const lumen::Instruction* DebugSession::pending_instruction() const {
    auto top = exec_->top();
    if (!top || top->native || top->pc >= top->method->code.size()) return nullptr;
    return &top->method->code[top->pc];
}

// Explicit stepping leaves the debugger suspended where it stopped, so a
// following continue moves on before it looks for triggers.
StepOutcome DebugSession::step() {
    require_running();
    StepOutcome out = exec_->step();
    mark_position();
    return out;
}

StepOutcome DebugSession::step_over() {
    require_running();
    std::size_t entry = exec_->depth();
    StepOutcome out = exec_->step();
    while (exec_->status() == lumen::ExecStatus::Running && exec_->depth() > entry) out = exec_->step();
    mark_position();
    if (exec_->status() == lumen::ExecStatus::Failed)
        throw Error(ErrorCode::UnhandledExceptionDuringStepOver, "unhandled exception during step over: " + exec_->failure_reason());
    return out;
}

void DebugSession::step_until(const std::function<bool(DebugSession&)>& predicate) {
    require_running();
    do {
        exec_->step();
    } while (!exec_->is_finished() && !predicate(*this));
    mark_position();
}

void DebugSession::skip() { skip_with(Value{}); }

void DebugSession::skip_with(Value replacement) {
    require_running();
    exec_->skip(std::move(replacement));
    mark_position();
}

// -- continue -----------------------------------------------------------------

std::optional<HitDescriptor> DebugSession::check_triggers() const {
    auto top = exec_->top();
    if (!top || top->native || top->pc >= top->method->code.size()) return std::nullopt;
    const Node* node = top->current_node();

    for (const auto& [id, bp] : breakpoints_) {
        if (!bp.enabled) continue;
        bool hit = bp.method ? (top->method == bp.method && top->pc == 0) : (node == bp.node);
        if (hit) return HitDescriptor{HitKind::Breakpoint, id, std::nullopt, node, top->id, false};
    }

    const lumen::Instruction& ins = top->method->code[top->pc];
    if (ins.op == Opcode::Send || ins.op == Opcode::SendSuper) {
        const Value& rcv = top->stack.at(top->stack.size() - ins.b - 1);
        const std::string& sel = top->method->selector_at(ins.a);
        for (const auto& [id, w] : watches_) {
            if (w.kind != WatchKind::OnCall || !lumen::identical(w.target, rcv)) continue;
            if (w.selector && *w.selector != sel) continue;
            return HitDescriptor{HitKind::WatchCall, std::nullopt, id, node, top->id, false};
        }
    } else if (ins.op == Opcode::StoreField) {
        const auto* self = std::get_if<lumen::ObjectRef>(&top->receiver);
        if (self) {
            const auto& obj = exec_->heap().get(*self);
            const std::string& field = obj.cls->fields.at(ins.a);
            for (const auto& [id, w] : watches_) {
                if (w.kind != WatchKind::OnWrite || !lumen::identical(w.target, top->receiver)) continue;
                if (w.field && *w.field != field) continue;
                return HitDescriptor{HitKind::WatchWrite, std::nullopt, id, node, top->id, false};
            }
        }
    }
    return std::nullopt;
}

HitDescriptor DebugSession::terminal_hit() const {
    HitDescriptor hit;
    if (exec_->status() == lumen::ExecStatus::Failed) {
        hit.kind = HitKind::UnhandledException;
        if (auto top = exec_->top()) {
            hit.node = top->current_node();
            hit.frame_id = top->id;
        }
    } else {
        hit.kind = HitKind::ExecutionFinished;
    }
    return hit;
}

void DebugSession::mark_position() {
    auto top = exec_->top();
    if (!top) {
        suspended_at_.reset();
        return;
    }
    suspended_at_ = Position{top->id, top->pc, exec_->steps()};
}

bool DebugSession::at_marked_position() const {
    auto top = exec_->top();
    return suspended_at_ && top && suspended_at_->frame_id == top->id && suspended_at_->pc == top->pc &&
           suspended_at_->steps == exec_->steps();
}

HitDescriptor DebugSession::process(HitDescriptor hit) {
    last_hit_ = hit;
    mark_position();
    if (hit.breakpoint) {
        auto it = breakpoints_.find(*hit.breakpoint);
        if (it != breakpoints_.end()) {
            Breakpoint& bp = it->second;
            ++bp.hits;
            bool once = bp.once;
            if (once) bp.enabled = false;
            HitAction action = bp.action;
            if (once) {
                hit.removed = true;
                last_hit_ = hit;
            }
            if (action) {
                if (reentrancy_ >= kMaxReentrancy)
                    throw Error(ErrorCode::ReentrancyLimit, "whenHit actions nested more than " + std::to_string(kMaxReentrancy) + " deep");
                ++reentrancy_;
                struct Guard {
                    int& n;
                    ~Guard() { --n; }
                } guard{reentrancy_};
                if (on_hit) on_hit(hit);
                action(*this);
                if (once) breakpoints_.erase(hit.breakpoint.value());
                // an action that continued on its own already reported a later hit
                return last_hit_.value_or(hit);
            }
            if (once) breakpoints_.erase(*hit.breakpoint);
        }
    } else if (hit.watch) {
        auto it = watches_.find(*hit.watch);
        if (it != watches_.end()) ++it->second.hits;
    }
    if (on_hit) on_hit(hit);
    return hit;
}

HitDescriptor DebugSession::resume() {
    bool skip_first = at_marked_position();
    while (!exec_->is_finished()) {
        if (!skip_first) {
            if (auto hit = check_triggers()) return process(*hit);
        }
        skip_first = false;
        exec_->step();
    }
    return process(terminal_hit());
}

// -- stack access -------------------------------------------------------------

FrameView DebugSession::context() const {
    if (!exec_->top()) throw Error(ErrorCode::ExecutionAlreadyFinished, "execution already finished");
    return FrameView{exec_->top()};
}

std::vector<FrameView> DebugSession::stack() const {
    std::vector<FrameView> out;
    for (auto& c : exec_->stack()) out.push_back(FrameView{c});
    return out;
}

const Value& DebugSession::receiver() const { return top_frame().receiver; }
std::string DebugSession::selector() const { return context().selector(); }
const CompiledMethod& DebugSession::method() const { return *top_frame().method; }
std::vector<Value> DebugSession::arguments() const { return top_frame().arguments(); }
std::vector<Value> DebugSession::temporaries() const { return top_frame().temporaries(); }

void DebugSession::push(const FrameView& frame, Value value) {
    if (frame.ctx != exec_->top() || frame.ctx->native) throw Error(ErrorCode::NotTopFrame, "only the live top frame can be modified");
    frame.ctx->stack.push_back(std::move(value));
}

Value DebugSession::pop(const FrameView& frame) {
    if (frame.ctx != exec_->top() || frame.ctx->native) throw Error(ErrorCode::NotTopFrame, "only the live top frame can be modified");
    if (frame.ctx->stack.empty()) throw Error(ErrorCode::EmptyValueStack, "value stack is empty");
    Value v = std::move(frame.ctx->stack.back());
    frame.ctx->stack.pop_back();
    return v;
}

// -- AST mapping --------------------------------------------------------------

const Node& DebugSession::current_node() const {
    if (exec_->status() == lumen::ExecStatus::Finished || !exec_->top())
        throw Error(ErrorCode::ExecutionAlreadyFinished, "execution already finished");
    const Node* n = exec_->top()->current_node();
    if (!n) throw Error(ErrorCode::PcOutOfRange, "no instruction pending in the top frame");
    return *n;
}

const Node* DebugSession::find_node(lumen::NodeId id) const {
    for (const lumen::CompiledProgram* p = &program(); p; p = p->base.get())
        if (const Node* n = p->ast->find(id)) return n;
    return nullptr;
}

// -- introspection ------------------------------------------------------------

namespace {

bool is_send(const lumen::Instruction* ins) { return ins && (ins->op == Opcode::Send || ins->op == Opcode::SendSuper); }
bool is_store(const lumen::Instruction* ins) { return ins && (ins->op == Opcode::StoreTemp || ins->op == Opcode::StoreField); }

} // namespace

Value DebugSession::message_receiver() const {
    const auto* ins = pending_instruction();
    if (!is_send(ins)) throw Error(ErrorCode::NotAtMessageSend, "the pending instruction is not a message send");
    const auto& st = exec_->top()->stack;
    return st.at(st.size() - ins->b - 1);
}

std::string DebugSession::message_selector() const {
    const auto* ins = pending_instruction();
    if (!is_send(ins)) throw Error(ErrorCode::NotAtMessageSend, "the pending instruction is not a message send");
    return exec_->top()->method->selector_at(ins->a);
}

std::vector<Value> DebugSession::message_arguments() const {
    const auto* ins = pending_instruction();
    if (!is_send(ins)) throw Error(ErrorCode::NotAtMessageSend, "the pending instruction is not a message send");
    const auto& st = exec_->top()->stack;
    return {st.end() - ins->b, st.end()};
}

Value DebugSession::assignment_value() const {
    const auto* ins = pending_instruction();
    if (!is_store(ins)) throw Error(ErrorCode::NotAtAssignment, "the pending instruction is not an assignment");
    return exec_->top()->stack.back();
}

std::string DebugSession::assignment_variable_name() const {
    const auto* ins = pending_instruction();
    if (!is_store(ins)) throw Error(ErrorCode::NotAtAssignment, "the pending instruction is not an assignment");
    return exec_->top()->current_node()->name;
}

// -- breakpoints and watches --------------------------------------------------

std::uint64_t DebugSession::set_breakpoint() { return set_breakpoint_on(current_node()); }

std::uint64_t DebugSession::set_breakpoint_on(const Node& node) {
    auto stops_in = [&](const Node* n) {
        const CompiledMethod* m = n ? program().method_containing(*n) : nullptr;
        return m && m->node_to_pcs.count(node.id) > 0;
    };
    // a block literal's own instruction (make_block) lives in the enclosing method
    bool stoppable = stops_in(&node) || (node.kind == lumen::NodeKind::Block && stops_in(node.parent));
    if (!stoppable)
        throw Error(ErrorCode::UnknownTarget, "node " + std::to_string(node.id) + " has no instruction to stop at");
    Breakpoint bp;
    bp.id = next_id_++;
    bp.node = &node;
    breakpoints_.emplace(bp.id, std::move(bp));
    return next_id_ - 1;
}

std::uint64_t DebugSession::set_breakpoint_on(const CompiledMethod& method) {
    if (method.kind == lumen::MethodKind::Native || method.code.empty())
        throw Error(ErrorCode::UnknownTarget, method.print_name() + " has no instructions to stop at");
    Breakpoint bp;
    bp.id = next_id_++;
    bp.method = &method;
    breakpoints_.emplace(bp.id, std::move(bp));
    return next_id_ - 1;
}

const Breakpoint& DebugSession::breakpoint(std::uint64_t id) const {
    auto it = breakpoints_.find(id);
    if (it == breakpoints_.end()) throw Error(ErrorCode::UnknownTarget, "no breakpoint " + std::to_string(id));
    return it->second;
}

void DebugSession::when_hit(std::uint64_t id, HitAction action) {
    breakpoint(id);
    breakpoints_[id].action = std::move(action);
}

void DebugSession::once(std::uint64_t id) {
    breakpoint(id);
    breakpoints_[id].once = true;
}

void DebugSession::remove_breakpoint(std::uint64_t id) { breakpoints_.erase(id); }

std::vector<const Breakpoint*> DebugSession::breakpoints() const {
    std::vector<const Breakpoint*> out;
    for (const auto& [id, bp] : breakpoints_) out.push_back(&bp);
    return out;
}

namespace {

void require_watchable(const lumen::Execution& exec, const Value& v) {
    if (!std::holds_alternative<lumen::ObjectRef>(v))
        throw Error(ErrorCode::NonWatchableValue, exec.print_string(v) + " has no identity to watch");
}

} // namespace

std::uint64_t DebugSession::halt_on_call(const Value& object, std::optional<std::string> selector) {
    require_watchable(*exec_, object);
    Watch w{next_id_++, WatchKind::OnCall, object, std::move(selector), std::nullopt, 0};
    watches_.emplace(w.id, w);
    return w.id;
}

std::uint64_t DebugSession::halt_on_write(const Value& object, std::optional<std::string> field) {
    require_watchable(*exec_, object);
    if (field) {
        const auto& obj = exec_->heap().get(std::get<lumen::ObjectRef>(object));
        if (obj.cls->field_index(*field) < 0)
            throw Error(ErrorCode::UnknownTarget, obj.cls->name + " has no field " + *field);
    }
    Watch w{next_id_++, WatchKind::OnWrite, object, std::nullopt, std::move(field), 0};
    watches_.emplace(w.id, w);
    return w.id;
}

void DebugSession::remove_watch(std::uint64_t id) { watches_.erase(id); }

std::vector<const Watch*> DebugSession::watches() const {
    std::vector<const Watch*> out;
    for (const auto& [id, w] : watches_) out.push_back(&w);
    return out;
}

} // namespace sindarin
