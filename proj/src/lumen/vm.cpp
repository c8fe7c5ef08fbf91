#include "sindarin/lumen/vm.hpp"

#include "sindarin/error.hpp"
#include "sindarin/lumen/serializer.hpp"

#include <algorithm>
#include <mutex>

namespace sindarin::lumen {

std::string_view to_string(ExecStatus s) {
    switch (s) {
    case ExecStatus::Running: return "running";
    case ExecStatus::Finished: return "finished";
    case ExecStatus::Failed: return "failed";
    }
    return "?";
}

std::string_view to_string(StepOutcome s) {
    switch (s) {
    case StepOutcome::Advanced: return "advanced";
    case StepOutcome::FramePushed: return "framePushed";
    case StepOutcome::FrameReturned: return "frameReturned";
    case StepOutcome::Finished: return "finished";
    case StepOutcome::Failed: return "failed";
    }
    return "?";
}

const CompiledMethod& native_method(std::string_view class_name, std::string_view selector) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<CompiledMethod>, std::less<>> cache;
    std::string key = std::string(class_name) + ">>" + std::string(selector);
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto m = std::make_unique<CompiledMethod>();
    m->selector = std::string(selector);
    m->kind = MethodKind::Native;
    m->owner = prelude()->find_class(class_name);
    m->num_args = selector_arity(selector);
    return *cache.emplace(key, std::move(m)).first->second;
}

// -- Context ------------------------------------------------------------------

const Context& Context::home() const {
    const Context* c = this;
    while (c->outer) c = c->outer.get();
    return *c;
}

std::shared_ptr<Context> Context::home_ptr(const std::shared_ptr<Context>& self) const {
    std::shared_ptr<Context> c = self;
    while (c->outer) c = c->outer;
    return c;
}

std::vector<Value> Context::arguments() const {
    if (!method || native) return {};
    std::size_t n = std::min(method->num_args, slots.size());
    return {slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<Value> Context::temporaries() const {
    if (!method || native) return {};
    std::size_t n = std::min(method->num_args, slots.size());
    return {slots.begin() + static_cast<std::ptrdiff_t>(n), slots.end()};
}

const Node* Context::current_node() const {
    if (native || !method || pc >= method->code.size()) return nullptr;
    return method->pc_to_node[pc];
}

// -- on:do: -------------------------------------------------------------------

const CompiledMethod& HandlerRoutine::method() const { return native_method("Block", "on:do:"); }

NativeStep HandlerRoutine::resume(Execution&, Context&, std::optional<Value> input) {
    if (!input) return NativeSend{body_, "value", {}};
    return NativeReturn{*input};
}

bool HandlerRoutine::handles(const Execution& exec, const Value& exception) const {
    const auto* cls = std::get_if<ClassRef>(&exception_class_);
    return cls && exec.class_of(exception)->inherits_from(cls->cls);
}

// -- Execution ----------------------------------------------------------------

std::shared_ptr<Execution> Execution::create(std::shared_ptr<const CompiledProgram> program,
                                             ExecutionOptions options, std::shared_ptr<Heap> heap) {
    return std::make_shared<Execution>(std::move(program), options, std::move(heap));
}

Execution::Execution(std::shared_ptr<const CompiledProgram> program, ExecutionOptions options,
                     std::shared_ptr<Heap> heap)
    : program_(std::move(program)), options_(options), heap_(heap ? std::move(heap) : std::make_shared<Heap>()) {
    transcript_ = heap_->allocate(&builtin("TranscriptStream"));
    auto main = new_context(program_->main.get(), Nil{});
    push_frame(std::move(main));
}

std::shared_ptr<Context> Execution::new_context(const CompiledMethod* method, Value receiver) {
    auto ctx = std::make_shared<Context>();
    ctx->id = next_frame_id_++;
    ctx->method = method;
    ctx->receiver = std::move(receiver);
    ctx->slots.assign(method->num_slots(), Nil{});
    return ctx;
}

void Execution::push_frame(std::shared_ptr<Context> ctx) {
    ctx->sender = top_;
    top_ = std::move(ctx);
    ++depth_;
    ++frames_pushed_;
}

void Execution::push_native(std::shared_ptr<NativeRoutine> routine, Value receiver) {
    auto ctx = new_context(&routine->method(), std::move(receiver));
    ctx->native = std::move(routine);
    push_frame(std::move(ctx));
}

std::vector<std::shared_ptr<Context>> Execution::stack() const {
    std::vector<std::shared_ptr<Context>> out;
    for (auto c = top_; c; c = c->sender) out.push_back(c);
    return out;
}

std::size_t Execution::depth() const { return depth_; }

bool Execution::on_stack(const Context* frame) const {
    for (const Context* c = top_.get(); c; c = c->sender.get())
        if (c == frame) return true;
    return false;
}

void Execution::unwind_to(const std::shared_ptr<Context>& stop) {
    while (top_ && top_ != stop) {
        top_->dead = true;
        top_ = top_->sender;
        --depth_;
        ++frames_popped_;
    }
}

void Execution::write_output(std::string_view text) {
    output_ += text;
    if (on_output) on_output(text);
}

const ClassInfo& Execution::builtin(std::string_view name) const {
    const ClassInfo* cls = prelude()->find_class(name);
    if (!cls) throw Error(ErrorCode::VmFault, "missing builtin class " + std::string(name));
    return *cls;
}

const ClassInfo* Execution::class_of(const Value& v) const {
    struct Visitor {
        const Execution& e;
        const ClassInfo* operator()(const Nil&) const { return &e.builtin("UndefinedObject"); }
        const ClassInfo* operator()(bool b) const { return &e.builtin(b ? "True" : "False"); }
        const ClassInfo* operator()(std::int64_t) const { return &e.builtin("Integer"); }
        const ClassInfo* operator()(const std::string&) const { return &e.builtin("String"); }
        const ClassInfo* operator()(const Symbol&) const { return &e.builtin("Symbol"); }
        const ClassInfo* operator()(const ObjectRef& r) const { return e.heap().get(r).cls; }
        const ClassInfo* operator()(const ClassRef&) const { return &e.builtin("Class"); }
        const ClassInfo* operator()(const MethodRef&) const { return &e.builtin("CompiledMethod"); }
        const ClassInfo* operator()(const NodeRef&) const { return &e.builtin("AstNode"); }
    };
    return std::visit(Visitor{*this}, v);
}

Value Execution::make_exception(std::string_view class_name, std::string text) {
    const ClassInfo* cls = program_->find_class(class_name);
    if (!cls) cls = &builtin("Error");
    ObjectRef ref = heap_->allocate(cls);
    int f = cls->field_index("messageText");
    if (f >= 0) heap_->get(ref).fields[static_cast<std::size_t>(f)] = std::move(text);
    return ref;
}

Value Execution::new_collection(std::string_view class_name, std::vector<Value> elements) {
    ObjectRef ref = heap_->allocate(&builtin(class_name));
    heap_->get(ref).elements = std::move(elements);
    return ref;
}

void Execution::define_global(std::string name, Value value) { globals_[std::move(name)] = std::move(value); }

std::optional<Value> Execution::global(std::string_view name) const {
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    if (name == "Transcript") return transcript_;
    if (name == "DefaultSeed") return options_.seed;
    if (const ClassInfo* cls = program_->find_class(name)) return ClassRef{cls};
    if (global_fallback) return global_fallback(name);
    return std::nullopt;
}

std::string Execution::failure_reason() const {
    if (!failure_) return {};
    const auto* ref = std::get_if<ObjectRef>(&*failure_);
    if (!ref) return print_string(*failure_);
    const HeapObject& exc = heap_->get(*ref);
    std::string out = exc.cls->name;
    if (exc.cls->inherits_from(&builtin("MessageNotUnderstood"))) {
        const Value& receiver = exc.fields[static_cast<std::size_t>(exc.cls->field_index("receiver"))];
        const Value& message = exc.fields[static_cast<std::size_t>(exc.cls->field_index("message"))];
        std::string selector = "?";
        if (const auto* m = std::get_if<ObjectRef>(&message)) {
            const HeapObject& msg = heap_->get(*m);
            if (const auto* s = std::get_if<Symbol>(&msg.fields[0])) selector = s->name;
        }
        return out + ": " + print_string(receiver) + " does not understand #" + selector;
    }
    int f = exc.cls->field_index("messageText");
    if (f >= 0)
        if (const auto* s = std::get_if<std::string>(&exc.fields[static_cast<std::size_t>(f)])) out += ": " + *s;
    return out;
}

// -- stepping -----------------------------------------------------------------

Value& Execution::temp_ref(Context& ctx, std::uint32_t slot, std::uint32_t depth) {
    Context* c = &ctx;
    for (std::uint32_t i = 0; i < depth && c; ++i) c = c->outer.get();
    if (!c || slot >= c->slots.size()) throw Error(ErrorCode::VmFault, "bad temp reference");
    return c->slots[slot];
}

StepOutcome Execution::step() {
    if (is_finished()) throw Error(ErrorCode::ExecutionAlreadyFinished, "execution already finished");
    if (steps_ >= options_.step_budget)
        throw Error(ErrorCode::StepBudgetExceeded, "step budget of " + std::to_string(options_.step_budget) + " exhausted");
    std::size_t before = depth_;
    auto ctx = top_;
    if (!ctx->native && ctx->pc < ctx->method->code.size()) {
        if (ctx->stack.size() != ctx->method->depth_before[ctx->pc])
            throw Error(ErrorCode::VmFault, "value stack depth " + std::to_string(ctx->stack.size()) + " at pc " +
                                                std::to_string(ctx->pc) + " of " + ctx->method->print_name() +
                                                ", expected " + std::to_string(ctx->method->depth_before[ctx->pc]));
        ++steps_;
        execute(ctx, ctx->method->code[ctx->pc]);
    }
    settle();
    if (status_ == ExecStatus::Finished) return StepOutcome::Finished;
    if (status_ == ExecStatus::Failed) return StepOutcome::Failed;
    if (depth_ > before) return StepOutcome::FramePushed;
    if (depth_ < before) return StepOutcome::FrameReturned;
    return StepOutcome::Advanced;
}

void Execution::settle_pending() {
    if (!is_finished()) settle();
}

void Execution::execute(const std::shared_ptr<Context>& ctx_ptr, const Instruction& ins) {
    Context& ctx = *ctx_ptr;
    const CompiledMethod& m = *ctx.method;
    std::size_t pc = ctx.pc;
    auto pop = [&]() {
        if (ctx.stack.empty()) throw Error(ErrorCode::VmFault, "value stack underflow in " + m.print_name());
        Value v = std::move(ctx.stack.back());
        ctx.stack.pop_back();
        return v;
    };
    auto top = [&]() -> Value& {
        if (ctx.stack.empty()) throw Error(ErrorCode::VmFault, "value stack underflow in " + m.print_name());
        return ctx.stack.back();
    };
    auto fields = [&]() -> std::vector<Value>& {
        const auto* self = std::get_if<ObjectRef>(&ctx.receiver);
        if (!self) throw Error(ErrorCode::VmFault, "field access on a non-object receiver");
        return heap_->get(*self).fields;
    };

    switch (ins.op) {
    case Opcode::PushSelf:
        ctx.stack.push_back(ctx.receiver);
        ++ctx.pc;
        break;
    case Opcode::PushLiteral:
        ctx.stack.push_back(from_literal(m.literals.at(ins.a)));
        ++ctx.pc;
        break;
    case Opcode::PushTemp:
        ctx.stack.push_back(temp_ref(ctx, ins.a, ins.b));
        ++ctx.pc;
        break;
    case Opcode::StoreTemp:
        temp_ref(ctx, ins.a, ins.b) = top();
        ++ctx.pc;
        break;
    case Opcode::PushField:
        ctx.stack.push_back(fields().at(ins.a));
        ++ctx.pc;
        break;
    case Opcode::StoreField:
        fields().at(ins.a) = top();
        ++ctx.pc;
        break;
    case Opcode::PushGlobal: {
        const std::string& name = m.selector_at(ins.a);
        ++ctx.pc;
        if (auto v = global(name)) {
            ctx.stack.push_back(std::move(*v));
        } else {
            signal(make_exception("Error", "undefined variable " + name), Operands{ctx_ptr, pc, {}});
        }
        break;
    }
    case Opcode::Send:
    case Opcode::SendSuper: {
        if (ctx.stack.size() < ins.b + 1u) throw Error(ErrorCode::VmFault, "value stack underflow at send in " + m.print_name());
        std::vector<Value> operands(ctx.stack.end() - (ins.b + 1), ctx.stack.end());
        ctx.stack.resize(ctx.stack.size() - (ins.b + 1));
        Value receiver = operands.front();
        std::vector<Value> args(operands.begin() + 1, operands.end());
        ++ctx.pc;
        const ClassInfo* start = nullptr;
        if (ins.op == Opcode::SendSuper && m.owner) start = m.owner->superclass;
        PrimResult r = send(receiver, m.selector_at(ins.a), std::move(args), start);
        handle(std::move(r), ctx_ptr, Operands{ctx_ptr, pc, std::move(operands)});
        break;
    }
    case Opcode::MakeBlock: {
        ObjectRef ref = heap_->allocate(&builtin("Block"));
        auto closure = std::make_shared<BlockClosure>();
        closure->method = m.blocks.at(ins.a).get();
        closure->receiver = ctx.receiver;
        closure->outer = ctx_ptr;
        heap_->get(ref).closure = std::move(closure);
        ctx.stack.push_back(ref);
        ++ctx.pc;
        break;
    }
    case Opcode::ReturnTop: {
        Value v = pop();
        ++ctx.pc;
        if (ins.a == 0) {
            return_from(ctx_ptr, std::move(v));
        } else {
            non_local_return(ctx_ptr, std::move(v));
        }
        break;
    }
    case Opcode::Pop:
        pop();
        ++ctx.pc;
        break;
    }
}

void Execution::handle(PrimResult result, const std::shared_ptr<Context>& requester, std::optional<Operands> restore) {
    if (auto* a = std::get_if<Answer>(&result)) {
        deliver(requester, std::move(a->value));
    } else if (auto* r = std::get_if<Raise>(&result)) {
        signal(std::move(r->exception), std::move(restore));
    }
}

void Execution::deliver(const std::shared_ptr<Context>& to, Value value) {
    if (!to) {
        if (nesting_ > 0) {
            nested_result_ = std::move(value);
        } else {
            status_ = ExecStatus::Finished;
            result_ = std::move(value);
        }
        return;
    }
    if (to->native) {
        to->native_input = std::move(value);
    } else {
        to->stack.push_back(std::move(value));
    }
}

void Execution::return_from(const std::shared_ptr<Context>& frame, Value value) {
    if (frame->method->kind == MethodKind::Main && !frame->sender && nesting_ == 0) {
        final_main_slots_.clear();
        for (std::size_t i = 0; i < frame->slots.size(); ++i)
            final_main_slots_.emplace_back(frame->method->slot_names.at(i), frame->slots[i]);
    }
    auto sender = frame->sender;
    unwind_to(sender);
    deliver(sender, std::move(value));
}

void Execution::non_local_return(const std::shared_ptr<Context>& frame, Value value) {
    auto home = frame->home_ptr(frame);
    if (home->dead || !on_stack(home.get())) {
        Value exc = make_exception("BlockCannotReturn", "home context of " + frame->method->print_name() + " has returned");
        signal(std::move(exc), Operands{frame, frame->pc - 1, {std::move(value)}});
        return;
    }
    auto sender = home->sender;
    unwind_to(sender);
    deliver(sender, std::move(value));
}

void Execution::signal(Value exception, std::optional<Operands> restore) {
    std::shared_ptr<Context> marker;
    for (auto c = top_; c; c = c->sender) {
        auto* h = dynamic_cast<HandlerRoutine*>(c->native.get());
        if (h && h->handles(*this, exception)) {
            marker = c;
            break;
        }
    }
    if (!marker) {
        status_ = ExecStatus::Failed;
        failure_ = std::move(exception);
        if (restore) {
            restore->ctx->pc = restore->pc;
            for (auto& v : restore->values) restore->ctx->stack.push_back(std::move(v));
        }
        return;
    }
    Value handler = static_cast<HandlerRoutine*>(marker->native.get())->handler();
    auto resume = marker->sender;
    unwind_to(resume);
    PrimResult r = send(handler, "cull:", {exception});
    handle(std::move(r), resume, std::nullopt);
}

void Execution::settle() {
    while (status_ == ExecStatus::Running && top_) {
        auto ctx = top_;
        if (ctx->native) {
            auto input = std::exchange(ctx->native_input, std::nullopt);
            NativeStep s = ctx->native->resume(*this, *ctx, std::move(input));
            if (auto* r = std::get_if<NativeReturn>(&s)) {
                return_from(ctx, std::move(r->value));
            } else if (auto* snd = std::get_if<NativeSend>(&s)) {
                PrimResult res = send(snd->receiver, snd->selector, std::move(snd->args));
                handle(std::move(res), ctx, std::nullopt);
            } else {
                signal(std::move(std::get<NativeSignal>(s).exception), std::nullopt);
            }
        } else if (ctx->pc >= ctx->method->code.size()) {
            Value v;
            if (ctx->method->answers_last_value()) {
                if (!ctx->stack.empty()) v = ctx->stack.back();
            } else {
                v = ctx->receiver;
            }
            return_from(ctx, std::move(v));
        } else {
            break;
        }
    }
}

void Execution::skip(Value replacement) {
    if (is_finished()) throw Error(ErrorCode::ExecutionAlreadyFinished, "execution already finished");
    auto ctx = top_;
    if (ctx->native || ctx->pc >= ctx->method->code.size())
        throw Error(ErrorCode::NotSkippable, "no pending instruction");
    const Instruction& ins = ctx->method->code[ctx->pc];
    switch (ins.op) {
    case Opcode::Send:
    case Opcode::SendSuper:
        if (ctx->stack.size() < ins.b + 1u) throw Error(ErrorCode::VmFault, "value stack underflow at skipped send");
        ctx->stack.resize(ctx->stack.size() - (ins.b + 1));
        break;
    case Opcode::StoreTemp:
    case Opcode::StoreField:
        if (ctx->stack.empty()) throw Error(ErrorCode::VmFault, "value stack underflow at skipped store");
        ctx->stack.pop_back();
        break;
    case Opcode::PushSelf:
    case Opcode::PushLiteral:
    case Opcode::PushTemp:
    case Opcode::PushField:
    case Opcode::PushGlobal:
        break;
    case Opcode::MakeBlock:
    case Opcode::ReturnTop:
    case Opcode::Pop:
        throw Error(ErrorCode::NotSkippable, std::string("cannot skip ") + std::string(to_string(ins.op)));
    }
    ctx->stack.push_back(std::move(replacement));
    ++ctx->pc;
    settle();
}

FinalState Execution::run_to_completion() {
    while (!is_finished()) step();
    return final_state();
}

FinalState Execution::final_state() const {
    FinalState f;
    f.status = status_;
    f.result = result_;
    f.output = output_;
    f.failure = failure_reason();
    f.steps = steps_;
    CanonicalSerializer ser(*heap_);
    std::string digest = "result=" + ser(result_);
    for (const auto& [name, v] : final_main_slots_) digest += ";" + name + "=" + ser(v);
    f.heap_digest = std::move(digest);
    return f;
}

// -- sends --------------------------------------------------------------------

PrimResult Execution::send(const Value& receiver, const std::string& selector, std::vector<Value> args,
                           const ClassInfo* lookup_start) {
    if (!lookup_start) {
        if (const auto* cls = std::get_if<ClassRef>(&receiver)) {
            for (const ClassInfo* c = cls->cls; c; c = c->superclass)
                if (const Primitive* p = find_primitive(c, selector, true)) return (*p)(*this, receiver, args);
        }
    }
    const ClassInfo* start = lookup_start ? lookup_start : class_of(receiver);
    for (const ClassInfo* c = start; c; c = c->superclass) {
        if (auto it = c->methods.find(selector); it != c->methods.end()) {
            const CompiledMethod* m = it->second;
            if (m->num_args != args.size())
                return Raise{make_exception("Error", "wrong argument count for " + m->print_name())};
            auto ctx = new_context(m, receiver);
            std::move(args.begin(), args.end(), ctx->slots.begin());
            push_frame(std::move(ctx));
            return Pushed{};
        }
        if (const Primitive* p = find_primitive(c, selector)) return (*p)(*this, receiver, args);
    }
    if (selector == "doesNotUnderstand:") throw Error(ErrorCode::VmFault, "doesNotUnderstand: is not understood");
    ObjectRef msg = heap_->allocate(&builtin("Message"));
    heap_->get(msg).fields[0] = Symbol{selector};
    heap_->get(msg).fields[1] = new_collection("Array", std::move(args));
    return send(receiver, "doesNotUnderstand:", {msg});
}

PrimResult Execution::invoke_block(ObjectRef block, std::vector<Value> args) {
    const HeapObject& obj = heap_->get(block);
    if (!obj.closure) return Raise{make_exception("Error", "not a block")};
    const BlockClosure& c = *obj.closure;
    if (c.method->num_args != args.size())
        return Raise{make_exception("Error", "block takes " + std::to_string(c.method->num_args) + " arguments, got " +
                                                 std::to_string(args.size()))};
    auto ctx = new_context(c.method, c.receiver);
    ctx->outer = c.outer;
    ctx->closure = block;
    std::move(args.begin(), args.end(), ctx->slots.begin());
    push_frame(std::move(ctx));
    return Pushed{};
}

Value Execution::evaluate(const Value& callable, std::vector<Value> args) {
    auto saved_top = top_;
    auto saved_status = status_;
    auto saved_depth = depth_;
    auto saved_result = nested_result_;
    struct Restore {
        Execution& e;
        std::shared_ptr<Context> top;
        ExecStatus status;
        std::size_t depth;
        std::optional<Value> nested;
        ~Restore() {
            e.top_ = top;
            e.status_ = status;
            e.depth_ = depth;
            e.nested_result_ = nested;
            --e.nesting_;
        }
    } restore{*this, saved_top, saved_status, saved_depth, saved_result};

    ++nesting_;
    top_ = nullptr;
    status_ = ExecStatus::Running;
    nested_result_.reset();
    std::string selector = args.empty() ? "value" : args.size() == 1 ? "cull:" : "valueWithArguments:";
    if (args.size() > 1) args = {new_collection("Array", std::move(args))};
    PrimResult r = send(callable, selector, std::move(args));
    handle(std::move(r), nullptr, std::nullopt);
    settle();
    while (status_ == ExecStatus::Running && top_) step();
    if (status_ == ExecStatus::Failed) {
        std::string reason = failure_reason();
        failure_.reset();
        throw Error(ErrorCode::ScriptFailed, reason);
    }
    return nested_result_.value_or(Value{});
}

// -- printing -----------------------------------------------------------------

namespace {

std::string with_article(const std::string& name) {
    if (!name.empty() && std::string_view("AEIOU").find(name[0]) != std::string_view::npos) return "an " + name;
    return "a " + name;
}

} // namespace

std::string Execution::render(const Value& v, bool display, int depth) const {
    if (const auto* s = std::get_if<std::string>(&v)) return display ? *s : literal_print_string(*s);
    if (const auto* s = std::get_if<Symbol>(&v)) return display ? s->name : literal_print_string(*s);
    if (std::holds_alternative<Nil>(v)) return "nil";
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* c = std::get_if<ClassRef>(&v)) return c->cls->name;
    if (const auto* m = std::get_if<MethodRef>(&v)) return m->method->print_name();
    if (const auto* n = std::get_if<NodeRef>(&v))
        return "a " + std::string(to_string(n->node->kind)) + " node(" + std::to_string(n->node->id) + ")";
    const HeapObject& obj = heap_->get(std::get<ObjectRef>(v));
    if (obj.closure) return "a Block";
    if (obj.foreign) return obj.foreign->print_string();
    const std::string& name = obj.cls->name;
    if (obj.cls->storage == StorageKind::Indexed) {
        if (depth > 3) return name == "Array" ? "#(...)" : with_article(name) + "(...)";
        std::string out = name == "Array" ? "#(" : with_article(name) + "(";
        for (std::size_t i = 0; i < obj.elements.size(); ++i) {
            if (i) out += " ";
            out += render(obj.elements[i], false, depth + 1);
        }
        return out + ")";
    }
    if (obj.cls->storage == StorageKind::Dictionary) {
        if (depth > 3) return with_article(name) + "(...)";
        std::string out = with_article(name) + "(";
        for (std::size_t i = 0; i < obj.entries.size(); ++i) {
            if (i) out += " ";
            out += render(obj.entries[i].first, false, depth + 1) + "->" + render(obj.entries[i].second, false, depth + 1);
        }
        return out + ")";
    }
    return with_article(name);
}

std::string Execution::print_string(const Value& v) const { return render(v, false, 0); }
std::string Execution::display_string(const Value& v) const { return render(v, true, 0); }

FinalState run_source(const std::string& source, ExecutionOptions options) {
    auto exec = Execution::create(compile_source(source), options);
    exec->settle_pending();
    return exec->run_to_completion();
}

} // namespace sindarin::lumen
