#include "sindarin/service/protocol.hpp"

#include "sindarin/lumen/serializer.hpp"
#include "sindarin/script.hpp"

#include <algorithm>

namespace sindarin::service {

using namespace lumen;

// -- errors -----------------------------------------------------------------------

std::string wire_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::ExecutionAlreadyFinished: return "sessionFinished";
    case ErrorCode::ScriptFailed: return "scriptError";
    default: break;
    }
    std::string name(to_string(code));
    name[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])));
    return name;
}

std::optional<ErrorCode> host_code(const std::string& wire) {
    for (ErrorCode c : kAllErrorCodes)
        if (wire_code(c) == wire) return c;
    return std::nullopt;
}

// -- previews ---------------------------------------------------------------------

std::string truncate_preview(std::string text) {
    if (text.size() <= kPreviewLimit) return text;
    std::size_t cut = kPreviewLimit;
    // do not split a UTF-8 sequence
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    text.resize(cut);
    return text + "\xE2\x80\xA6";
}

std::string preview(const Heap& heap, const Value& v) { return truncate_preview(canonical(heap, v, 1)); }

namespace {

const Program* owner_of(const CompiledProgram& program, const Node& node) {
    for (const CompiledProgram* p = &program; p; p = p->base.get())
        if (p->ast->owns(node)) return p->ast.get();
    return nullptr;
}

ValueInfo value_info(const Execution& e, const Value& v) {
    ValueInfo info;
    info.preview = preview(e.heap(), v);
    const ClassInfo* c = e.class_of(v);
    info.cls = c ? c->name : "?";
    if (const auto* ref = std::get_if<ObjectRef>(&v)) info.ref = "obj:" + std::to_string(ref->handle);
    return info;
}

NodeInfo node_info(const CompiledProgram& program, const Node& node) {
    NodeInfo info;
    info.id = node.id;
    info.kind = std::string(to_string(node.kind));
    info.start = node.span.start;
    info.end = node.span.end;
    if (const Program* p = owner_of(program, node)) info.source_excerpt = truncate_preview(std::string(p->excerpt(node.span)));
    return info;
}

bool pending_send(const Context& top) {
    if (top.native || top.pc >= top.method->code.size()) return false;
    Opcode op = top.method->code[top.pc].op;
    return op == Opcode::Send || op == Opcode::SendSuper;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
    if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
    else v.reset();
}

} // namespace

// -- JSON mapping -----------------------------------------------------------------

void to_json(json& j, const NodeInfo& v) {
    j = json{{"id", v.id}, {"kind", v.kind}, {"span", {{"start", v.start}, {"end", v.end}}}, {"sourceExcerpt", v.source_excerpt}};
}
void from_json(const json& j, NodeInfo& v) {
    j.at("id").get_to(v.id);
    j.at("kind").get_to(v.kind);
    j.at("span").at("start").get_to(v.start);
    j.at("span").at("end").get_to(v.end);
    j.at("sourceExcerpt").get_to(v.source_excerpt);
}

void to_json(json& j, const ValueInfo& v) {
    j = json{{"preview", v.preview}, {"class", v.cls}};
    put_optional(j, "ref", v.ref);
}
void from_json(const json& j, ValueInfo& v) {
    j.at("preview").get_to(v.preview);
    j.at("class").get_to(v.cls);
    get_optional(j, "ref", v.ref);
}

void to_json(json& j, const FrameInfo& v) {
    json temps = json::array();
    for (const auto& [name, value] : v.temps) temps.push_back({{"name", name}, {"preview", value}});
    j = json{{"frameId", v.frame_id}, {"className", v.class_name}, {"selector", v.selector}, {"method", v.method},
             {"pc", v.pc}, {"receiver", v.receiver}, {"args", v.args}, {"temps", temps}, {"native", v.is_native}};
    put_optional(j, "nodeId", v.node_id);
}
void from_json(const json& j, FrameInfo& v) {
    j.at("frameId").get_to(v.frame_id);
    j.at("className").get_to(v.class_name);
    j.at("selector").get_to(v.selector);
    j.at("method").get_to(v.method);
    j.at("pc").get_to(v.pc);
    j.at("receiver").get_to(v.receiver);
    j.at("args").get_to(v.args);
    v.temps.clear();
    for (const auto& t : j.at("temps")) v.temps.emplace_back(t.at("name").get<std::string>(), t.at("preview").get<std::string>());
    j.at("native").get_to(v.is_native);
    get_optional(j, "nodeId", v.node_id);
}

void to_json(json& j, const BreakpointInfo& v) {
    j = json{{"id", v.id}, {"once", v.once}, {"enabled", v.enabled}, {"hits", v.hits}};
    put_optional(j, "nodeId", v.node_id);
    put_optional(j, "method", v.method);
}
void from_json(const json& j, BreakpointInfo& v) {
    j.at("id").get_to(v.id);
    j.at("once").get_to(v.once);
    j.at("enabled").get_to(v.enabled);
    j.at("hits").get_to(v.hits);
    get_optional(j, "nodeId", v.node_id);
    get_optional(j, "method", v.method);
}

void to_json(json& j, const WatchInfo& v) {
    j = json{{"id", v.id}, {"kind", v.kind}, {"target", v.target}, {"hits", v.hits}};
    put_optional(j, "selector", v.selector);
    put_optional(j, "field", v.field);
}
void from_json(const json& j, WatchInfo& v) {
    j.at("id").get_to(v.id);
    j.at("kind").get_to(v.kind);
    j.at("target").get_to(v.target);
    j.at("hits").get_to(v.hits);
    get_optional(j, "selector", v.selector);
    get_optional(j, "field", v.field);
}

void to_json(json& j, const PendingMessage& v) {
    j = json{{"selector", v.selector}, {"receiver", v.receiver}, {"arguments", v.arguments}};
}
void from_json(const json& j, PendingMessage& v) {
    j.at("selector").get_to(v.selector);
    j.at("receiver").get_to(v.receiver);
    j.at("arguments").get_to(v.arguments);
}

void to_json(json& j, const SessionSnapshot& v) {
    j = json{{"finished", v.finished}, {"status", v.status},   {"stack", v.stack},
             {"output", v.output},     {"steps", v.steps},     {"breakpoints", v.breakpoints},
             {"watches", v.watches}};
    put_optional(j, "failureReason", v.failure_reason);
    put_optional(j, "currentNode", v.current_node);
    put_optional(j, "message", v.message);
}
void from_json(const json& j, SessionSnapshot& v) {
    j.at("finished").get_to(v.finished);
    j.at("status").get_to(v.status);
    j.at("stack").get_to(v.stack);
    j.at("output").get_to(v.output);
    j.at("steps").get_to(v.steps);
    j.at("breakpoints").get_to(v.breakpoints);
    j.at("watches").get_to(v.watches);
    get_optional(j, "failureReason", v.failure_reason);
    get_optional(j, "currentNode", v.current_node);
    get_optional(j, "message", v.message);
}

// -- snapshots ----------------------------------------------------------------------

SessionSnapshot snapshot(const DebugSession& s) {
    const Execution& e = s.execution();
    SessionSnapshot snap;
    snap.finished = s.is_execution_finished();
    snap.status = std::string(to_string(e.status()));
    if (e.status() == ExecStatus::Failed) snap.failure_reason = e.failure_reason();
    snap.output = e.output();
    snap.steps = e.steps();

    if (auto top = e.top()) {
        if (const Node* n = top->current_node()) snap.current_node = node_info(s.program(), *n);
        if (pending_send(*top)) {
            const Instruction& ins = top->method->code[top->pc];
            PendingMessage m;
            m.selector = top->method->selector_at(ins.a);
            const auto& st = top->stack;
            m.receiver = value_info(e, st.at(st.size() - ins.b - 1));
            for (std::size_t i = st.size() - ins.b; i < st.size(); ++i) m.arguments.push_back(value_info(e, st[i]));
            snap.message = m;
        }
    }
    for (const FrameView& f : s.stack()) {
        FrameInfo fi;
        fi.frame_id = f.frame_id();
        fi.class_name = f.method().class_name();
        fi.selector = f.selector();
        fi.method = f.method().print_name();
        fi.is_native = f.ctx->native != nullptr;
        fi.pc = fi.is_native ? -1 : static_cast<std::int64_t>(f.pc());
        if (const Node* n = f.node()) fi.node_id = n->id;
        fi.receiver = value_info(e, f.receiver());
        for (const Value& a : f.arguments()) fi.args.push_back(preview(e.heap(), a));
        for (const auto& [name, value] : f.named_temporaries()) fi.temps.emplace_back(name, preview(e.heap(), value));
        snap.stack.push_back(std::move(fi));
    }
    for (const Breakpoint* bp : s.breakpoints()) {
        BreakpointInfo bi;
        bi.id = bp->id;
        if (bp->node) bi.node_id = bp->node->id;
        if (bp->method) bi.method = bp->method->print_name();
        bi.once = bp->once;
        bi.enabled = bp->enabled;
        bi.hits = bp->hits;
        snap.breakpoints.push_back(bi);
    }
    for (const Watch* w : s.watches()) {
        WatchInfo wi;
        wi.id = w->id;
        wi.kind = w->kind == WatchKind::OnCall ? "call" : "write";
        wi.target = value_info(e, w->target).ref.value_or("");
        wi.selector = w->selector;
        wi.field = w->field;
        wi.hits = w->hits;
        snap.watches.push_back(wi);
    }
    return snap;
}

json node_json(const Program& program, const Node& node) {
    NodeInfo info;
    info.id = node.id;
    info.kind = std::string(to_string(node.kind));
    info.start = node.span.start;
    info.end = node.span.end;
    info.source_excerpt = truncate_preview(std::string(program.excerpt(node.span)));
    return info;
}

json hit_json(const DebugSession& s, const HitDescriptor& hit) {
    json j{{"kind", std::string(to_string(hit.kind))}, {"frameId", hit.frame_id}, {"removed", hit.removed}};
    put_optional(j, "breakpoint", hit.breakpoint);
    put_optional(j, "watch", hit.watch);
    if (hit.node) {
        j["nodeId"] = hit.node->id;
        j["node"] = node_info(s.program(), *hit.node);
    } else {
        j["nodeId"] = nullptr;
        j["node"] = nullptr;
    }
    return j;
}

json halt_json(const script::Halt& h) {
    json j{{"finished", h.finished}, {"output", h.output}};
    if (!h.finished) {
        j["method"] = h.method;
        j["nodeId"] = h.node;
        j["nodeKind"] = h.node_kind;
        j["excerpt"] = h.excerpt;
        j["frameId"] = h.frame_id;
        j["selector"] = h.selector.empty() ? json(nullptr) : json(h.selector);
    }
    return j;
}

json report_json(const script::ScenarioReport& r) {
    json halts = json::array(), host = json::array(), checks = json::array();
    for (const auto& h : r.script_halts) halts.push_back(halt_json(h));
    for (const auto& h : r.host_halts) host.push_back(halt_json(h));
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return json{{"name", r.name},     {"passed", r.passed},   {"halts", halts},   {"hostHalts", host},
                {"final", halt_json(r.final_position)}, {"captured", r.captured}, {"checks", checks}};
}

const std::vector<std::string>& op_names() {
    static const std::vector<std::string> ops = {
        "createSession", "step",          "stepOver",      "continue",     "skip",   "stepUntilScript",
        "evalScript",    "snapshot",      "setBreakpoint", "configureBreakpoint",    "haltOnCall",
        "haltOnWrite",   "removeWatch",   "inspect",       "nodeAt",       "listSessions",
        "disposeSession", "runScenario",  "listScenarios",
    };
    return ops;
}

json hello_message() {
    return json{{"hello", "sindarin"}, {"v", kProtocolVersion}, {"ops", op_names()}};
}

// -- service --------------------------------------------------------------------------

struct Service::Entry {
    std::string id;
    std::uint64_t owner = 0;
    std::shared_ptr<DebugSession> session;
    std::mutex mutex;
    const Emit* emit = nullptr;  // set while a request runs
    // script executions stay alive so blocks they installed keep working
    std::vector<std::shared_ptr<Execution>> scripts;

    void send(const char* event, json payload) {
        if (emit && *emit) (*emit)(json{{"event", event}, {"session", id}, {"payload", std::move(payload)}});
    }

    // runs a script with dbg bound; its Transcript output becomes output events
    std::shared_ptr<Execution> run_script(const std::string& source, const std::map<std::string, Value>& globals = {}) {
        auto script = script::prepare_script(session, source);
        for (const auto& [name, v] : globals) script->define_global(name, v);
        script->on_output = [this](std::string_view text) {
            send("output", json{{"text", std::string(text)}, {"source", "script"}});
        };
        scripts.push_back(script);
        script->run_to_completion();
        if (script->status() == ExecStatus::Failed) {
            std::string trace;
            for (const auto& ctx : script->stack()) {
                trace += ctx->method->print_name();
                if (const Node* n = ctx->current_node()) trace += " at node " + std::to_string(n->id);
                trace += "\n";
            }
            throw Error(ErrorCode::ScriptFailed, "script failed: " + script->failure_reason(), std::nullopt, trace);
        }
        return script;
    }
};

Service::Service(ExecutionOptions defaults) : defaults_(defaults) {}
Service::~Service() = default;

std::uint64_t Service::connect() {
    std::lock_guard lock(mutex_);
    return next_connection_++;
}

void Service::disconnect(std::uint64_t connection) {
    std::vector<std::shared_ptr<Entry>> dropped;
    {
        std::lock_guard lock(mutex_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            if (it->second->owner == connection) {
                dropped.push_back(it->second);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
        seen_ids_.erase(connection);
    }
    // wait for in-flight requests before the sessions go
    for (auto& e : dropped) std::lock_guard wait(e->mutex);
}

std::vector<std::string> Service::session_ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
}

std::shared_ptr<Service::Entry> Service::entry(const std::string& id, std::uint64_t connection) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end() || it->second->owner != connection)
        throw Error(ErrorCode::UnknownSession, "no session '" + id + "' on this connection");
    return it->second;
}

namespace {

// Request arguments live under "args" or at the top level.
const json* arg(const json& request, const char* key) {
    if (request.contains("args") && request["args"].is_object() && request["args"].contains(key)) return &request["args"][key];
    if (request.contains(key)) return &request[key];
    return nullptr;
}

std::string string_arg(const json& request, const char* key) {
    const json* v = arg(request, key);
    if (!v || !v->is_string()) throw Error(ErrorCode::BadArgs, std::string("'") + key + "' must be a string");
    return v->get<std::string>();
}

std::optional<std::string> optional_string(const json& request, const char* key) {
    const json* v = arg(request, key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_string()) throw Error(ErrorCode::BadArgs, std::string("'") + key + "' must be a string");
    return v->get<std::string>();
}

std::int64_t int_arg(const json& request, const char* key) {
    const json* v = arg(request, key);
    if (!v || !v->is_number_integer()) throw Error(ErrorCode::BadArgs, std::string("'") + key + "' must be an integer");
    return v->get<std::int64_t>();
}

std::optional<bool> optional_bool(const json& request, const char* key) {
    const json* v = arg(request, key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_boolean()) throw Error(ErrorCode::BadArgs, std::string("'") + key + "' must be a boolean");
    return v->get<bool>();
}

Value resolve_ref(const Execution& e, const std::string& ref) {
    if (ref.rfind("obj:", 0) != 0) throw Error(ErrorCode::BadArgs, "object references look like obj:<handle>");
    std::uint64_t handle = 0;
    try {
        handle = std::stoull(ref.substr(4));
    } catch (const std::exception&) {
        throw Error(ErrorCode::BadArgs, "bad object reference '" + ref + "'");
    }
    if (!e.heap().find(handle)) throw Error(ErrorCode::UnknownTarget, "no object " + ref + " in this session");
    return ObjectRef{handle};
}

// A JSON literal or an object reference.
Value value_arg(const Execution& e, const json& request) {
    if (auto ref = optional_string(request, "valueRef")) return resolve_ref(e, *ref);
    const json* v = arg(request, "value");
    if (!v || v->is_null()) return Nil{};
    if (v->is_boolean()) return v->get<bool>();
    if (v->is_number_integer()) return v->get<std::int64_t>();
    if (v->is_string()) return v->get<std::string>();
    throw Error(ErrorCode::BadArgs, "'value' must be null, a boolean, an integer or a string");
}

} // namespace

json Service::handle_line(std::uint64_t connection, const std::string& line, const Emit& emit) {
    json request;
    try {
        request = json::parse(line);
    } catch (const json::parse_error& err) {
        return json{{"id", nullptr}, {"error", {{"code", wire_code(ErrorCode::BadArgs)}, {"message", std::string("malformed JSON: ") + err.what()}}}};
    }
    return handle(connection, request, emit);
}

json Service::handle(std::uint64_t connection, const json& request, const Emit& emit) {
    json id = request.is_object() && request.contains("id") ? request["id"] : json(nullptr);
    try {
        if (!request.is_object()) throw Error(ErrorCode::BadArgs, "a request is a JSON object");
        if (!id.is_number_integer()) throw Error(ErrorCode::BadArgs, "'id' must be an integer");
        {
            std::lock_guard lock(mutex_);
            if (!seen_ids_[connection].insert(id.get<std::int64_t>()).second)
                throw Error(ErrorCode::BadArgs, "id " + id.dump() + " was already used on this connection");
        }
        if (!request.contains("op") || !request["op"].is_string()) throw Error(ErrorCode::BadArgs, "'op' must be a string");
        return json{{"id", id}, {"result", dispatch(connection, request["op"].get<std::string>(), request, emit)}};
    } catch (const Error& err) {
        json error{{"code", wire_code(err.code())}, {"message", err.what()}};
        if (!err.detail().empty()) error["data"] = {{"stack", err.detail()}};
        return json{{"id", id}, {"error", error}};
    } catch (const json::exception& err) {
        return json{{"id", id}, {"error", {{"code", wire_code(ErrorCode::BadArgs)}, {"message", err.what()}}}};
    }
}

json Service::dispatch(std::uint64_t connection, const std::string& op, const json& request, const Emit& emit) {
    if (op == "createSession") {
        ExecutionOptions opts = defaults_;
        if (arg(request, "seed")) opts.seed = int_arg(request, "seed");
        auto e = std::make_shared<Entry>();
        e->owner = connection;
        e->session = std::shared_ptr<DebugSession>(DebugSession::debug(string_arg(request, "source"), opts));
        {
            std::lock_guard lock(mutex_);
            e->id = "s" + std::to_string(next_session_++);
            sessions_[e->id] = e;
        }
        Entry* raw = e.get();
        e->session->on_hit = [raw](const HitDescriptor& hit) {
            bool done = hit.kind == HitKind::ExecutionFinished || hit.kind == HitKind::UnhandledException;
            raw->send(done ? "finished" : "hit", hit_json(*raw->session, hit));
        };
        e->session->execution().on_output = [raw](std::string_view text) {
            raw->send("output", json{{"text", std::string(text)}, {"source", "debuggee"}});
        };
        return json{{"session", e->id}, {"snapshot", snapshot(*e->session)}};
    }
    if (op == "listSessions") {
        std::lock_guard lock(mutex_);
        json list = json::array();
        for (const auto& [id, e] : sessions_)
            if (e->owner == connection) list.push_back(id);
        return json{{"sessions", list}};
    }
    if (op == "listScenarios") {
        json list = json::array();
        for (const auto& s : script::scenario_list()) list.push_back({{"name", s.name}, {"title", s.title}});
        return json{{"scenarios", list}};
    }
    if (op == "runScenario") {
        script::ScenarioOptions so;
        so.seed = defaults_.seed;
        if (arg(request, "seed")) so.seed = int_arg(request, "seed");
        return report_json(script::run_scenario(string_arg(request, "name"), so));
    }
    if (std::find(op_names().begin(), op_names().end(), op) == op_names().end())
        throw Error(ErrorCode::UnknownOp, "unknown op '" + op + "'");

    const json* sid = request.contains("session") ? &request["session"] : arg(request, "session");
    if (!sid || !sid->is_string()) throw Error(ErrorCode::BadArgs, "'session' must be a session id string");
    auto e = entry(sid->get<std::string>(), connection);
    std::lock_guard lock(e->mutex);
    struct EmitScope {
        Entry& e;
        EmitScope(Entry& entry, const Emit& emit) : e(entry) { e.emit = &emit; }
        ~EmitScope() { e.emit = nullptr; }
    } scope(*e, emit);
    DebugSession& s = *e->session;
    Execution& exec = s.execution();

    auto require_running = [&] {
        if (s.is_execution_finished()) throw Error(ErrorCode::ExecutionAlreadyFinished, "the execution has finished");
    };
    auto run_script = [&](const std::string& source) { return e->run_script(source); };
    auto stored_action = [&](std::uint64_t bp, const std::string& source) {
        std::weak_ptr<Entry> weak = e;
        return [weak, bp, source](DebugSession&) {
            if (auto entry = weak.lock()) entry->run_script(source, {{"breakpoint", script::breakpoint_value(entry->session, bp)}});
        };
    };
    auto with_snapshot = [&](json result) {
        result["snapshot"] = snapshot(s);
        return result;
    };

    if (op == "step") {
        require_running();
        return with_snapshot({{"outcome", std::string(to_string(s.step()))}});
    }
    if (op == "stepOver") {
        require_running();
        return with_snapshot({{"outcome", std::string(to_string(s.step_over()))}});
    }
    if (op == "continue") {
        require_running();
        HitDescriptor hit = s.resume();
        return with_snapshot({{"hit", hit_json(s, hit)}});
    }
    if (op == "skip") {
        require_running();
        if (arg(request, "valueRef") || arg(request, "value")) s.skip_with(value_arg(exec, request));
        else s.skip();
        return with_snapshot(json::object());
    }
    if (op == "stepUntilScript") {
        require_running();
        run_script("dbg stepUntil: [" + string_arg(request, "script") + "]");
        return with_snapshot(json::object());
    }
    if (op == "evalScript") {
        auto script = run_script(string_arg(request, "script"));
        json out = {{"value", value_info(exec, script->result())}, {"output", script->output()}};
        return with_snapshot(out);
    }
    if (op == "snapshot") return json{{"snapshot", snapshot(s)}};
    if (op == "setBreakpoint") {
        std::uint64_t id = 0;
        if (arg(request, "nodeId")) {
            const Node* n = s.find_node(static_cast<NodeId>(int_arg(request, "nodeId")));
            if (!n) throw Error(ErrorCode::UnknownTarget, "no node " + std::to_string(int_arg(request, "nodeId")));
            id = s.set_breakpoint_on(*n);
        } else if (const json* m = arg(request, "method"); m && m->is_object()) {
            std::string cls = m->at("class").get<std::string>(), sel = m->at("selector").get<std::string>();
            const ClassInfo* c = s.program().find_class(cls);
            if (!c) throw Error(ErrorCode::UnknownTarget, "no class " + cls);
            auto it = c->methods.find(sel);
            if (it == c->methods.end()) throw Error(ErrorCode::UnknownTarget, cls + " does not define " + sel);
            id = s.set_breakpoint_on(*it->second);
        } else {
            throw Error(ErrorCode::BadArgs, "setBreakpoint needs nodeId or method{class,selector}");
        }
        if (optional_bool(request, "once").value_or(false)) s.once(id);
        if (auto src = optional_string(request, "whenHit")) s.when_hit(id, stored_action(id, *src));
        return with_snapshot({{"breakpoint", id}});
    }
    if (op == "configureBreakpoint") {
        auto id = static_cast<std::uint64_t>(int_arg(request, "bpId"));
        s.breakpoint(id);
        if (auto src = optional_string(request, "whenHit")) s.when_hit(id, stored_action(id, *src));
        if (optional_bool(request, "once").value_or(false)) s.once(id);
        if (optional_bool(request, "remove").value_or(false)) s.remove_breakpoint(id);
        return with_snapshot({{"breakpoint", id}});
    }
    if (op == "haltOnCall") {
        Value target = resolve_ref(exec, string_arg(request, "objectRef"));
        return with_snapshot({{"watch", s.halt_on_call(target, optional_string(request, "selector"))}});
    }
    if (op == "haltOnWrite") {
        Value target = resolve_ref(exec, string_arg(request, "objectRef"));
        return with_snapshot({{"watch", s.halt_on_write(target, optional_string(request, "field"))}});
    }
    if (op == "removeWatch") {
        s.remove_watch(static_cast<std::uint64_t>(int_arg(request, "watchId")));
        return with_snapshot(json::object());
    }
    if (op == "inspect") {
        Value v = resolve_ref(exec, string_arg(request, "objectRef"));
        const HeapObject& obj = exec.heap().get(std::get<ObjectRef>(v));
        json fields = json::array(), elements = json::array(), entries = json::array();
        for (std::size_t i = 0; i < obj.fields.size(); ++i)
            fields.push_back({{"name", obj.cls->fields[i]}, {"value", value_info(exec, obj.fields[i])}});
        for (const Value& el : obj.elements) elements.push_back(value_info(exec, el));
        for (const auto& [k, val] : obj.entries) entries.push_back({{"key", value_info(exec, k)}, {"value", value_info(exec, val)}});
        return json{{"object", value_info(exec, v)}, {"fields", fields}, {"elements", elements}, {"entries", entries}};
    }
    if (op == "nodeAt") {
        std::int64_t offset = int_arg(request, "offset");
        if (offset < 0) throw Error(ErrorCode::OffsetOutOfRange, "negative offset");
        const Node& n = node_at(*s.program().ast, static_cast<std::uint32_t>(offset));
        return json{{"node", node_json(*s.program().ast, n)}};
    }
    if (op == "disposeSession") {
        {
            std::lock_guard guard(mutex_);
            sessions_.erase(e->id);
        }
        e->scripts.clear();
        return json{{"disposed", e->id}};
    }
    throw Error(ErrorCode::UnknownOp, "unknown op '" + op + "'");
}

} // namespace sindarin::service
