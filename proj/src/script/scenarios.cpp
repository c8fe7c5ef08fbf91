#include "sindarin/scenarios.hpp"

#include <algorithm>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

namespace sindarin::script {

using namespace lumen;

namespace {

thread_local std::vector<Halt>* t_halt_log = nullptr;

struct LogScope {
    std::vector<Halt>* saved;
    explicit LogScope(std::vector<Halt>* log) : saved(t_halt_log) { t_halt_log = log; }
    ~LogScope() { t_halt_log = saved; }
};

std::string excerpt_of(const DebugSession& s, const Node& n) {
    for (const CompiledProgram* p = &s.program(); p; p = p->base.get()) {
        if (!p->ast->owns(n)) continue;
        std::string text(p->ast->excerpt(n.span));
        std::string out;
        bool space = false;
        for (char c : text) {
            if (c == '\n' || c == '\t' || c == ' ') {
                space = true;
                continue;
            }
            if (space && !out.empty()) out += ' ';
            space = false;
            out += c;
        }
        if (out.size() > 60) out = out.substr(0, 57) + "...";
        return out;
    }
    return {};
}

bool at_send(const DebugSession& s) {
    auto top = s.execution().top();
    if (s.is_execution_finished() || !top || top->native || top->pc >= top->method->code.size()) return false;
    Opcode op = top->method->code[top->pc].op;
    return op == Opcode::Send || op == Opcode::SendSuper;
}

bool kind_of(const Execution& e, const Value& v, std::string_view class_name) {
    for (const ClassInfo* c = e.class_of(v); c; c = c->superclass)
        if (c->name == class_name) return true;
    return false;
}

std::vector<Value> elements_of(Execution& e, const Value& v) {
    const auto* ref = std::get_if<ObjectRef>(&v);
    if (!ref) return {};
    return e.heap().get(*ref).elements;
}

std::map<std::string, std::uint64_t> checksums(const CompiledProgram& p) {
    std::map<std::string, std::uint64_t> out;
    p.for_each_method([&](const CompiledMethod& m) { out[m.print_name()] ^= m.checksum(); });
    return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

std::shared_ptr<DebugSession> open_session(const std::string& source, const ScenarioOptions& opts) {
    ExecutionOptions eo;
    eo.seed = opts.seed;
    return std::shared_ptr<DebugSession>(DebugSession::debug(source, eo));
}

struct ScriptRun {
    std::shared_ptr<DebugSession> session;
    std::shared_ptr<Execution> exec;
    std::vector<Halt> halts;
    Value result;
};

// Runs a debugging script against a fresh session on target. The last halt
// is wherever the script left the debuggee.
ScriptRun run_script(const std::string& target, const std::string& script, const ScenarioOptions& opts,
                     const std::map<std::string, std::string>& globals = {}) {
    install_scenario_primitives();
    ScriptRun run;
    run.session = open_session(target, opts);
    LogScope scope(&run.halts);
    run.exec = prepare_script(run.session, script);
    for (const auto& [name, text] : globals) run.exec->define_global(name, text);
    run.exec->run_to_completion();
    if (run.exec->status() == ExecStatus::Failed) {
        std::string trace;
        for (const auto& ctx : run.exec->stack()) trace += ctx->method->print_name() + "\n";
        throw Error(ErrorCode::ScriptFailed, "script failed: " + run.exec->failure_reason(), std::nullopt, trace);
    }
    run.result = run.exec->result();
    run.halts.push_back(halt_of(*run.session));
    return run;
}

class Reporter {
public:
    explicit Reporter(ScenarioReport& r) : r_(r) {}
    void check(std::string name, bool ok, std::string detail = {}) {
        r_.checks.push_back(Check{std::move(name), ok, std::move(detail)});
    }
    // both lists end with where the driver left the debuggee
    void agree(const std::vector<Halt>& host, const std::vector<Halt>& script) {
        r_.host_halts.assign(host.begin(), host.end() - (host.empty() ? 0 : 1));
        r_.script_halts.assign(script.begin(), script.end() - (script.empty() ? 0 : 1));
        if (!script.empty()) r_.final_position = script.back();
        std::string detail;
        if (host != script) {
            detail = "host:";
            for (const auto& h : host) detail += "\n  " + to_string(h);
            detail += "\nscript:";
            for (const auto& h : script) detail += "\n  " + to_string(h);
        }
        check("host and script drivers agree", host == script, detail);
    }
    void capture(const std::string& key, std::string value) { r_.captured[key] = std::move(value); }

private:
    ScenarioReport& r_;
};

// -- double-open ----------------------------------------------------------------

std::vector<std::string> frame_names(const std::vector<FrameView>& frames) {
    std::vector<std::string> out;
    for (const auto& f : frames) out.push_back(f.method().print_name());
    return out;
}

void double_open(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    const std::vector<std::string> expected_stack = {"Logger>>attach:", "<main>"};

    // the copies die with their session, so only names leave the lambda
    auto host = [&](const char* source, std::vector<std::string>& first_stack) {
        auto s = open_session(source, opts);
        std::map<std::uint64_t, std::vector<FrameView>> seen;
        std::vector<Halt> halts;
        while (!s->is_execution_finished()) {
            if (at_send(*s) && s->message_selector() == "open" && kind_of(s->execution(), s->message_receiver(), "File")) {
                auto handle = std::get<ObjectRef>(s->message_receiver()).handle;
                auto it = seen.find(handle);
                if (it != seen.end()) {
                    first_stack = frame_names(it->second);
                    halts.push_back(halt_of(*s));
                    break;
                }
                std::vector<FrameView> copies;
                for (const auto& f : s->stack()) copies.push_back(FrameView{copy_frame(f.ctx)});
                seen[handle] = copies;
            }
            s->step();
        }
        halts.push_back(halt_of(*s));
        return halts;
    };

    std::vector<std::string> host_stack;
    auto host_halts = host(programs::double_open, host_stack);
    auto run = run_script(programs::double_open, scripts::double_open, opts);
    r.agree(host_halts, run.halts);

    const Halt& h = run.halts.back();
    r.check("halts before the second open", !h.finished && h.method == "Report>>generate:" && h.selector == "open",
            to_string(h));
    std::vector<std::string> script_stack;
    for (const Value& v : elements_of(*run.exec, run.result))
        if (auto f = frame_of(*run.exec, v)) script_stack.push_back(f->method().print_name());
    r.capture("first-open stack", join(script_stack));
    r.check("answers the stack of the first open", script_stack == expected_stack && host_stack == expected_stack,
            "script: " + join(script_stack) + " host: " + join(host_stack));

    std::vector<std::string> clean_stack;
    auto clean_host = host(programs::double_open_clean, clean_stack);
    auto clean = run_script(programs::double_open_clean, scripts::double_open, opts);
    r.check("two different files never halt",
            clean.halts.size() == 1 && clean.halts[0].finished && clean_stack.empty() &&
                clean.session->execution().status() == ExecStatus::Finished && clean_host == clean.halts,
            to_string(clean.halts.back()));
}

// -- assignment-monitor -----------------------------------------------------------

const Node* find_node(const Program& p, const std::function<bool(const Node&)>& pred) {
    for (const Node* n : p.nodes())
        if (pred(*n)) return n;
    return nullptr;
}

const Node* enclosing(const Node* n, NodeKind kind) {
    for (; n; n = n->parent)
        if (n->kind == kind) return n;
    return nullptr;
}

bool inside_method(const Node& n, std::string_view cls, std::string_view selector) {
    const Node* m = enclosing(&n, NodeKind::MethodDef);
    const Node* c = enclosing(&n, NodeKind::ClassDef);
    return m && c && m->name == selector && c->name == cls;
}

void assignment_monitor(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto s = open_session(programs::assignment_monitor, opts);
    s->step_until([](DebugSession& d) {
        const Node& n = d.current_node();
        return n.kind == NodeKind::Assignment && d.assignment_value() == Value{std::int64_t{42}} &&
               d.assignment_variable_name() == "foo" && kind_of(d.execution(), d.receiver(), "Bar");
    });
    // the script records once, then the runner records where it stopped
    std::vector<Halt> host = {halt_of(*s), halt_of(*s)};
    auto run = run_script(programs::assignment_monitor, scripts::assignment_monitor, opts);
    r.agree(host, run.halts);

    const Node* expected = find_node(*s->program().ast, [](const Node& n) {
        return n.kind == NodeKind::Assignment && n.name == "foo" && inside_method(n, "Bar", "update");
    });
    const Halt& h = run.halts.front();
    r.check("halts at the assignment in Bar>>update", expected && h.node == expected->id && h.method == "Bar>>update",
            to_string(h));
    r.check("decoys do not trigger", h.method != "Decoy>>update" && h.method != "<main>" && h.method != "Bar>>setUp");
}

// -- pre-exception ----------------------------------------------------------------

void pre_exception(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto s = open_session(programs::pre_exception, opts);
    s->step_until([](DebugSession& d) { return at_send(d) && d.message_selector() == "signal"; });
    std::vector<Halt> host = {halt_of(*s), halt_of(*s)};
    auto run = run_script(programs::pre_exception, scripts::pre_exception, opts);
    r.agree(host, run.halts);

    const Halt& h = run.halts.front();
    r.check("pending message is #signal", h.selector == "signal", to_string(h));
    r.check("receiver is an Exception", kind_of(run.session->execution(), h.receiver, "Exception") &&
                                            kind_of(run.session->execution(), run.result, "InsufficientFunds"));
    std::vector<std::string> names;
    bool handler = false;
    for (const auto& f : run.session->stack()) {
        names.push_back(f.method().print_name());
        if (std::dynamic_pointer_cast<HandlerRoutine>(f.ctx->native)) handler = true;
    }
    r.capture("stack", join(names, " / "));
    r.check("handler frame is on the stack", handler, join(names, " / "));
    run.session->resume();
    r.check("the handler still runs afterwards", run.session->execution().status() == ExecStatus::Finished &&
                                                     run.session->execution().output() == run_source(programs::pre_exception).output,
            run.session->execution().output());
}

// -- nil-receiver -----------------------------------------------------------------

void nil_receiver(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto s = open_session(programs::nil_receiver, opts);
    s->step_until([](DebugSession& d) { return at_send(d) && is_nil(d.message_receiver()); });
    std::vector<Halt> host = {halt_of(*s), halt_of(*s)};
    auto run = run_script(programs::nil_receiver, scripts::nil_receiver, opts);
    r.agree(host, run.halts);

    // bob address city
    const Node* expected = find_node(*s->program().ast, [](const Node& n) {
        if (n.kind != NodeKind::Message || n.name != "city" || n.children.size() != 1) return false;
        const Node& rcv = n.child(0);
        return rcv.kind == NodeKind::Message && rcv.name == "address" && rcv.child(0).kind == NodeKind::VariableRead &&
               rcv.child(0).name == "bob";
    });
    const Halt& h = run.halts.front();
    r.capture("node", std::to_string(h.node) + " " + h.excerpt);
    r.check("halts on the offending sub-expression", expected && h.node == expected->id && h.selector == "city",
            to_string(h));
}

// -- method-family ----------------------------------------------------------------

const std::set<std::string> kFamily = {"Editor>>load", "Viewer>>show", "FileManager>>openFileNamed:readOnly:",
                                       "Importer>>import", "FileManager>>reopenFile:"};

bool family_member(const Context& ctx) {
    static const std::regex pattern(".*open.*File.*");
    if (ctx.native || ctx.is_block()) return false;
    if (!std::regex_match(ctx.method->selector, pattern)) return false;
    auto args = ctx.arguments();
    return !args.empty() && args[0] == Value{std::string("myFile.txt")};
}

// Every activation of the program, checked at its first instruction.
std::set<std::string> family_by_trace(const ScenarioOptions& opts) {
    ExecutionOptions eo;
    eo.seed = opts.seed;
    auto exec = Execution::create(compile_source(programs::method_family), eo);
    exec->settle_pending();
    std::set<std::string> out;
    std::set<std::uint64_t> seen;
    while (!exec->is_finished()) {
        auto top = exec->top();
        if (top && top->pc == 0 && seen.insert(top->id).second && family_member(*top) && top->sender)
            out.insert(top->sender->method->print_name());
        exec->step();
    }
    return out;
}

const CompiledMethod* method_named(const CompiledProgram& p, const std::string& name) {
    const CompiledMethod* found = nullptr;
    p.for_each_method([&](const CompiledMethod& m) {
        if (!found && m.print_name() == name) found = &m;
    });
    return found;
}

void method_family(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto s = open_session(programs::method_family, opts);
    std::vector<const CompiledMethod*> installed;
    std::vector<Halt> host;
    while (!s->is_execution_finished()) {
        static const std::regex pattern(".*open.*File.*");
        if (std::regex_match(s->selector(), pattern) && !s->arguments().empty() &&
            s->context().arguments().at(0) == Value{std::string("myFile.txt")}) {
            const CompiledMethod* caller = &s->context().sender()->method();
            if (std::find(installed.begin(), installed.end(), caller) == installed.end()) {
                installed.push_back(caller);
                s->set_breakpoint_on(*caller);
                host.push_back(halt_of(*s));
            }
        }
        s->step();
    }
    host.push_back(halt_of(*s));
    auto run = run_script(programs::method_family, scripts::method_family, opts);
    r.agree(host, run.halts);

    std::set<std::string> script_set;
    for (const Value& v : elements_of(*run.exec, run.result))
        if (const auto* str = std::get_if<std::string>(&v)) script_set.insert(*str);
    auto oracle = family_by_trace(opts);
    r.capture("breakpoints", join({script_set.begin(), script_set.end()}));
    r.check("breakpoint set equals the trace oracle", script_set == oracle && oracle == kFamily,
            "script: " + join({script_set.begin(), script_set.end()}) + " oracle: " + join({oracle.begin(), oracle.end()}));

    // a fresh run stops at every one of them
    auto fresh = open_session(programs::method_family, opts);
    for (const auto& name : script_set)
        if (const CompiledMethod* m = method_named(fresh->program(), name)) fresh->set_breakpoint_on(*m);
    std::set<std::string> hit;
    bool all_at_entry = true;
    for (HitDescriptor d = fresh->resume(); d.kind == HitKind::Breakpoint; d = fresh->resume()) {
        hit.insert(fresh->method().print_name());
        all_at_entry = all_at_entry && fresh->context().pc() == 0;
    }
    r.check("a fresh run halts at each", hit == script_set && all_at_entry, join({hit.begin(), hit.end()}));
}

// -- control-flow -----------------------------------------------------------------

bool sender_is(const Context& ctx, const std::string& selector, bool anywhere) {
    for (auto f = ctx.sender; f; f = f->sender) {
        if (FrameView{f}.selector() == selector) return true;
        if (!anywhere) break;
    }
    return false;
}

// First ProjectBrowser>>trySaveAs: activation reached through actionPerformed:,
// from the plain call trace.
std::pair<std::uint64_t, std::string> control_flow_oracle(bool anywhere, const ScenarioOptions& opts) {
    ExecutionOptions eo;
    eo.seed = opts.seed;
    auto exec = Execution::create(compile_source(programs::control_flow), eo);
    exec->settle_pending();
    std::set<std::uint64_t> seen;
    while (!exec->is_finished()) {
        auto top = exec->top();
        if (top && seen.insert(top->id).second && !top->native && top->method->print_name() == "ProjectBrowser>>trySaveAs:" &&
            sender_is(*top, "actionPerformed:", anywhere))
            return {top->id, exec->output()};
        exec->step();
    }
    return {0, {}};
}

void control_flow_variant(ScenarioReport& report, const ScenarioOptions& opts, bool anywhere) {
    Reporter r(report);
    auto s = open_session(programs::control_flow, opts);
    s->step_until([anywhere](DebugSession& d) {
        auto top = d.execution().top();
        return kind_of(d.execution(), d.receiver(), "ProjectBrowser") && d.selector() == "trySaveAs:" &&
               sender_is(*top, "actionPerformed:", anywhere);
    });
    std::vector<Halt> host = {halt_of(*s), halt_of(*s)};
    auto run = run_script(programs::control_flow, anywhere ? scripts::control_flow_anywhere : scripts::control_flow, opts);
    r.agree(host, run.halts);

    auto [frame, output] = control_flow_oracle(anywhere, opts);
    const Halt& h = run.halts.front();
    r.capture("output before halt", output);
    r.check("halts at the call-trace oracle's activation",
            !h.finished && h.method == "ProjectBrowser>>trySaveAs:" && h.frame_id == frame && h.output == output,
            to_string(h));
    std::string expected_caller = anywhere ? "Confirmer" : "SaveButton";
    r.check(anywhere ? "reached through Confirmer" : "called directly by the button",
            kind_of(run.session->execution(), run.result, expected_caller), run.session->execution().print_string(run.result));
}

// -- pitons -----------------------------------------------------------------------

std::vector<Halt> pitons_host(const char* source, const ScenarioOptions& opts) {
    auto s = open_session(source, opts);
    std::vector<Halt> halts;
    for (const char* sel : {"method1", "method2", "method3"}) {
        s->step_until([sel](DebugSession& d) { return d.selector() == sel; });
        if (s->is_execution_finished()) break;
        halts.push_back(halt_of(*s));
    }
    halts.push_back(halt_of(*s));
    return halts;
}

void pitons(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto run = run_script(programs::pitons, scripts::pitons, opts);
    r.agree(pitons_host(programs::pitons, opts), run.halts);

    std::vector<std::string> methods, outputs;
    for (std::size_t i = 0; i + 1 < run.halts.size(); ++i) {
        methods.push_back(run.halts[i].method);
        outputs.push_back(run.halts[i].output);
    }
    r.check("pitons pass in order m1, m2, m3",
            methods == std::vector<std::string>{"ClassA>>method1", "ClassB>>method2", "ClassC>>method3"}, join(methods));
    r.check("m2 running first is ignored", outputs == std::vector<std::string>{"BC", "BCAC", "BCACBA"}, join(outputs));

    auto ooo = run_script(programs::pitons_out_of_order, scripts::pitons, opts);
    bool full = false;
    for (const auto& h : ooo.halts) full = full || h.method == "ClassC>>method3";
    r.check("out-of-order execution gives no halt", !full && ooo.result == Value{false} && ooo.halts.back().finished &&
                                                        pitons_host(programs::pitons_out_of_order, opts) == ooo.halts);
}

// -- divergence -------------------------------------------------------------------

std::vector<std::string> method_trace(const char* source, const ScenarioOptions& opts) {
    ExecutionOptions eo;
    eo.seed = opts.seed;
    auto exec = Execution::create(compile_source(source), eo);
    exec->settle_pending();
    std::vector<std::string> trace;
    while (!exec->is_finished()) {
        trace.push_back(exec->top()->method->print_name());
        exec->step();
    }
    return trace;
}

void divergence(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto a = open_session(programs::divergence_original, opts);
    auto b = open_session(programs::divergence_modified, opts);
    std::int64_t steps = 0;
    while (a->method().print_name() == b->method().print_name()) {
        a->step();
        b->step();
        ++steps;
    }
    std::vector<Halt> host = {halt_of(*a), halt_of(*a)};
    auto run = run_script(programs::divergence_original, scripts::divergence, opts,
                          {{"ModifiedSource", programs::divergence_modified}});
    r.agree(host, run.halts);

    auto t1 = method_trace(programs::divergence_original, opts);
    auto t2 = method_trace(programs::divergence_modified, opts);
    std::size_t oracle = 0;
    while (oracle < t1.size() && oracle < t2.size() && t1[oracle] == t2[oracle]) ++oracle;
    r.capture("divergence step", std::to_string(oracle));
    if (oracle < t1.size() && oracle < t2.size()) r.capture("methods", t1[oracle] + " vs " + t2[oracle]);
    r.check("step index equals the first divergence of the traces",
            run.result == Value{static_cast<std::int64_t>(oracle)} && steps == static_cast<std::int64_t>(oracle),
            "script " + run.exec->print_string(run.result) + " host " + std::to_string(steps) + " oracle " + std::to_string(oracle));
}

// -- collect-stepping -------------------------------------------------------------

void collect_stepping(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto s = open_session(programs::collect_stepping, opts);
    const CompiledMethod* collect = s->program().find_class("Collection")->lookup("collect:");
    s->step_until([collect](DebugSession& d) { return &d.method() == collect; });
    Value block = s->arguments().at(0);
    const CompiledMethod* block_method = s->execution().heap().get(std::get<ObjectRef>(block)).closure->method;
    std::vector<Halt> host;
    ContextPtr last;
    for (int i = 0; i < 7; ++i) {
        s->step_until([&](DebugSession& d) { return d.execution().top() != last && &d.method() == block_method; });
        last = s->execution().top();
        host.push_back(halt_of(*s));
    }
    Value host_element = s->arguments().at(0);
    host.push_back(halt_of(*s));
    auto run = run_script(programs::collect_stepping, scripts::collect_stepping, opts);
    r.agree(host, run.halts);

    std::vector<std::uint64_t> ids;
    for (std::size_t i = 0; i + 1 < run.halts.size(); ++i) ids.push_back(run.halts[i].frame_id);
    bool fresh = ids.size() == 7 && std::adjacent_find(ids.begin(), ids.end(), [](auto x, auto y) { return x >= y; }) == ids.end();
    std::string id_text;
    for (auto id : ids) id_text += std::to_string(id) + " ";
    r.capture("frame ids", id_text);
    // the 7th of 10, 20, ... 100
    r.check("seventh invocation sees the seventh element", run.result == Value{std::int64_t{70}} && host_element == run.result,
            run.exec->print_string(run.result));
    r.check("a fresh frame each invocation", fresh, id_text);
}

// -- atoms ------------------------------------------------------------------------

std::string drawer_style(Execution& e, const Value& drawer) {
    const auto* ref = std::get_if<ObjectRef>(&drawer);
    if (!ref) return {};
    const HeapObject& obj = e.heap().get(*ref);
    int f = obj.cls->field_index("style");
    if (f < 0) return {};
    const auto* s = std::get_if<std::string>(&obj.fields[static_cast<std::size_t>(f)]);
    return s ? *s : std::string();
}

// Stops at `self randomAtomDrawer`, steps over it and reports atom and drawer.
struct AtomStop {
    Value atom;
    Value drawer;
    const Node* drawer_node = nullptr;
};

AtomStop inspect_atom(DebugSession& d) {
    d.step_until([](DebugSession& x) { return at_send(x) && x.message_selector() == "randomAtomDrawer"; });
    AtomStop stop;
    stop.drawer_node = &d.current_node();
    d.step_over();
    stop.atom = d.message_receiver();
    stop.drawer = d.message_arguments().at(0);
    return stop;
}

bool wire_torus(DebugSession& d, const AtomStop& stop) {
    return kind_of(d.execution(), stop.atom, "TorusAtom") && drawer_style(d.execution(), stop.drawer) == "wire";
}

void object_capture(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto s = open_session(programs::atoms, opts);
    auto before = checksums(s->program());
    const CompiledMethod* display = s->program().find_class("AtomViewer")->lookup("displayAtom:");
    std::uint64_t bp = s->set_breakpoint_on(*display);
    Value captured;
    s->when_hit(bp, [&](DebugSession& d) {
        AtomStop stop = inspect_atom(d);
        if (wire_torus(d, stop)) {
            captured = stop.drawer;
            d.halt_on_call(stop.drawer);
            d.remove_breakpoint(bp);
        }
        d.resume();
    });
    std::vector<Halt> host;
    std::string capture_output;
    for (HitDescriptor hit = s->resume(); hit.kind != HitKind::ExecutionFinished && hit.kind != HitKind::UnhandledException;
         hit = s->resume())
        host.push_back(halt_of(*s));
    host.push_back(halt_of(*s));
    auto run = run_script(programs::atoms, scripts::object_capture, opts);
    r.agree(host, run.halts);

    Execution& e = run.session->execution();
    r.check("a wire drawer was captured on a torus", drawer_style(e, run.result) == "wire", e.print_string(run.result));
    bool only_captured = run.halts.size() > 1;
    for (std::size_t i = 0; i + 1 < run.halts.size(); ++i) only_captured = only_captured && run.halts[i].receiver == run.result;
    r.capture("watch hits", std::to_string(run.halts.size() - 1));
    r.check("haltOnCall triggers only for the captured drawer", only_captured);
    // other drawers kept drawing after the capture without stopping anything
    std::string after = run.halts.empty() ? std::string() : e.output().substr(run.halts.front().output.size());
    r.check("other drawers were called after the capture",
            after.find("flat ") != std::string::npos || after.find("shaded ") != std::string::npos, after);
    r.check("method checksums unchanged",
            checksums(run.session->program()) == before && checksums(*compile_source(programs::atoms)) == before);
}

void object_replay(ScenarioReport& report, const ScenarioOptions& opts) {
    Reporter r(report);
    auto s = open_session(programs::atoms, opts);
    auto before = checksums(s->program());
    const CompiledMethod* display = s->program().find_class("AtomViewer")->lookup("displayAtom:");
    std::uint64_t bp = s->set_breakpoint_on(*display);
    std::vector<Halt> host;
    Value drawer;
    s->when_hit(bp, [&](DebugSession& d) {
        AtomStop stop = inspect_atom(d);
        drawer = stop.drawer;
        if (wire_torus(d, stop)) {
            d.remove_breakpoint(bp);
            std::uint64_t replay = d.set_breakpoint_on(*stop.drawer_node);
            d.when_hit(replay, [&host, forced = stop.drawer](DebugSession& x) {
                x.skip_with(forced);
                host.push_back(halt_of(x));
                x.resume();
            });
        }
        d.resume();
    });
    s->resume();
    host.push_back(halt_of(*s));
    auto run = run_script(programs::atoms, scripts::object_replay, opts);
    r.agree(host, run.halts);

    ExecutionOptions eo;
    eo.seed = opts.seed;
    FinalState forced = run_source(programs::atoms_forced, eo);
    r.check("replay output equals the forced-drawer run", run.session->execution().output() == forced.output,
            "replay:\n" + run.session->execution().output() + "forced:\n" + forced.output);
    r.check("replay changed the run", run.halts.size() > 1 && forced.output != run_source(programs::atoms, eo).output);
    r.check("method checksums unchanged",
            checksums(run.session->program()) == before && checksums(*compile_source(programs::atoms)) == before);
}

// -- registry ---------------------------------------------------------------------

using Runner = void (*)(ScenarioReport&, const ScenarioOptions&);

struct Entry {
    ScenarioInfo info;
    Runner run;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> list = {
        {{"double-open", "halt on the second open of the same file", programs::double_open, scripts::double_open}, double_open},
        {{"assignment-monitor", "halt when Bar assigns 42 to foo", programs::assignment_monitor, scripts::assignment_monitor},
         assignment_monitor},
        {{"pre-exception", "halt before an exception is signalled", programs::pre_exception, scripts::pre_exception},
         pre_exception},
        {{"nil-receiver", "halt before a message is sent to nil", programs::nil_receiver, scripts::nil_receiver}, nil_receiver},
        {{"method-family", "breakpoints on every caller of the open*File* family", programs::method_family,
          scripts::method_family},
         method_family},
        {{"control-flow", "halt when the button calls trySaveAs: directly", programs::control_flow, scripts::control_flow},
         [](ScenarioReport& r, const ScenarioOptions& o) { control_flow_variant(r, o, false); }},
        {{"control-flow-anywhere", "halt when trySaveAs: runs anywhere under the button", programs::control_flow,
          scripts::control_flow_anywhere},
         [](ScenarioReport& r, const ScenarioOptions& o) { control_flow_variant(r, o, true); }},
        {{"pitons", "halt at method1, then method2, then method3", programs::pitons, scripts::pitons}, pitons},
        {{"divergence", "step two versions side by side until they diverge", programs::divergence_original,
          scripts::divergence},
         divergence},
        {{"collect-stepping", "halt in the 7th evaluation of a collect: block", programs::collect_stepping,
          scripts::collect_stepping},
         collect_stepping},
        {{"object-capture", "capture the drawer that draws a wire torus", programs::atoms, scripts::object_capture},
         object_capture},
        {{"object-replay", "replay the captured drawer for every later atom", programs::atoms, scripts::object_replay},
         object_replay},
    };
    return list;
}

} // namespace

Halt halt_of(DebugSession& s) {
    Halt h;
    h.output = s.execution().output();
    auto top = s.execution().top();
    if (s.is_execution_finished() || !top) {
        h.finished = true;
        return h;
    }
    h.method = top->method->print_name();
    h.frame_id = top->id;
    if (const Node* n = top->current_node()) {
        h.node = n->id;
        h.node_kind = std::string(to_string(n->kind));
        h.excerpt = excerpt_of(s, *n);
    }
    if (at_send(s)) {
        h.selector = s.message_selector();
        h.receiver = s.message_receiver();
    }
    return h;
}

std::string to_string(const Halt& h) {
    if (h.finished) return "finished";
    std::string out = h.method + " node " + std::to_string(h.node) + " " + h.node_kind;
    if (!h.excerpt.empty()) out += " `" + h.excerpt + "`";
    out += " frame " + std::to_string(h.frame_id);
    return out;
}

std::string ScenarioReport::render() const {
    std::ostringstream out;
    out << (passed ? "PASS " : "FAIL ") << name << " (" << script_halts.size() << (script_halts.size() == 1 ? " halt)" : " halts)") << "\n";
    for (const auto& h : script_halts) out << "  halt " << to_string(h) << "\n";
    out << "  stopped " << to_string(final_position) << "\n";
    for (const auto& [k, v] : captured) {
        std::string one = v;
        std::replace(one.begin(), one.end(), '\n', '|');
        out << "  " << k << ": " << one << "\n";
    }
    for (const auto& c : checks) {
        out << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << "\n";
        if (!c.passed && !c.detail.empty()) {
            std::istringstream lines(c.detail);
            for (std::string line; std::getline(lines, line);) out << "       " << line << "\n";
        }
    }
    return out.str();
}

const std::vector<ScenarioInfo>& scenario_list() {
    static const std::vector<ScenarioInfo> list = [] {
        std::vector<ScenarioInfo> out;
        for (const auto& e : entries()) out.push_back(e.info);
        return out;
    }();
    return list;
}

const ScenarioInfo& scenario_info(const std::string& name) {
    for (const auto& e : entries())
        if (e.info.name == name) return e.info;
    throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + name + "'");
}

ScenarioReport run_scenario(const std::string& name, const ScenarioOptions& options) {
    const Entry* entry = nullptr;
    for (const auto& e : entries())
        if (e.info.name == name) entry = &e;
    if (!entry) throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + name + "'");
    ScenarioReport report;
    report.name = name;
    try {
        entry->run(report, options);
    } catch (const Error& err) {
        report.checks.push_back(Check{"runs without error", false, std::string(to_string(err.code())) + ": " + err.what() + "\n" + err.detail()});
    }
    report.passed = !report.checks.empty() &&
                    std::all_of(report.checks.begin(), report.checks.end(), [](const Check& c) { return c.passed; });
    return report;
}

void install_scenario_primitives() {
    static std::once_flag once;
    std::call_once(once, [] {
        install_primitives();
        register_primitive("ScriptableDebugger", "recordHalt", [](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
            auto session = session_of(e, self);
            if (session && t_halt_log) t_halt_log->push_back(halt_of(*session));
            return Answer{Nil{}};
        });
    });
}

} // namespace sindarin::script
