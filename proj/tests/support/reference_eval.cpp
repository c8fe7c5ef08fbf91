#include "reference_eval.hpp"

#include "sindarin/error.hpp"
#include "sindarin/lumen/compiler.hpp"  // prelude_source() only

#include <algorithm>
#include <limits>
#include <regex>
#include <stdexcept>

namespace refeval {

using sindarin::lumen::NodeKind;
using Int = std::int64_t;

namespace {

struct Signal {
    RValue exception;
};
struct NonLocal {
    const Activation* home;
    RValue value;
};

std::size_t arity_of(const std::string& sel) {
    if (sel.empty()) return 0;
    if (std::isalpha(static_cast<unsigned char>(sel[0])) || sel[0] == '_')
        return static_cast<std::size_t>(std::count(sel.begin(), sel.end(), ':'));
    return 1;
}

std::string article(const std::string& name) {
    if (!name.empty() && std::string_view("AEIOU").find(name[0]) != std::string_view::npos) return "an " + name;
    return "a " + name;
}

std::string quoted(const std::string& s) { return sindarin::lumen::literal_print_string(s); }
std::string quoted(const RSym& s) { return sindarin::lumen::literal_print_string(sindarin::lumen::Symbol{s.name}); }

RValue from_literal(const sindarin::lumen::LiteralValue& lit) {
    struct V {
        RValue operator()(const sindarin::lumen::Nil&) const { return RNil{}; }
        RValue operator()(bool b) const { return b; }
        RValue operator()(Int i) const { return i; }
        RValue operator()(const std::string& s) const { return s; }
        RValue operator()(const sindarin::lumen::Symbol& s) const { return RSym{s.name}; }
    };
    return std::visit(V{}, lit);
}

} // namespace

struct Env {
    std::vector<std::string> names;
    std::vector<RValue> values;
    std::shared_ptr<Env> outer;
    RValue self;
    const RClass* defining = nullptr;
    std::shared_ptr<Activation> home;

    RValue* find(const std::string& name) {
        for (Env* e = this; e; e = e->outer.get())
            for (std::size_t i = e->names.size(); i-- > 0;)
                if (e->names[i] == name) return &e->values[i];
        return nullptr;
    }
};

using EnvPtr = std::shared_ptr<Env>;
using Prim = std::function<RValue(const RValue& self, std::vector<RValue>& args)>;

struct Evaluator::Impl {
    Evaluator& owner;
    std::int64_t seed;
    std::shared_ptr<const sindarin::lumen::Program> prelude_ast, user_ast;
    std::map<std::string, std::unique_ptr<RClass>> classes;
    std::map<const RClass*, std::map<std::string, Prim>> prims, meta_prims;
    RObjectPtr transcript;
    std::string output;
    int depth = 0;
    std::uint64_t budget = 50'000'000;

    Impl(Evaluator& o, std::int64_t s) : owner(o), seed(s) {}

    // -- classes ----------------------------------------------------------------

    const RClass& cls(const std::string& name) const {
        auto it = classes.find(name);
        if (it == classes.end()) throw std::runtime_error("reference: missing class " + name);
        return *it->second;
    }

    void load_classes(const sindarin::lumen::Program& program, bool builtin) {
        std::vector<const Node*> defs = program.classes();
        for (const Node* def : defs) {
            auto c = std::make_unique<RClass>();
            c->name = def->name;
            for (const auto& m : def->children) c->methods[m->name] = m.get();
            classes[def->name] = std::move(c);
        }
        std::map<std::string, bool> done;
        std::function<void(const Node*)> link = [&](const Node* def) {
            if (done[def->name]) return;
            RClass& c = *classes.at(def->name);
            if (!(builtin && def->name == "Object")) {
                for (const Node* d : defs)
                    if (d->name == def->superclass) link(d);
                const RClass& s = cls(def->superclass);
                c.super = &s;
                c.fields = s.fields;
                c.storage = s.storage;
            }
            if (builtin) {
                if (c.name == "Array" || c.name == "OrderedCollection") c.storage = Storage::Indexed;
                if (c.name == "Dictionary") c.storage = Storage::Dictionary;
                if (c.name == "Block") c.storage = Storage::Closure;
            }
            c.fields.insert(c.fields.end(), def->names.begin(), def->names.end());
            done[def->name] = true;
        };
        for (const Node* d : defs) link(d);
    }

    const RClass* class_of(const RValue& v) const {
        struct V {
            const Impl& i;
            const RClass* operator()(const RNil&) const { return &i.cls("UndefinedObject"); }
            const RClass* operator()(bool b) const { return &i.cls(b ? "True" : "False"); }
            const RClass* operator()(Int) const { return &i.cls("Integer"); }
            const RClass* operator()(const std::string&) const { return &i.cls("String"); }
            const RClass* operator()(const RSym&) const { return &i.cls("Symbol"); }
            const RClass* operator()(const RObjectPtr& o) const { return o->cls; }
            const RClass* operator()(const RClassRef&) const { return &i.cls("Class"); }
        };
        return std::visit(V{*this}, v);
    }

    RObjectPtr alloc(const RClass* c) {
        auto o = std::make_shared<RObject>();
        o->cls = c;
        o->fields.assign(c->fields.size(), RNil{});
        return o;
    }

    RObjectPtr collection(const std::string& name, std::vector<RValue> elements) {
        auto o = alloc(&cls(name));
        o->elements = std::move(elements);
        return o;
    }

    RValue exception(const std::string& name, const std::string& text) {
        auto it = classes.find(name);
        auto o = alloc(it == classes.end() ? &cls("Error") : it->second.get());
        int f = o->cls->field("messageText");
        if (f >= 0) o->fields[static_cast<std::size_t>(f)] = text;
        return o;
    }

    [[noreturn]] void fail(const std::string& cls_name, const std::string& text) { throw Signal{exception(cls_name, text)}; }
    [[noreturn]] void type_error(const std::string& what, const RValue& got) {
        fail("Error", what + " expected, got " + print(got));
    }

    // -- printing ---------------------------------------------------------------

    std::string render(const RValue& v, bool display, int d) const {
        if (const auto* s = std::get_if<std::string>(&v)) return display ? *s : quoted(*s);
        if (const auto* s = std::get_if<RSym>(&v)) return display ? s->name : quoted(*s);
        if (std::holds_alternative<RNil>(v)) return "nil";
        if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
        if (const auto* i = std::get_if<Int>(&v)) return std::to_string(*i);
        if (const auto* c = std::get_if<RClassRef>(&v)) return c->cls->name;
        const RObject& o = *std::get<RObjectPtr>(v);
        if (o.block) return "a Block";
        const std::string& name = o.cls->name;
        if (o.cls->storage == Storage::Indexed) {
            if (d > 3) return name == "Array" ? "#(...)" : article(name) + "(...)";
            std::string out = name == "Array" ? "#(" : article(name) + "(";
            for (std::size_t i = 0; i < o.elements.size(); ++i) out += (i ? " " : "") + render(o.elements[i], false, d + 1);
            return out + ")";
        }
        if (o.cls->storage == Storage::Dictionary) {
            if (d > 3) return article(name) + "(...)";
            std::string out = article(name) + "(";
            for (std::size_t i = 0; i < o.entries.size(); ++i)
                out += (i ? " " : "") + render(o.entries[i].first, false, d + 1) + "->" + render(o.entries[i].second, false, d + 1);
            return out + ")";
        }
        return article(name);
    }
    std::string print(const RValue& v) const { return render(v, false, 0); }
    std::string display(const RValue& v) const { return render(v, true, 0); }
    std::string text_of(const RValue& v) const {
        if (const auto* s = std::get_if<std::string>(&v)) return *s;
        if (const auto* s = std::get_if<RSym>(&v)) return s->name;
        return display(v);
    }

    static std::string block_name(const RBlock& b) { return "[] in " + b.home->name; }

    struct Canonical {
        std::map<const RObject*, std::size_t> seen;
        std::string operator()(const RValue& v) {
            if (const auto* s = std::get_if<std::string>(&v)) return quoted(*s);
            if (const auto* s = std::get_if<RSym>(&v)) return quoted(*s);
            if (std::holds_alternative<RNil>(v)) return "nil";
            if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
            if (const auto* i = std::get_if<Int>(&v)) return std::to_string(*i);
            if (const auto* c = std::get_if<RClassRef>(&v)) return c->cls->name;
            const RObject* o = std::get<RObjectPtr>(v).get();
            if (auto it = seen.find(o); it != seen.end()) return "@" + std::to_string(it->second);
            std::size_t k = seen.size() + 1;
            seen[o] = k;
            std::string out = o->cls->name + "#" + std::to_string(k);
            if (o->block) return out + "<" + block_name(*o->block) + ">";
            bool container = o->cls->storage == Storage::Indexed || o->cls->storage == Storage::Dictionary;
            if (!o->fields.empty() || !container) {
                out += "{";
                for (std::size_t i = 0; i < o->fields.size(); ++i)
                    out += (i ? "," : "") + o->cls->fields[i] + "=" + (*this)(o->fields[i]);
                out += "}";
            }
            if (o->cls->storage == Storage::Indexed) {
                out += "[";
                for (std::size_t i = 0; i < o->elements.size(); ++i) out += (i ? "," : "") + (*this)(o->elements[i]);
                out += "]";
            } else if (o->cls->storage == Storage::Dictionary) {
                out += "[";
                for (std::size_t i = 0; i < o->entries.size(); ++i)
                    out += (i ? "," : "") + (*this)(o->entries[i].first) + "->" + (*this)(o->entries[i].second);
                out += "]";
            }
            return out;
        }
    };

    std::string failure_reason(const RValue& exc) const {
        const auto* op = std::get_if<RObjectPtr>(&exc);
        if (!op) return print(exc);
        const RObject& o = **op;
        std::string out = o.cls->name;
        if (o.cls->inherits(&cls("MessageNotUnderstood"))) {
            const RValue& receiver = o.fields[static_cast<std::size_t>(o.cls->field("receiver"))];
            const RValue& message = o.fields[static_cast<std::size_t>(o.cls->field("message"))];
            std::string selector = "?";
            if (const auto* m = std::get_if<RObjectPtr>(&message))
                if (const auto* s = std::get_if<RSym>(&(*m)->fields[0])) selector = s->name;
            return out + ": " + print(receiver) + " does not understand #" + selector;
        }
        int f = o.cls->field("messageText");
        if (f >= 0)
            if (const auto* s = std::get_if<std::string>(&o.fields[static_cast<std::size_t>(f)])) out += ": " + *s;
        return out;
    }

    // -- evaluation ---------------------------------------------------------------

    void trace(TraceEvent ev) {
        if (!owner.on_trace) return;
        ev.depth = depth;
        ev.output_size = output.size();
        owner.on_trace(ev);
    }

    void tick() {
        if (budget-- == 0) throw std::runtime_error("reference: evaluation budget exhausted");
    }

    RValue global(const std::string& name) {
        if (name == "Transcript") return transcript;
        if (name == "DefaultSeed") return seed;
        if (auto it = classes.find(name); it != classes.end()) return RClassRef{it->second.get()};
        fail("Error", "undefined variable " + name);
    }

    RValue* field_slot(Env& env, const std::string& name) {
        if (!env.defining) return nullptr;
        int f = env.defining->field(name);
        if (f < 0) return nullptr;
        auto* self = std::get_if<RObjectPtr>(&env.self);
        if (!self) throw std::runtime_error("reference: field access on an immediate");
        return &(*self)->fields[static_cast<std::size_t>(f)];
    }

    // Evaluates a body. Sets returned when a method-level ^ ran.
    RValue sequence(const Node& seq, const EnvPtr& env, bool in_block, bool answers_last, bool& returned) {
        RValue last = RNil{};
        bool any = false;
        for (const auto& st : seq.children) {
            if (st->kind == NodeKind::TempDecl) continue;
            if (st->kind == NodeKind::Return) {
                RValue v = eval(st->child(0), env);
                if (!in_block) {
                    returned = true;
                    return v;
                }
                if (!env->home->alive) {
                    std::string name = "[] in " + env->home->name;
                    fail("BlockCannotReturn", "home context of " + name + " has returned");
                }
                throw NonLocal{env->home.get(), std::move(v)};
            }
            last = eval(*st, env);
            any = true;
        }
        return answers_last && any ? last : RValue{RNil{}};
    }

    static std::vector<std::string> temps_of(const Node& seq) {
        std::vector<std::string> out;
        for (const auto& c : seq.children)
            if (c->kind == NodeKind::TempDecl) out.insert(out.end(), c->names.begin(), c->names.end());
        return out;
    }

    RValue eval(const Node& n, const EnvPtr& env) {
        tick();
        switch (n.kind) {
        case NodeKind::Literal: return from_literal(n.literal);
        case NodeKind::SelfRef: return env->self;
        case NodeKind::VariableRead: {
            if (RValue* v = env->find(n.name)) return *v;
            if (RValue* f = field_slot(*env, n.name)) return *f;
            return global(n.name);
        }
        case NodeKind::Assignment: {
            RValue v = eval(n.child(0), env);
            RValue* slot = env->find(n.name);
            if (!slot) slot = field_slot(*env, n.name);
            if (!slot) throw std::runtime_error("reference: assignment to undeclared " + n.name);
            *slot = v;
            if (owner.on_trace) {
                TraceEvent ev;
                ev.kind = TraceEvent::Assign;
                ev.variable = n.name;
                ev.value = print(v);
                ev.receiver_class = class_of(env->self)->name;
                ev.node = user_ast->owns(n) ? n.id : 0;
                trace(ev);
            }
            return v;
        }
        case NodeKind::Message: {
            RValue recv = eval(n.child(0), env);
            std::vector<RValue> args;
            for (std::size_t i = 1; i < n.children.size(); ++i) args.push_back(eval(n.child(i), env));
            const RClass* start = nullptr;
            if (n.is_super) {
                if (!env->defining || !env->defining->super) throw std::runtime_error("reference: super outside a method");
                start = env->defining->super;
            }
            return send(recv, n.name, std::move(args), start, user_ast->owns(n) ? n.id : 0);
        }
        case NodeKind::Block: {
            auto o = alloc(&cls("Block"));
            o->block = std::make_shared<RBlock>(RBlock{&n, env, env->home});
            return o;
        }
        default: throw std::runtime_error("reference: unexpected node " + std::string(to_string(n.kind)));
        }
    }

    RValue invoke_method(const RValue& recv, const RClass* defining, const Node& def, std::vector<RValue>& args) {
        auto act = std::make_shared<Activation>();
        act->name = defining->name + ">>" + def.name;
        auto env = std::make_shared<Env>();
        env->names = def.names;
        env->values = args;
        for (const auto& t : temps_of(def.child(0))) {
            env->names.push_back(t);
            env->values.push_back(RNil{});
        }
        env->self = recv;
        env->defining = defining;
        env->home = act;
        if (++depth > 3000) throw std::runtime_error("reference: recursion too deep");
        if (owner.on_trace) {
            TraceEvent ev;
            ev.kind = TraceEvent::Enter;
            ev.method = act->name;
            ev.selector = def.name;
            ev.receiver_class = class_of(recv)->name;
            trace(ev);
        }
        RValue result;
        try {
            bool returned = false;
            RValue v = sequence(def.child(0), env, false, false, returned);
            result = returned ? v : recv;
        } catch (NonLocal& nl) {
            if (nl.home != act.get()) {
                act->alive = false;
                --depth;
                throw;
            }
            result = std::move(nl.value);
        } catch (...) {
            act->alive = false;
            --depth;
            throw;
        }
        act->alive = false;
        if (owner.on_trace) {
            TraceEvent ev;
            ev.kind = TraceEvent::Exit;
            ev.method = act->name;
            trace(ev);
        }
        --depth;
        return result;
    }

    RValue invoke_block(const RObjectPtr& obj, std::vector<RValue> args) {
        const RBlock& b = *obj->block;
        const Node& node = *b.node;
        if (node.names.size() != args.size())
            fail("Error", "block takes " + std::to_string(node.names.size()) + " arguments, got " + std::to_string(args.size()));
        auto env = std::make_shared<Env>();
        env->names = node.names;
        env->values = std::move(args);
        for (const auto& t : temps_of(node.child(0))) {
            env->names.push_back(t);
            env->values.push_back(RNil{});
        }
        env->outer = b.outer;
        env->self = b.outer->self;
        env->defining = b.outer->defining;
        env->home = b.home;
        if (++depth > 3000) throw std::runtime_error("reference: recursion too deep");
        if (owner.on_trace) {
            TraceEvent ev;
            ev.kind = TraceEvent::Enter;
            ev.method = block_name(b);
            ev.receiver_class = class_of(env->self)->name;
            trace(ev);
        }
        struct Depth {
            int& d;
            ~Depth() { --d; }
        } guard{depth};
        bool returned = false;
        RValue v = sequence(node.child(0), env, true, true, returned);
        if (owner.on_trace) {
            TraceEvent ev;
            ev.kind = TraceEvent::Exit;
            ev.method = block_name(b);
            trace(ev);
        }
        return v;
    }

    RValue call(const RValue& callable, std::vector<RValue> args) {
        if (const auto* o = std::get_if<RObjectPtr>(&callable))
            if ((*o)->block) return invoke_block(*o, std::move(args));
        static const char* const sels[] = {"value", "value:", "value:value:", "value:value:value:", "value:value:value:value:"};
        if (args.size() >= std::size(sels)) fail("Error", "too many block arguments");
        return send(callable, sels[args.size()], std::move(args));
    }

    RValue send(const RValue& recv, const std::string& sel, std::vector<RValue> args, const RClass* start = nullptr,
                sindarin::lumen::NodeId node = 0) {
        tick();
        if (owner.on_trace) {
            TraceEvent ev;
            ev.kind = TraceEvent::Send;
            ev.node = node;
            ev.selector = sel;
            ev.receiver_class = class_of(recv)->name;
            for (const auto& a : args) ev.args.push_back(print(a));
            trace(ev);
        }
        if (!start) {
            if (const auto* c = std::get_if<RClassRef>(&recv)) {
                for (const RClass* k = c->cls; k; k = k->super) {
                    auto it = meta_prims.find(k);
                    if (it == meta_prims.end()) continue;
                    auto p = it->second.find(sel);
                    if (p != it->second.end()) return p->second(recv, args);
                }
            }
        }
        const RClass* first = start ? start : class_of(recv);
        for (const RClass* c = first; c; c = c->super) {
            if (auto m = c->methods.find(sel); m != c->methods.end()) {
                if (m->second->names.size() != args.size()) fail("Error", "wrong argument count for " + c->name + ">>" + sel);
                return invoke_method(recv, c, *m->second, args);
            }
            if (auto it = prims.find(c); it != prims.end()) {
                auto p = it->second.find(sel);
                if (p != it->second.end()) return p->second(recv, args);
            }
        }
        if (sel == "doesNotUnderstand:") throw std::runtime_error("reference: doesNotUnderstand: not understood");
        auto msg = alloc(&cls("Message"));
        msg->fields[0] = RSym{sel};
        msg->fields[1] = collection("Array", std::move(args));
        return send(recv, "doesNotUnderstand:", {RValue{msg}});
    }

    bool responds_to(const RClass* c, const std::string& sel) const {
        for (; c; c = c->super) {
            if (c->methods.count(sel)) return true;
            if (auto it = prims.find(c); it != prims.end() && it->second.count(sel)) return true;
        }
        return false;
    }

    // -- primitives ---------------------------------------------------------------

    void def(const std::string& c, const std::string& sel, Prim p) { prims[&cls(c)][sel] = std::move(p); }
    void def_meta(const std::string& c, const std::string& sel, Prim p) { meta_prims[&cls(c)][sel] = std::move(p); }

    RObject* indexed(const RValue& v) {
        const auto* o = std::get_if<RObjectPtr>(&v);
        return o && (*o)->cls->storage == Storage::Indexed ? o->get() : nullptr;
    }
    RObject& dict(const RValue& v) { return *std::get<RObjectPtr>(v); }

    std::size_t index(RObject& o, const RValue& i) {
        const auto* n = std::get_if<Int>(&i);
        if (!n) type_error("Integer", i);
        if (*n < 1 || *n > static_cast<Int>(o.elements.size()))
            fail("SubscriptOutOfBounds", "index " + std::to_string(*n) + " out of bounds for size " + std::to_string(o.elements.size()));
        return static_cast<std::size_t>(*n - 1);
    }

    Int int_arg(const RValue& v) {
        const auto* i = std::get_if<Int>(&v);
        if (!i) type_error("Integer", v);
        return *i;
    }

    void install() {
        auto I = [](const RValue& v) { return std::get<Int>(v); };
        // integers
        auto arith = [this, I](bool (*op)(Int, Int, Int*)) {
            return [this, I, op](const RValue& s, std::vector<RValue>& a) -> RValue {
                Int b = int_arg(a.at(0)), r = 0;
                if (op(I(s), b, &r)) fail("ArithmeticError", "integer overflow");
                return r;
            };
        };
        def("Integer", "+", arith([](Int a, Int b, Int* r) { return __builtin_add_overflow(a, b, r); }));
        def("Integer", "-", arith([](Int a, Int b, Int* r) { return __builtin_sub_overflow(a, b, r); }));
        def("Integer", "*", arith([](Int a, Int b, Int* r) { return __builtin_mul_overflow(a, b, r); }));
        auto division = [this, I](Int (*fn)(Int, Int)) {
            return [this, I, fn](const RValue& s, std::vector<RValue>& a) -> RValue {
                Int x = I(s), y = int_arg(a.at(0));
                if (y == 0) fail("ZeroDivide", "division by zero");
                if (x == std::numeric_limits<Int>::min() && y == -1) fail("ArithmeticError", "integer overflow");
                return fn(x, y);
            };
        };
        auto fdiv = [](Int a, Int b) -> Int {
            Int q = a / b;
            return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
        };
        auto fmod = [](Int a, Int b) -> Int {
            Int m = a % b;
            return (m != 0 && ((m < 0) != (b < 0))) ? m + b : m;
        };
        def("Integer", "/", division(fdiv));
        def("Integer", "//", division(fdiv));
        def("Integer", "\\\\", division(fmod));
        def("Integer", "rem:", division([](Int a, Int b) { return a % b; }));
        def("Integer", "quo:", division([](Int a, Int b) { return a / b; }));
        auto cmp = [this, I](bool (*fn)(Int, Int)) {
            return [this, I, fn](const RValue& s, std::vector<RValue>& a) -> RValue { return fn(I(s), int_arg(a.at(0))); };
        };
        def("Integer", "<", cmp([](Int a, Int b) { return a < b; }));
        def("Integer", ">", cmp([](Int a, Int b) { return a > b; }));
        def("Integer", "<=", cmp([](Int a, Int b) { return a <= b; }));
        def("Integer", ">=", cmp([](Int a, Int b) { return a >= b; }));
        def("Integer", "=", [](const RValue& s, std::vector<RValue>& a) -> RValue { return s == a.at(0); });
        def("Integer", "~=", [](const RValue& s, std::vector<RValue>& a) -> RValue { return s != a.at(0); });
        def("Integer", "hash", [](const RValue& s, std::vector<RValue>&) -> RValue { return s; });
        def("Integer", "negated", [this, I](const RValue& s, std::vector<RValue>&) -> RValue {
            if (I(s) == std::numeric_limits<Int>::min()) fail("ArithmeticError", "integer overflow");
            return -I(s);
        });
        def("Integer", "bitAnd:", [this, I](const RValue& s, std::vector<RValue>& a) -> RValue { return I(s) & int_arg(a.at(0)); });
        def("Integer", "bitOr:", [this, I](const RValue& s, std::vector<RValue>& a) -> RValue { return I(s) | int_arg(a.at(0)); });
        def("Integer", "bitXor:", [this, I](const RValue& s, std::vector<RValue>& a) -> RValue { return I(s) ^ int_arg(a.at(0)); });
        def("Integer", "printString", [I](const RValue& s, std::vector<RValue>&) -> RValue { return std::to_string(I(s)); });
        def("Integer", "asString", [I](const RValue& s, std::vector<RValue>&) -> RValue { return std::to_string(I(s)); });

        // loops
        auto counting = [this](Int from, Int to, Int by, const RValue& block, bool pass_index) {
            for (Int i = from; by > 0 ? i <= to : i >= to;) {
                if (pass_index) send(block, "value:", {i});
                else send(block, "value", {});
                if (__builtin_add_overflow(i, by, &i)) break;
            }
        };
        def("Integer", "timesRepeat:", [counting, I](const RValue& s, std::vector<RValue>& a) -> RValue {
            counting(1, I(s), 1, a.at(0), false);
            return s;
        });
        def("Integer", "to:do:", [this, counting, I](const RValue& s, std::vector<RValue>& a) -> RValue {
            counting(I(s), int_arg(a.at(0)), 1, a.at(1), true);
            return s;
        });
        def("Integer", "to:by:do:", [this, counting, I](const RValue& s, std::vector<RValue>& a) -> RValue {
            Int to = int_arg(a.at(0));
            const auto* by = std::get_if<Int>(&a.at(1));
            if (!by || *by == 0) fail("Error", "step must be a non-zero Integer");
            counting(I(s), to, *by, a.at(2), true);
            return s;
        });
        auto loop = [this](bool until, bool with_body) {
            return [this, until, with_body](const RValue& s, std::vector<RValue>& a) -> RValue {
                for (;;) {
                    RValue c = send(s, "value", {});
                    const auto* b = std::get_if<bool>(&c);
                    if (!b) fail("Error", "loop condition is not a Boolean");
                    if (*b != until) return RNil{};
                    if (with_body) send(a.at(0), "value", {});
                }
            };
        };
        def("Block", "whileTrue:", loop(true, true));
        def("Block", "whileFalse:", loop(false, true));
        def("Block", "whileTrue", loop(true, false));
        def("Block", "whileFalse", loop(false, false));
        def("Block", "repeat", [this](const RValue& s, std::vector<RValue>&) -> RValue {
            for (;;) send(s, "value", {});
        });

        // booleans
        auto branch = [this](const std::string& c, const std::string& sel, int taken) {
            def(c, sel, [this, taken](const RValue&, std::vector<RValue>& a) -> RValue {
                if (taken < 0) return RNil{};
                return call(a.at(static_cast<std::size_t>(taken)), {});
            });
        };
        branch("True", "ifTrue:", 0);
        branch("True", "ifFalse:", -1);
        branch("True", "ifTrue:ifFalse:", 0);
        branch("True", "ifFalse:ifTrue:", 1);
        branch("False", "ifTrue:", -1);
        branch("False", "ifFalse:", 0);
        branch("False", "ifTrue:ifFalse:", 1);
        branch("False", "ifFalse:ifTrue:", 0);
        def("True", "and:", [this](const RValue&, std::vector<RValue>& a) { return call(a.at(0), {}); });
        def("False", "and:", [](const RValue&, std::vector<RValue>&) -> RValue { return false; });
        def("True", "or:", [](const RValue&, std::vector<RValue>&) -> RValue { return true; });
        def("False", "or:", [this](const RValue&, std::vector<RValue>& a) { return call(a.at(0), {}); });
        def("Boolean", "not", [](const RValue& s, std::vector<RValue>&) -> RValue { return !std::get<bool>(s); });
        auto logical = [this](bool (*fn)(bool, bool)) {
            return [this, fn](const RValue& s, std::vector<RValue>& a) -> RValue {
                const auto* b = std::get_if<bool>(&a.at(0));
                if (!b) type_error("Boolean", a.at(0));
                return fn(std::get<bool>(s), *b);
            };
        };
        def("Boolean", "&", logical([](bool a, bool b) { return a && b; }));
        def("Boolean", "|", logical([](bool a, bool b) { return a || b; }));
        def("Boolean", "xor:", logical([](bool a, bool b) { return a != b; }));

        // blocks
        auto block_of = [](const RValue& s) { return std::get<RObjectPtr>(s); };
        for (const char* sel : {"value", "value:", "value:value:", "value:value:value:", "value:value:value:value:"})
            def("Block", sel, [this, block_of](const RValue& s, std::vector<RValue>& a) { return invoke_block(block_of(s), a); });
        def("Block", "valueWithArguments:", [this, block_of](const RValue& s, std::vector<RValue>& a) {
            RObject* arr = indexed(a.at(0));
            if (!arr) type_error("Array", a.at(0));
            return invoke_block(block_of(s), arr->elements);
        });
        def("Block", "cull:", [this, block_of](const RValue& s, std::vector<RValue>& a) {
            auto b = block_of(s);
            if (b->block->node->names.empty()) return invoke_block(b, {});
            return invoke_block(b, a);
        });
        def("Block", "cull:cull:", [this, block_of](const RValue& s, std::vector<RValue>& a) {
            auto b = block_of(s);
            a.resize(std::min<std::size_t>(b->block->node->names.size(), 2));
            return invoke_block(b, a);
        });
        def("Block", "numArgs", [block_of](const RValue& s, std::vector<RValue>&) -> RValue {
            return static_cast<Int>(block_of(s)->block->node->names.size());
        });
        def("Block", "on:do:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            RValue exc_class = a.at(0), handler = a.at(1);
            try {
                return send(s, "value", {});
            } catch (Signal& sig) {
                const auto* c = std::get_if<RClassRef>(&exc_class);
                if (!c || !class_of(sig.exception)->inherits(c->cls)) throw;
                RValue e = sig.exception;
                return send(handler, "cull:", {e});
            }
        });

        // objects
        def("Object", "==", [](const RValue& s, std::vector<RValue>& a) -> RValue { return s == a.at(0); });
        def("Object", "class", [this](const RValue& s, std::vector<RValue>&) -> RValue { return RClassRef{class_of(s)}; });
        def("Object", "printString", [this](const RValue& s, std::vector<RValue>&) -> RValue { return print(s); });
        def("Object", "displayString", [this](const RValue& s, std::vector<RValue>&) -> RValue { return display(s); });
        def("Object", "asString", [this](const RValue& s, std::vector<RValue>&) -> RValue { return display(s); });
        def("Object", "isKindOf:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            const auto* c = std::get_if<RClassRef>(&a.at(0));
            return c && class_of(s)->inherits(c->cls);
        });
        def("Object", "isMemberOf:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            const auto* c = std::get_if<RClassRef>(&a.at(0));
            return c && class_of(s) == c->cls;
        });
        def("Object", "respondsTo:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            const auto* sym = std::get_if<RSym>(&a.at(0));
            return sym && responds_to(class_of(s), sym->name);
        });
        auto perform = [this](const RValue& s, const RValue& sel, std::vector<RValue> args) -> RValue {
            const auto* sym = std::get_if<RSym>(&sel);
            if (!sym) type_error("Symbol", sel);
            if (arity_of(sym->name) != args.size()) fail("Error", "wrong argument count for #" + sym->name);
            return send(s, sym->name, std::move(args));
        };
        def("Object", "perform:", [perform](const RValue& s, std::vector<RValue>& a) { return perform(s, a.at(0), {}); });
        def("Object", "perform:with:", [perform](const RValue& s, std::vector<RValue>& a) { return perform(s, a.at(0), {a.at(1)}); });
        def("Object", "perform:with:with:",
            [perform](const RValue& s, std::vector<RValue>& a) { return perform(s, a.at(0), {a.at(1), a.at(2)}); });
        def("Object", "perform:withArguments:", [this, perform](const RValue& s, std::vector<RValue>& a) {
            RObject* arr = indexed(a.at(1));
            if (!arr) type_error("Array", a.at(1));
            return perform(s, a.at(0), arr->elements);
        });
        def("Object", "copy", [](const RValue& s, std::vector<RValue>&) -> RValue {
            const auto* o = std::get_if<RObjectPtr>(&s);
            if (!o) return s;
            return std::make_shared<RObject>(**o);
        });
        def("Object", "instVarNamed:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            const auto* o = std::get_if<RObjectPtr>(&s);
            std::string name = display(a.at(0));
            int f = o ? (*o)->cls->field(name) : -1;
            if (f < 0) fail("Error", "no field " + name);
            return (*o)->fields[static_cast<std::size_t>(f)];
        });
        def("Object", "instVarNamed:put:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            const auto* o = std::get_if<RObjectPtr>(&s);
            std::string name = display(a.at(0));
            int f = o ? (*o)->cls->field(name) : -1;
            if (f < 0) fail("Error", "no field " + name);
            (*o)->fields[static_cast<std::size_t>(f)] = a.at(1);
            return a.at(1);
        });

        // classes
        auto C = [](const RValue& s) { return std::get<RClassRef>(s).cls; };
        def("Class", "new", [this, C](const RValue& s, std::vector<RValue>&) -> RValue {
            const RClass* c = C(s);
            static const char* const immediates[] = {"Integer", "String", "Symbol", "Boolean", "True", "False",
                                                     "UndefinedObject", "Block", "Class", "CompiledMethod", "AstNode",
                                                     "ScriptableDebugger", "Context", "Breakpoint", "DebuggerHit"};
            for (const char* n : immediates)
                if (c->name == n || (c->storage == Storage::Closure)) fail("Error", "cannot create instances of " + c->name);
            return alloc(c);
        });
        def("Class", "new:", [this, C](const RValue& s, std::vector<RValue>& a) -> RValue {
            const RClass* c = C(s);
            if (c->storage != Storage::Indexed) fail("Error", c->name + " is not indexable");
            const auto* n = std::get_if<Int>(&a.at(0));
            if (!n || *n < 0 || *n > 1'000'000) type_error("size", a.at(0));
            auto o = alloc(c);
            o->elements.assign(static_cast<std::size_t>(*n), RNil{});
            return o;
        });
        auto with = [this, C](const RValue& s, std::vector<RValue>& a) -> RValue {
            const RClass* c = C(s);
            if (c->storage != Storage::Indexed) fail("Error", c->name + " is not indexable");
            auto o = alloc(c);
            o->elements = a;
            return o;
        };
        for (const char* sel : {"with:", "with:with:", "with:with:with:", "with:with:with:with:"}) def("Class", sel, with);
        def("Class", "withAll:", [this, C](const RValue& s, std::vector<RValue>& a) -> RValue {
            const RClass* c = C(s);
            if (c->storage != Storage::Indexed) fail("Error", c->name + " is not indexable");
            RObject* src = indexed(a.at(0));
            if (!src) type_error("collection", a.at(0));
            auto o = alloc(c);
            o->elements = src->elements;
            return o;
        });
        def("Class", "name", [C](const RValue& s, std::vector<RValue>&) -> RValue { return C(s)->name; });
        def("Class", "superclass", [C](const RValue& s, std::vector<RValue>&) -> RValue {
            if (const RClass* sup = C(s)->super) return RClassRef{sup};
            return RNil{};
        });
        def("Class", "includesSelector:", [this, C](const RValue& s, std::vector<RValue>& a) -> RValue {
            const auto* sym = std::get_if<RSym>(&a.at(0));
            if (!sym) type_error("Symbol", a.at(0));
            return C(s)->methods.count(sym->name) > 0;
        });
        def("Class", "inheritsFrom:", [C](const RValue& s, std::vector<RValue>& a) -> RValue {
            const auto* c = std::get_if<RClassRef>(&a.at(0));
            return c && C(s) != c->cls && C(s)->inherits(c->cls);
        });
        def("Class", "selectors", [this, C](const RValue& s, std::vector<RValue>&) -> RValue {
            std::vector<RValue> out;
            for (const auto& [sel, m] : C(s)->methods) out.push_back(RSym{sel});
            return collection("Array", std::move(out));
        });
        auto class_signal = [this, C](const RValue& s, std::vector<RValue>& a) -> RValue {
            auto o = alloc(C(s));
            if (!a.empty()) o->fields[0] = a[0];
            throw Signal{o};
        };
        def_meta("Exception", "signal", class_signal);
        def_meta("Exception", "signal:", class_signal);
        def_meta("Random", "seed:", [this, C](const RValue& s, std::vector<RValue>& a) {
            return send(alloc(C(s)), "seed:", {a.at(0)});
        });
        def("Exception", "signal", [](const RValue& s, std::vector<RValue>&) -> RValue { throw Signal{s}; });
        def("Exception", "pass", [](const RValue& s, std::vector<RValue>&) -> RValue { throw Signal{s}; });

        // strings
        auto S = [](const RValue& v) -> const std::string& { return std::get<std::string>(v); };
        def("String", "size", [S](const RValue& s, std::vector<RValue>&) -> RValue { return static_cast<Int>(S(s).size()); });
        def("String", "at:", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue {
            Int i = int_arg(a.at(0));
            if (i < 1 || i > static_cast<Int>(S(s).size())) fail("SubscriptOutOfBounds", "index " + std::to_string(i) + " out of bounds");
            return std::string(1, S(s)[static_cast<std::size_t>(i - 1)]);
        });
        def("String", ",", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue { return S(s) + text_of(a.at(0)); });
        def("String", "=", [](const RValue& s, std::vector<RValue>& a) -> RValue { return s == a.at(0); });
        auto scmp = [this, S](bool (*fn)(const std::string&, const std::string&)) {
            return [this, S, fn](const RValue& s, std::vector<RValue>& a) -> RValue {
                const auto* o = std::get_if<std::string>(&a.at(0));
                if (!o) type_error("String", a.at(0));
                return fn(S(s), *o);
            };
        };
        def("String", "<", scmp([](const std::string& a, const std::string& b) { return a < b; }));
        def("String", ">", scmp([](const std::string& a, const std::string& b) { return a > b; }));
        def("String", "<=", scmp([](const std::string& a, const std::string& b) { return a <= b; }));
        def("String", ">=", scmp([](const std::string& a, const std::string& b) { return a >= b; }));
        def("String", "asSymbol", [S](const RValue& s, std::vector<RValue>&) -> RValue { return RSym{S(s)}; });
        def("String", "asString", [](const RValue& s, std::vector<RValue>&) -> RValue { return s; });
        def("String", "includesSubstring:", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue {
            return S(s).find(text_of(a.at(0))) != std::string::npos;
        });
        def("String", "beginsWith:", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue {
            return S(s).rfind(text_of(a.at(0)), 0) == 0;
        });
        def("String", "endsWith:", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue {
            std::string t = text_of(a.at(0));
            return S(s).size() >= t.size() && S(s).compare(S(s).size() - t.size(), t.size(), t) == 0;
        });
        def("String", "match:", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue {
            if (std::holds_alternative<RNil>(a.at(0))) return false;
            try {
                return std::regex_match(text_of(a.at(0)), std::regex(S(s)));
            } catch (const std::regex_error&) {
                fail("Error", "invalid pattern " + S(s));
            }
        });
        def("String", "reversed", [S](const RValue& s, std::vector<RValue>&) -> RValue { return std::string(S(s).rbegin(), S(s).rend()); });
        def("String", "asUppercase", [S](const RValue& s, std::vector<RValue>&) -> RValue {
            std::string r = S(s);
            for (char& c : r) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return r;
        });
        def("String", "asLowercase", [S](const RValue& s, std::vector<RValue>&) -> RValue {
            std::string r = S(s);
            for (char& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return r;
        });
        def("String", "copyFrom:to:", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue {
            Int x = int_arg(a.at(0)), y = int_arg(a.at(1));
            if (y < x) return std::string();
            if (x < 1 || y > static_cast<Int>(S(s).size())) fail("SubscriptOutOfBounds", "range out of bounds");
            return S(s).substr(static_cast<std::size_t>(x - 1), static_cast<std::size_t>(y - x + 1));
        });
        def("String", "indexOf:", [this, S](const RValue& s, std::vector<RValue>& a) -> RValue {
            auto p = S(s).find(text_of(a.at(0)));
            return p == std::string::npos ? Int{0} : static_cast<Int>(p + 1);
        });
        def("String", "asInteger", [S](const RValue& s, std::vector<RValue>&) -> RValue {
            try {
                std::size_t used = 0;
                long long v = std::stoll(S(s), &used);
                if (used == S(s).size()) return static_cast<Int>(v);
            } catch (const std::exception&) {
            }
            return RNil{};
        });
        auto Y = [](const RValue& v) -> const std::string& { return std::get<RSym>(v).name; };
        def("Symbol", "size", [Y](const RValue& s, std::vector<RValue>&) -> RValue { return static_cast<Int>(Y(s).size()); });
        def("Symbol", "=", [](const RValue& s, std::vector<RValue>& a) -> RValue { return s == a.at(0); });
        def("Symbol", "asString", [Y](const RValue& s, std::vector<RValue>&) -> RValue { return Y(s); });
        def("Symbol", "asSymbol", [](const RValue& s, std::vector<RValue>&) -> RValue { return s; });
        def("Symbol", ",", [this, Y](const RValue& s, std::vector<RValue>& a) -> RValue { return Y(s) + text_of(a.at(0)); });
        def("Symbol", "numArgs", [Y](const RValue& s, std::vector<RValue>&) -> RValue { return static_cast<Int>(arity_of(Y(s))); });

        // collections
        auto need = [this](const RValue& s) -> RObject& {
            RObject* o = indexed(s);
            if (!o) fail("Error", print(s) + " is not indexable");
            return *o;
        };
        def("Collection", "size", [need](const RValue& s, std::vector<RValue>&) -> RValue { return static_cast<Int>(need(s).elements.size()); });
        def("Collection", "at:", [this, need](const RValue& s, std::vector<RValue>& a) -> RValue {
            RObject& o = need(s);
            return o.elements[index(o, a.at(0))];
        });
        def("Collection", "at:put:", [this, need](const RValue& s, std::vector<RValue>& a) -> RValue {
            RObject& o = need(s);
            o.elements[index(o, a.at(0))] = a.at(1);
            return a.at(1);
        });
        def("Collection", "asArray", [this, need](const RValue& s, std::vector<RValue>&) -> RValue { return collection("Array", need(s).elements); });
        def("Collection", "asOrderedCollection",
            [this, need](const RValue& s, std::vector<RValue>&) -> RValue { return collection("OrderedCollection", need(s).elements); });
        def("Collection", "indexOf:", [need](const RValue& s, std::vector<RValue>& a) -> RValue {
            auto& el = need(s).elements;
            auto it = std::find(el.begin(), el.end(), a.at(0));
            return it == el.end() ? Int{0} : static_cast<Int>(it - el.begin() + 1);
        });
        def("OrderedCollection", "add:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            indexed(s)->elements.push_back(a.at(0));
            return a.at(0);
        });
        def("OrderedCollection", "addFirst:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            auto& el = indexed(s)->elements;
            el.insert(el.begin(), a.at(0));
            return a.at(0);
        });
        def("OrderedCollection", "removeFirst", [this](const RValue& s, std::vector<RValue>&) -> RValue {
            auto& el = indexed(s)->elements;
            if (el.empty()) fail("Error", "collection is empty");
            RValue v = el.front();
            el.erase(el.begin());
            return v;
        });
        def("OrderedCollection", "removeLast", [this](const RValue& s, std::vector<RValue>&) -> RValue {
            auto& el = indexed(s)->elements;
            if (el.empty()) fail("Error", "collection is empty");
            RValue v = el.back();
            el.pop_back();
            return v;
        });
        def("OrderedCollection", "remove:", [this](const RValue& s, std::vector<RValue>& a) -> RValue {
            auto& el = indexed(s)->elements;
            auto it = std::find(el.begin(), el.end(), a.at(0));
            if (it == el.end()) fail("Error", "object not found");
            el.erase(it);
            return a.at(0);
        });
        auto entry = [](RObject& d, const RValue& k) {
            return std::find_if(d.entries.begin(), d.entries.end(), [&](const auto& kv) { return kv.first == k; });
        };
        def("Dictionary", "at:put:", [this, entry](const RValue& s, std::vector<RValue>& a) -> RValue {
            RObject& d = dict(s);
            auto it = entry(d, a.at(0));
            if (it != d.entries.end()) it->second = a.at(1);
            else d.entries.emplace_back(a.at(0), a.at(1));
            return a.at(1);
        });
        def("Dictionary", "at:", [this, entry](const RValue& s, std::vector<RValue>& a) -> RValue {
            RObject& d = dict(s);
            auto it = entry(d, a.at(0));
            if (it == d.entries.end()) fail("KeyNotFound", "key not found: " + print(a.at(0)));
            return it->second;
        });
        def("Dictionary", "includesKey:", [this, entry](const RValue& s, std::vector<RValue>& a) -> RValue {
            RObject& d = dict(s);
            return entry(d, a.at(0)) != d.entries.end();
        });
        def("Dictionary", "removeKey:", [this, entry](const RValue& s, std::vector<RValue>& a) -> RValue {
            RObject& d = dict(s);
            auto it = entry(d, a.at(0));
            if (it == d.entries.end()) fail("KeyNotFound", "key not found: " + print(a.at(0)));
            RValue v = it->second;
            d.entries.erase(it);
            return v;
        });
        def("Dictionary", "size", [this](const RValue& s, std::vector<RValue>&) -> RValue { return static_cast<Int>(dict(s).entries.size()); });
        def("Dictionary", "keys", [this](const RValue& s, std::vector<RValue>&) -> RValue {
            std::vector<RValue> out;
            for (const auto& kv : dict(s).entries) out.push_back(kv.first);
            return collection("Array", std::move(out));
        });
        def("Dictionary", "values", [this](const RValue& s, std::vector<RValue>&) -> RValue {
            std::vector<RValue> out;
            for (const auto& kv : dict(s).entries) out.push_back(kv.second);
            return collection("Array", std::move(out));
        });

        // transcript
        auto show = [this](const RValue&, std::vector<RValue>& a) -> RValue {
            output += text_of(a.at(0));
            return transcript;
        };
        def("TranscriptStream", "show:", show);
        def("TranscriptStream", "nextPutAll:", show);
        for (auto [sel, text] : {std::pair{"cr", "\n"}, std::pair{"tab", "\t"}, std::pair{"space", " "}})
            def("TranscriptStream", sel, [this, t = std::string(text)](const RValue&, std::vector<RValue>&) -> RValue {
                output += t;
                return transcript;
            });
    }

    // Main's slots: declared temporaries, then names assigned without a
    // declaration, in first-assignment order (workspace variables).
    static void implicit_temps(const Node& n, std::vector<std::vector<std::string>>& scopes, std::vector<std::string>& out) {
        auto declared = [&](const std::string& name) {
            for (const auto& s : scopes)
                if (std::find(s.begin(), s.end(), name) != s.end()) return true;
            return std::find(out.begin(), out.end(), name) != out.end();
        };
        if (n.kind == NodeKind::Block) {
            std::vector<std::string> names = n.names;
            auto t = temps_of(n.child(0));
            names.insert(names.end(), t.begin(), t.end());
            scopes.push_back(names);
            implicit_temps(n.child(0), scopes, out);
            scopes.pop_back();
            return;
        }
        if (n.kind == NodeKind::Assignment && !declared(n.name)) out.push_back(n.name);
        for (const auto& c : n.children) implicit_temps(*c, scopes, out);
    }

    Outcome run(const std::string& source) {
        sindarin::lumen::ParseOptions po;
        po.unit = "<prelude>";
        prelude_ast = sindarin::lumen::parse_program(sindarin::lumen::prelude_source(), po);
        user_ast = sindarin::lumen::parse_program(source);
        load_classes(*prelude_ast, true);
        load_classes(*user_ast, false);
        install();
        transcript = alloc(&cls("TranscriptStream"));

        const Node& main = user_ast->main();
        auto act = std::make_shared<Activation>();
        act->name = "<main>";
        auto env = std::make_shared<Env>();
        env->names = temps_of(main);
        std::vector<std::vector<std::string>> scopes{env->names};
        std::vector<std::string> implicit;
        implicit_temps(main, scopes, implicit);
        env->names.insert(env->names.end(), implicit.begin(), implicit.end());
        env->values.assign(env->names.size(), RNil{});
        env->self = RNil{};
        env->home = act;

        Outcome out;
        try {
            bool returned = false;
            RValue result = sequence(main, env, false, true, returned);
            Canonical ser;
            out.result = print(result);
            out.digest = "result=" + ser(result);
            for (std::size_t i = 0; i < env->names.size(); ++i) out.digest += ";" + env->names[i] + "=" + ser(env->values[i]);
        } catch (Signal& sig) {
            out.failed = true;
            out.failure = failure_reason(sig.exception);
            out.result = "nil";
            out.digest = "result=nil";
        }
        act->alive = false;
        out.output = output;
        return out;
    }
};

Evaluator::Evaluator(std::int64_t seed) : impl_(std::make_unique<Impl>(*this, seed)) {}
Evaluator::~Evaluator() = default;

Outcome Evaluator::run(const std::string& source) { return impl_->run(source); }
const std::string& Evaluator::output() const { return impl_->output; }

Outcome evaluate(const std::string& source, std::int64_t seed) {
    Evaluator e(seed);
    return e.run(source);
}

} // namespace refeval
