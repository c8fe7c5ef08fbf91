#include "sindarin/lumen/compiler.hpp"

#include "sindarin/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sindarin::lumen {

std::string_view to_string(Opcode op) {
    switch (op) {
    case Opcode::PushSelf: return "push_self";
    case Opcode::PushLiteral: return "push_literal";
    case Opcode::PushTemp: return "push_temp";
    case Opcode::StoreTemp: return "store_temp";
    case Opcode::PushField: return "push_field";
    case Opcode::StoreField: return "store_field";
    case Opcode::PushGlobal: return "push_global";
    case Opcode::Send: return "send";
    case Opcode::SendSuper: return "send_super";
    case Opcode::MakeBlock: return "make_block";
    case Opcode::ReturnTop: return "return_top";
    case Opcode::Pop: return "pop";
    }
    return "?";
}

// -- CompiledMethod / ClassInfo / CompiledProgram -----------------------------

const std::string& CompiledMethod::selector_at(std::size_t literal) const {
    return std::get<Symbol>(literals.at(literal)).name;
}

std::string CompiledMethod::class_name() const { return owner ? owner->name : std::string(); }

std::string CompiledMethod::print_name() const {
    switch (kind) {
    case MethodKind::Main: return "<main>";
    case MethodKind::Block: return "[] in " + (home ? home->print_name() : std::string("?"));
    default: return class_name() + ">>" + selector;
    }
}

std::uint64_t CompiledMethod::checksum() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (i * 8)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (const auto& ins : code) {
        mix(static_cast<std::uint64_t>(ins.op));
        mix(ins.a);
        mix(ins.b);
    }
    for (const auto& b : blocks) mix(b->checksum());
    return h;
}

const Node& node_for_pc(const CompiledMethod& method, std::size_t pc) {
    if (pc >= method.pc_to_node.size())
        throw Error(ErrorCode::PcOutOfRange, "pc " + std::to_string(pc) + " outside " + method.print_name());
    return *method.pc_to_node[pc];
}

std::vector<std::size_t> pcs_for_node(const CompiledMethod& method, const Node& node) {
    const Node* n = &node;
    while (n && n != method.home_ast) n = n->parent;
    if (!n) throw Error(ErrorCode::NodeNotInMethod, "node " + std::to_string(node.id) + " is not in " + method.print_name());
    auto it = method.node_to_pcs.find(node.id);
    if (it == method.node_to_pcs.end() || method.pc_to_node[it->second.front()] != &node) return {};
    return it->second;
}

const CompiledMethod* ClassInfo::lookup(std::string_view selector) const {
    for (const ClassInfo* c = this; c; c = c->superclass) {
        auto it = c->methods.find(selector);
        if (it != c->methods.end()) return it->second;
    }
    return nullptr;
}

bool ClassInfo::inherits_from(const ClassInfo* other) const {
    for (const ClassInfo* c = this; c; c = c->superclass)
        if (c == other) return true;
    return false;
}

int ClassInfo::field_index(std::string_view field) const {
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i] == field) return static_cast<int>(i);
    return -1;
}

const ClassInfo* CompiledProgram::find_class(std::string_view name) const {
    for (const auto& c : classes)
        if (c->name == name) return c.get();
    return base ? base->find_class(name) : nullptr;
}

const CompiledMethod* CompiledProgram::method_containing(const Node& node) const {
    for (const Node* n = &node; n; n = n->parent) {
        auto it = node_owner.find(n);
        if (it != node_owner.end()) return it->second;
    }
    return base ? base->method_containing(node) : nullptr;
}

const CompiledMethod* CompiledProgram::method_for_def(const Node& def) const {
    auto it = node_owner.find(&def);
    if (it != node_owner.end()) return it->second;
    return base ? base->method_for_def(def) : nullptr;
}

void CompiledProgram::for_each_method(const std::function<void(const CompiledMethod&)>& fn) const {
    auto walk = [&](auto& self, const CompiledMethod& m) -> void {
        fn(m);
        for (const auto& b : m.blocks) self(self, *b);
    };
    for (const auto& c : classes)
        for (const auto& m : c->owned_methods) walk(walk, *m);
    if (main) walk(walk, *main);
}

// -- compilation --------------------------------------------------------------

namespace {

[[noreturn]] void compile_error(const std::string& message, const Node& at) {
    throw Error(ErrorCode::CompileError, message, ErrorSpan{at.span.start, at.span.end});
}

struct Scope {
    Scope* outer = nullptr;
    CompiledMethod* method = nullptr;
    std::vector<std::string> names;  // slot order
    std::size_t num_args = 0;

    int slot(std::string_view name) const {
        for (std::size_t i = names.size(); i-- > 0;)
            if (names[i] == name) return static_cast<int>(i);
        return -1;
    }
};

struct Resolved {
    enum Kind { Temp, Field, Global } kind = Global;
    std::uint32_t slot = 0;
    std::uint32_t depth = 0;
    bool is_argument = false;
};

// Names assigned in main without a declaration become implicit temporaries of
// main, as in a workspace.
void collect_implicit_temps(const Node& n, std::vector<std::vector<std::string>>& scopes,
                            std::vector<std::string>& implicit) {
    auto declared = [&](const std::string& name) {
        for (const auto& s : scopes)
            if (std::find(s.begin(), s.end(), name) != s.end()) return true;
        return std::find(implicit.begin(), implicit.end(), name) != implicit.end();
    };
    if (n.kind == NodeKind::Block) {
        std::vector<std::string> names = n.names;
        for (const auto& c : n.child(0).children)
            if (c->kind == NodeKind::TempDecl) names.insert(names.end(), c->names.begin(), c->names.end());
        scopes.push_back(std::move(names));
        collect_implicit_temps(n.child(0), scopes, implicit);
        scopes.pop_back();
        return;
    }
    if (n.kind == NodeKind::Assignment && !declared(n.name)) implicit.push_back(n.name);
    for (const auto& c : n.children) collect_implicit_temps(*c, scopes, implicit);
}

class MethodCompiler {
public:
    MethodCompiler(CompiledProgram& program, const ClassInfo* cls, CompiledMethod& method, Scope& scope)
        : program_(program), class_(cls), method_(method), scope_(scope) {}

    void body(const Node& seq, const std::vector<std::string>& implicit = {}) {
        declare_temps(seq);
        for (const auto& name : implicit)
            if (scope_.slot(name) < 0) scope_.names.push_back(name);
        std::vector<const Node*> statements;
        for (const auto& c : seq.children)
            if (c->kind != NodeKind::TempDecl) statements.push_back(c.get());
        bool keep_last = method_.answers_last_value();
        for (std::size_t i = 0; i < statements.size(); ++i) {
            const Node& st = *statements[i];
            statement(st);
            bool last = i + 1 == statements.size();
            if (st.kind == NodeKind::Return) continue;
            if (!(last && keep_last)) emit(Opcode::Pop, 0, 0, seq);
        }
        method_.num_temps = scope_.names.size() - scope_.num_args;
        method_.slot_names = scope_.names;
    }

private:
    void declare_temps(const Node& seq) {
        for (const auto& c : seq.children) {
            if (c->kind != NodeKind::TempDecl) continue;
            for (const auto& name : c->names) {
                if (scope_.slot(name) >= 0) compile_error("duplicate temporary " + name, *c);
                scope_.names.push_back(name);
            }
        }
    }

    void emit(Opcode op, std::uint32_t a, std::uint32_t b, const Node& node) {
        std::size_t pc = method_.code.size();
        method_.code.push_back({op, a, b});
        method_.pc_to_node.push_back(&node);
        method_.node_to_pcs[node.id].push_back(pc);
        method_.depth_before.push_back(depth_);
        switch (op) {
        case Opcode::PushSelf:
        case Opcode::PushLiteral:
        case Opcode::PushTemp:
        case Opcode::PushField:
        case Opcode::PushGlobal:
        case Opcode::MakeBlock: ++depth_; break;
        case Opcode::Send:
        case Opcode::SendSuper: depth_ -= b; break;
        case Opcode::ReturnTop:
        case Opcode::Pop: --depth_; break;
        case Opcode::StoreTemp:
        case Opcode::StoreField: break;
        }
    }

    std::uint32_t literal(const LiteralValue& v) {
        auto& lits = method_.literals;
        for (std::size_t i = 0; i < lits.size(); ++i)
            if (lits[i] == v) return static_cast<std::uint32_t>(i);
        lits.push_back(v);
        return static_cast<std::uint32_t>(lits.size() - 1);
    }

    Resolved resolve(const std::string& name) const {
        std::uint32_t depth = 0;
        for (const Scope* s = &scope_; s; s = s->outer, ++depth) {
            int slot = s->slot(name);
            if (slot >= 0) {
                Resolved r;
                r.kind = Resolved::Temp;
                r.slot = static_cast<std::uint32_t>(slot);
                r.depth = depth;
                r.is_argument = static_cast<std::size_t>(slot) < s->num_args;
                return r;
            }
        }
        if (class_) {
            int f = class_->field_index(name);
            if (f >= 0) {
                Resolved r;
                r.kind = Resolved::Field;
                r.slot = static_cast<std::uint32_t>(f);
                return r;
            }
        }
        return {};
    }

    void statement(const Node& st) {
        if (st.kind == NodeKind::Return) {
            bool in_block = method_.kind == MethodKind::Block;
            if (method_.kind == MethodKind::Main) compile_error("^ is not allowed at the top level of main", st);
            if (in_block && home_is_main()) compile_error("^ inside a block of main has no method to return from", st);
            expression(st.child(0));
            emit(Opcode::ReturnTop, in_block ? 1 : 0, 0, st);
            return;
        }
        expression(st);
    }

    bool home_is_main() const {
        const Scope* s = &scope_;
        while (s->outer) s = s->outer;
        return s->method->kind == MethodKind::Main;
    }

    void expression(const Node& n) {
        switch (n.kind) {
        case NodeKind::Literal: emit(Opcode::PushLiteral, literal(n.literal), 0, n); break;
        case NodeKind::SelfRef: emit(Opcode::PushSelf, 0, 0, n); break;
        case NodeKind::VariableRead: {
            Resolved r = resolve(n.name);
            if (r.kind == Resolved::Temp) emit(Opcode::PushTemp, r.slot, r.depth, n);
            else if (r.kind == Resolved::Field) emit(Opcode::PushField, r.slot, 0, n);
            else emit(Opcode::PushGlobal, literal(Symbol{n.name}), 0, n);
            break;
        }
        case NodeKind::Assignment: {
            Resolved r = resolve(n.name);
            if (r.kind == Resolved::Global) compile_error("assignment to undeclared variable " + n.name, n);
            if (r.is_argument) compile_error("cannot assign to argument " + n.name, n);
            expression(n.child(0));
            if (r.kind == Resolved::Temp) emit(Opcode::StoreTemp, r.slot, r.depth, n);
            else emit(Opcode::StoreField, r.slot, 0, n);
            break;
        }
        case NodeKind::Message: {
            for (const auto& c : n.children) expression(*c);
            std::uint32_t argc = static_cast<std::uint32_t>(n.children.size() - 1);
            emit(n.is_super ? Opcode::SendSuper : Opcode::Send, literal(Symbol{n.name}), argc, n);
            break;
        }
        case NodeKind::Block: {
            auto blk = std::make_unique<CompiledMethod>();
            blk->kind = MethodKind::Block;
            blk->selector = "[]";
            blk->owner = method_.owner;
            blk->home = method_.kind == MethodKind::Block ? method_.home : &method_;
            blk->num_args = n.names.size();
            blk->home_ast = &n;
            Scope inner;
            inner.outer = &scope_;
            inner.method = blk.get();
            inner.names = n.names;
            inner.num_args = n.names.size();
            MethodCompiler(program_, class_, *blk, inner).body(n.child(0));
            program_.node_owner[&n] = blk.get();
            method_.blocks.push_back(std::move(blk));
            emit(Opcode::MakeBlock, static_cast<std::uint32_t>(method_.blocks.size() - 1), 0, n);
            break;
        }
        case NodeKind::Return: compile_error("^ is only allowed as a statement", n);
        default: compile_error(std::string("unexpected ") + std::string(to_string(n.kind)), n);
        }
    }

    CompiledProgram& program_;
    const ClassInfo* class_;
    CompiledMethod& method_;
    Scope& scope_;
    std::uint32_t depth_ = 0;
};

StorageKind builtin_storage(std::string_view name) {
    if (name == "Array" || name == "OrderedCollection") return StorageKind::Indexed;
    if (name == "Dictionary") return StorageKind::Dictionary;
    if (name == "Block") return StorageKind::Closure;
    if (name == "ScriptableDebugger" || name == "Context" || name == "Breakpoint" || name == "DebuggerHit")
        return StorageKind::Foreign;
    return StorageKind::Plain;
}

} // namespace

std::shared_ptr<const CompiledProgram> compile(std::shared_ptr<const Program> program,
                                               std::shared_ptr<const CompiledProgram> base) {
    auto out = std::make_shared<CompiledProgram>();
    out->ast = program;
    out->base = base;

    // Classes: create, then link superclasses in dependency order.
    std::vector<const Node*> defs = program->classes();
    for (const Node* def : defs) {
        if (base && base->find_class(def->name))
            compile_error("class " + def->name + " is already defined by the prelude", *def);
        auto info = std::make_unique<ClassInfo>();
        info->name = def->name;
        info->definition = def;
        out->classes.push_back(std::move(info));
    }
    std::set<const ClassInfo*> linked;
    auto link = [&](auto& self, ClassInfo& info, int guard) -> void {
        if (linked.count(&info)) return;
        const Node& def = *info.definition;
        if (guard > static_cast<int>(defs.size())) compile_error("cyclic superclass chain at " + info.name, def);
        bool root = !base && def.superclass == "Object" && info.name == "Object";
        if (!root) {
            const ClassInfo* super = out->find_class(def.superclass);
            if (!super) compile_error("unknown superclass " + def.superclass, def);
            for (auto& c : out->classes)
                if (c.get() == super) self(self, *c, guard + 1);
            info.superclass = super;
            info.fields = super->fields;
            info.storage = super->storage;
        }
        if (!base) {
            StorageKind k = builtin_storage(info.name);
            if (k != StorageKind::Plain) info.storage = k;
        }
        for (const auto& f : def.names) {
            if (info.field_index(f) >= 0) compile_error("field " + f + " already defined in a superclass", def);
            info.fields.push_back(f);
        }
        linked.insert(&info);
    };
    for (auto& c : out->classes) link(link, *c, 0);

    for (auto& c : out->classes) {
        for (const auto& mdef : c->definition->children) {
            auto m = std::make_unique<CompiledMethod>();
            m->selector = mdef->name;
            m->kind = MethodKind::Method;
            m->owner = c.get();
            m->num_args = mdef->names.size();
            m->home_ast = mdef.get();
            Scope scope;
            scope.method = m.get();
            scope.names = mdef->names;
            scope.num_args = mdef->names.size();
            MethodCompiler(*out, c.get(), *m, scope).body(mdef->child(0));
            out->node_owner[mdef.get()] = m.get();
            c->methods[m->selector] = m.get();
            c->owned_methods.push_back(std::move(m));
        }
    }

    auto main = std::make_unique<CompiledMethod>();
    main->selector = "<main>";
    main->kind = MethodKind::Main;
    main->home_ast = &program->main();
    std::vector<std::vector<std::string>> scopes(1);
    for (const auto& c : program->main().children)
        if (c->kind == NodeKind::TempDecl) scopes[0].insert(scopes[0].end(), c->names.begin(), c->names.end());
    std::vector<std::string> implicit;
    collect_implicit_temps(program->main(), scopes, implicit);
    Scope scope;
    scope.method = main.get();
    MethodCompiler(*out, nullptr, *main, scope).body(program->main(), implicit);
    out->node_owner[&program->main()] = main.get();
    out->main = std::move(main);
    return out;
}

std::shared_ptr<const CompiledProgram> compile_source(std::string source, std::string unit) {
    ParseOptions opts;
    opts.unit = std::move(unit);
    return compile(parse_program(std::move(source), opts), prelude());
}

std::string dump_method(const CompiledMethod& method) {
    std::ostringstream out;
    out << method.print_name() << " args=" << method.num_args << " temps=" << method.num_temps << "\n";
    for (std::size_t pc = 0; pc < method.code.size(); ++pc) {
        const auto& ins = method.code[pc];
        std::ostringstream line;
        line << "  " << pc << " " << to_string(ins.op);
        switch (ins.op) {
        case Opcode::PushLiteral: line << " " << literal_print_string(method.literals[ins.a]); break;
        case Opcode::PushGlobal: line << " " << std::get<Symbol>(method.literals[ins.a]).name; break;
        case Opcode::PushTemp:
        case Opcode::StoreTemp: line << " " << ins.a << "@" << ins.b; break;
        case Opcode::PushField:
        case Opcode::StoreField: line << " " << ins.a; break;
        case Opcode::Send:
        case Opcode::SendSuper: line << " #" << method.selector_at(ins.a) << "/" << ins.b; break;
        case Opcode::MakeBlock: line << " " << ins.a; break;
        case Opcode::ReturnTop: if (ins.a) line << " nonlocal"; break;
        default: break;
        }
        std::string text = line.str();
        if (text.size() < 32) text.resize(32, ' ');
        const Node& n = *method.pc_to_node[pc];
        out << text << " ; " << n.id << " " << to_string(n.kind) << " [" << n.span.start << "," << n.span.end << ")\n";
    }
    for (const auto& b : method.blocks) out << dump_method(*b);
    return out.str();
}

std::string dump_bytecode(const CompiledProgram& program) {
    std::string out;
    for (const auto& c : program.classes)
        for (const auto& m : c->owned_methods) out += dump_method(*m);
    if (program.main) out += dump_method(*program.main);
    return out;
}

} // namespace sindarin::lumen
