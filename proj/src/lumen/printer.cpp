#include "sindarin/lumen/ast.hpp"

#include <cctype>
#include <sstream>

namespace sindarin::lumen {

namespace {

// Precedence levels: 0 primary, 1 unary, 2 binary, 3 keyword, 4 assignment.
int level(const Node& n) {
    switch (n.kind) {
    case NodeKind::Message: {
        const std::string& sel = n.name;
        if (sel.back() == ':') return 3;
        char c = sel.front();
        return (std::isalpha(static_cast<unsigned char>(c)) || c == '_') ? 1 : 2;
    }
    case NodeKind::Assignment: return 4;
    default: return 0;
    }
}

void print_expr(std::ostream& out, const Node& n, int max_level);

void print_sequence(std::ostream& out, const Node& seq) {
    bool first = true;
    for (const auto& c : seq.children) {
        if (c->kind == NodeKind::TempDecl) {
            out << "| ";
            for (const auto& name : c->names) out << name << ' ';
            out << "| ";
            continue;
        }
        if (!first) out << ". ";
        first = false;
        if (c->kind == NodeKind::Return) {
            out << "^";
            print_expr(out, c->child(0), 4);
        } else {
            print_expr(out, *c, 4);
        }
    }
}

void print_message(std::ostream& out, const Node& n) {
    int lv = level(n);
    print_expr(out, n.child(0), lv == 3 ? 2 : lv);
    if (lv == 1) {
        out << ' ' << n.name;
        return;
    }
    if (lv == 2) {
        out << ' ' << n.name << ' ';
        print_expr(out, n.child(1), 1);
        return;
    }
    std::size_t part = 0;
    std::size_t pos = 0;
    while (pos < n.name.size()) {
        std::size_t colon = n.name.find(':', pos);
        out << ' ' << n.name.substr(pos, colon - pos + 1) << ' ';
        print_expr(out, n.child(1 + part), 2);
        ++part;
        pos = colon + 1;
    }
}

void print_expr(std::ostream& out, const Node& n, int max_level) {
    bool paren = level(n) > max_level;
    if (paren) out << '(';
    switch (n.kind) {
    case NodeKind::Literal: out << literal_print_string(n.literal); break;
    case NodeKind::VariableRead: out << n.name; break;
    case NodeKind::SelfRef: out << (n.is_super ? "super" : "self"); break;
    case NodeKind::Assignment:
        out << n.name << " := ";
        print_expr(out, n.child(0), 4);
        break;
    case NodeKind::Message: print_message(out, n); break;
    case NodeKind::Block:
        out << '[';
        for (const auto& p : n.names) out << ':' << p << ' ';
        if (!n.names.empty()) out << "| ";
        print_sequence(out, n.child(0));
        out << ']';
        break;
    default: out << "<" << to_string(n.kind) << ">"; break;
    }
    if (paren) out << ')';
}

void print_method(std::ostream& out, const Node& m) {
    out << "  method ";
    std::size_t arity = m.names.size();
    if (arity == 0) {
        out << m.name;
    } else if (selector_arity(m.name) == 1 && m.name.back() != ':') {
        out << m.name << ' ' << m.names[0];
    } else {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < arity; ++i) {
            std::size_t colon = m.name.find(':', pos);
            out << m.name.substr(pos, colon - pos + 1) << ' ' << m.names[i] << ' ';
            pos = colon + 1;
        }
    }
    out << " { ";
    print_sequence(out, m.child(0));
    out << " }\n";
}

} // namespace

std::string print_node(const Node& node) {
    std::ostringstream out;
    switch (node.kind) {
    case NodeKind::Sequence: print_sequence(out, node); break;
    case NodeKind::MethodDef: print_method(out, node); break;
    case NodeKind::Return:
        out << "^";
        print_expr(out, node.child(0), 4);
        break;
    default: print_expr(out, node, 4); break;
    }
    return out.str();
}

std::string print_program(const Program& program) {
    std::ostringstream out;
    for (const Node* cls : program.classes()) {
        out << "class " << cls->name << " extends " << cls->superclass << " {\n";
        if (!cls->names.empty()) {
            out << "  fields";
            for (const auto& f : cls->names) out << ' ' << f;
            out << ".\n";
        }
        for (const auto& m : cls->children) print_method(out, *m);
        out << "}\n";
    }
    print_sequence(out, program.main());
    out << '\n';
    return out.str();
}

} // namespace sindarin::lumen
