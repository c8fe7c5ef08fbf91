#include "sindarin/lumen/ast.hpp"

#include "sindarin/error.hpp"

#include <cctype>
#include <cstring>

namespace sindarin::lumen {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::Program: return "Program";
    case NodeKind::ClassDef: return "ClassDef";
    case NodeKind::MethodDef: return "MethodDef";
    case NodeKind::Block: return "Block";
    case NodeKind::Sequence: return "Sequence";
    case NodeKind::Return: return "Return";
    case NodeKind::Assignment: return "Assignment";
    case NodeKind::Message: return "Message";
    case NodeKind::VariableRead: return "VariableRead";
    case NodeKind::Literal: return "Literal";
    case NodeKind::TempDecl: return "TempDecl";
    case NodeKind::SelfRef: return "SelfRef";
    }
    return "?";
}

std::size_t selector_arity(std::string_view selector) {
    if (selector.empty()) return 0;
    char c = selector.front();
    bool word = std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    if (!word) return 1;
    std::size_t colons = 0;
    for (char ch : selector)
        if (ch == ':') ++colons;
    return colons;
}

Program::Program(std::string unit, std::string source, std::unique_ptr<Node> root)
    : unit_(std::move(unit)), source_(std::move(source)), root_(std::move(root)) {}

void Program::number(NodeId first_id) {
    nodes_.clear();
    NodeId next = first_id;
    auto walk = [&](auto& self, Node& n, const Node* parent) -> void {
        n.id = next++;
        n.parent = parent;
        nodes_.push_back(&n);
        for (auto& c : n.children) self(self, *c, &n);
    };
    walk(walk, *root_, nullptr);
}

std::vector<const Node*> Program::classes() const {
    std::vector<const Node*> out;
    for (const auto& c : root_->children)
        if (c->kind == NodeKind::ClassDef) out.push_back(c.get());
    return out;
}

const Node* Program::find(NodeId id) const {
    if (nodes_.empty() || id < nodes_.front()->id) return nullptr;
    std::size_t index = id - nodes_.front()->id;
    return index < nodes_.size() ? nodes_[index] : nullptr;
}

std::string_view Program::excerpt(const SourceSpan& span) const {
    std::string_view s = source_;
    if (span.start >= s.size()) return {};
    return s.substr(span.start, std::min<std::size_t>(span.end, s.size()) - span.start);
}

const Node& node_at(const Program& program, std::uint32_t offset) {
    if (offset >= program.source().size())
        throw Error(ErrorCode::OffsetOutOfRange,
                    "offset " + std::to_string(offset) + " outside source of length " +
                        std::to_string(program.source().size()));
    const Node* best = &program.root();
    for (;;) {
        const Node* next = nullptr;
        for (const auto& c : best->children) {
            if (c->span.contains(offset)) {
                next = c.get();
                break;
            }
        }
        if (!next) return *best;
        best = next;
    }
}

NodeKind classify_node(const Node& node) { return node.kind; }

void visit(const Node& node, NodeVisitor& v) {
    switch (node.kind) {
    case NodeKind::Program: v.visit_program(node); break;
    case NodeKind::ClassDef: v.visit_class_def(node); break;
    case NodeKind::MethodDef: v.visit_method_def(node); break;
    case NodeKind::Block: v.visit_block(node); break;
    case NodeKind::Sequence: v.visit_sequence(node); break;
    case NodeKind::Return: v.visit_return(node); break;
    case NodeKind::Assignment: v.visit_assignment(node); break;
    case NodeKind::Message: v.visit_message(node); break;
    case NodeKind::VariableRead: v.visit_variable_read(node); break;
    case NodeKind::Literal: v.visit_literal(node); break;
    case NodeKind::TempDecl: v.visit_temp_decl(node); break;
    case NodeKind::SelfRef: v.visit_self_ref(node); break;
    }
}

bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.name != b.name || a.names != b.names || a.superclass != b.superclass ||
        a.is_super != b.is_super || a.children.size() != b.children.size())
        return false;
    if (a.kind == NodeKind::Literal && !(a.literal == b.literal)) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

std::string literal_print_string(const LiteralValue& value) {
    struct {
        std::string operator()(Nil) const { return "nil"; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(const std::string& s) const {
            std::string out = "'";
            for (char c : s) {
                if (c == '\'') out += "''";
                else out.push_back(c);
            }
            return out + "'";
        }
        std::string operator()(const Symbol& s) const {
            bool plain = !s.name.empty();
            for (char c : s.name)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':')) plain = false;
            if (plain && std::isdigit(static_cast<unsigned char>(s.name.front()))) plain = false;
            bool binary = !s.name.empty();
            for (char c : s.name)
                if (!std::strchr("+-*/\\<>=~,@%&?!|", c)) binary = false;
            if (plain || binary) return "#" + s.name;
            return "#" + (*this)(s.name);
        }
    } print;
    return std::visit(print, value);
}

} // namespace sindarin::lumen
