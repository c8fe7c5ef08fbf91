#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sindarin::lumen {

using NodeId = std::uint32_t;

/// Byte range [start, end) into a source unit.
struct SourceSpan {
    std::uint32_t start = 0;
    std::uint32_t end = 0;

    bool contains(std::uint32_t offset) const { return start <= offset && offset < end; }
    bool encloses(const SourceSpan& other) const { return start <= other.start && other.end <= end; }
    std::uint32_t length() const { return end - start; }
    bool operator==(const SourceSpan&) const = default;
};

struct Nil {
    bool operator==(const Nil&) const = default;
};

struct Symbol {
    std::string name;
    bool operator==(const Symbol&) const = default;
};

using LiteralValue = std::variant<Nil, bool, std::int64_t, std::string, Symbol>;

enum class NodeKind {
    Program,
    ClassDef,
    MethodDef,
    Block,
    Sequence,
    Return,
    Assignment,
    Message,
    VariableRead,
    Literal,
    TempDecl,
    SelfRef,
};

inline constexpr NodeKind kAllNodeKinds[] = {
    NodeKind::Program,  NodeKind::ClassDef,   NodeKind::MethodDef,    NodeKind::Block,
    NodeKind::Sequence, NodeKind::Return,     NodeKind::Assignment,   NodeKind::Message,
    NodeKind::VariableRead, NodeKind::Literal, NodeKind::TempDecl,    NodeKind::SelfRef,
};

std::string_view to_string(NodeKind kind);

/// Number of arguments a selector takes: keywords count colons, binary selectors take one.
std::size_t selector_arity(std::string_view selector);

/// A syntax node. Identity (id) is unique within its Program and never changes.
///
/// Payload by kind:
///   Message       name = selector, children = [receiver, args...], is_super
///   Assignment    name = variable, children = [value]
///   VariableRead  name = variable
///   Literal       literal
///   TempDecl      names = declared temporaries
///   Block         names = parameters, children = [Sequence]
///   MethodDef     name = selector, names = parameters, children = [Sequence]
///   ClassDef      name = class, superclass, names = fields, children = methods
///   Return        children = [expression]
///   Sequence      children = [TempDecl?, statements...]
///   Program       children = [ClassDef..., main Sequence]
///   SelfRef       is_super when written as `super`
struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Literal;
    SourceSpan span;
    std::vector<std::unique_ptr<Node>> children;
    std::string name;
    std::vector<std::string> names;
    std::string superclass;
    LiteralValue literal;
    bool is_super = false;
    const Node* parent = nullptr;

    bool is(NodeKind k) const { return kind == k; }
    const Node& child(std::size_t i) const { return *children.at(i); }
};

struct ParseOptions {
    std::string unit = "<main>";
    NodeId first_id = 0;
};

class Program {
public:
    Program(std::string unit, std::string source, std::unique_ptr<Node> root);

    const std::string& unit() const { return unit_; }
    const std::string& source() const { return source_; }
    const Node& root() const { return *root_; }
    const Node& main() const { return *root_->children.back(); }
    std::vector<const Node*> classes() const;

    /// All nodes in pre-order; ids are consecutive from first_id().
    const std::vector<const Node*>& nodes() const { return nodes_; }
    NodeId first_id() const { return nodes_.empty() ? 0 : nodes_.front()->id; }
    const Node* find(NodeId id) const;
    bool owns(const Node& node) const { return find(node.id) == &node; }

    std::string_view excerpt(const SourceSpan& span) const;

private:
    friend std::shared_ptr<const Program> parse_program(std::string, const ParseOptions&);
    void number(NodeId first_id);

    std::string unit_;
    std::string source_;
    std::unique_ptr<Node> root_;
    std::vector<const Node*> nodes_;
};

/// Parses a whole compilation unit. Throws sindarin::Error{SyntaxError} with a span.
std::shared_ptr<const Program> parse_program(std::string source, const ParseOptions& options = {});

/// Innermost node whose span contains offset; the Program node for whitespace
/// or comments. Throws Error{OffsetOutOfRange}.
const Node& node_at(const Program& program, std::uint32_t offset);

NodeKind classify_node(const Node& node);

/// One callback per node kind. Unoverridden callbacks fall back to visit_node.
class NodeVisitor {
public:
    virtual ~NodeVisitor() = default;
    virtual void visit_node(const Node&) {}
    virtual void visit_program(const Node& n) { visit_node(n); }
    virtual void visit_class_def(const Node& n) { visit_node(n); }
    virtual void visit_method_def(const Node& n) { visit_node(n); }
    virtual void visit_block(const Node& n) { visit_node(n); }
    virtual void visit_sequence(const Node& n) { visit_node(n); }
    virtual void visit_return(const Node& n) { visit_node(n); }
    virtual void visit_assignment(const Node& n) { visit_node(n); }
    virtual void visit_message(const Node& n) { visit_node(n); }
    virtual void visit_variable_read(const Node& n) { visit_node(n); }
    virtual void visit_literal(const Node& n) { visit_node(n); }
    virtual void visit_temp_decl(const Node& n) { visit_node(n); }
    virtual void visit_self_ref(const Node& n) { visit_node(n); }
};

void visit(const Node& node, NodeVisitor& visitor);

/// Renders an AST back to Lumen source. parse(print(p)) is structurally equal to p.
std::string print_program(const Program& program);
std::string print_node(const Node& node);

/// Structural equality ignoring ids and spans.
bool structurally_equal(const Node& a, const Node& b);

std::string literal_print_string(const LiteralValue& value);

} // namespace sindarin::lumen
