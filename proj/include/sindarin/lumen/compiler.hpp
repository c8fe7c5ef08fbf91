#pragma once

#include "sindarin/lumen/ast.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sindarin::lumen {

enum class Opcode : std::uint8_t {
    PushSelf,
    PushLiteral,  // a = literal index
    PushTemp,     // a = slot, b = lexical depth (0 = own frame)
    StoreTemp,    // a = slot, b = lexical depth; leaves the value on the stack
    PushField,    // a = field slot of the receiver
    StoreField,   // a = field slot; leaves the value on the stack
    PushGlobal,   // a = literal index of the name (a Symbol)
    Send,         // a = literal index of the selector, b = argc
    SendSuper,    // same operands, lookup starts above the method's owner
    MakeBlock,    // a = index into blocks
    ReturnTop,    // a = 1 for a non-local return from a block
    Pop,
};

std::string_view to_string(Opcode op);

struct Instruction {
    Opcode op = Opcode::Pop;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    bool operator==(const Instruction&) const = default;
};

enum class MethodKind { Method, Main, Block, Native };

/// How instances of a class store their state beyond named fields.
enum class StorageKind { Plain, Indexed, Dictionary, Closure, Foreign };

struct ClassInfo;

class CompiledMethod {
public:
    std::string selector;
    MethodKind kind = MethodKind::Method;
    const ClassInfo* owner = nullptr;       // defining class; null for main
    const CompiledMethod* home = nullptr;   // enclosing method of a block
    std::size_t num_args = 0;
    std::size_t num_temps = 0;              // excluding arguments
    std::vector<std::string> slot_names;    // arguments first, then temporaries
    std::vector<LiteralValue> literals;
    std::vector<Instruction> code;
    std::vector<const Node*> pc_to_node;
    std::map<NodeId, std::vector<std::size_t>> node_to_pcs;
    std::vector<std::uint32_t> depth_before;  // static value-stack depth before each pc
    const Node* home_ast = nullptr;           // MethodDef, Block, or main Sequence
    std::vector<std::unique_ptr<CompiledMethod>> blocks;

    bool is_block() const { return kind == MethodKind::Block; }
    /// Main and block bodies answer their last statement; methods answer self.
    bool answers_last_value() const { return kind == MethodKind::Main || kind == MethodKind::Block; }
    std::size_t num_slots() const { return num_args + num_temps; }
    const std::string& selector_at(std::size_t literal) const;

    /// "Class>>selector", "<main>", or "[] in Class>>selector".
    std::string print_name() const;
    std::string class_name() const;

    /// FNV-1a over opcodes and operands.
    std::uint64_t checksum() const;
};

/// The node of the instruction at pc (not yet executed). Throws Error{PcOutOfRange}.
const Node& node_for_pc(const CompiledMethod& method, std::size_t pc);

/// Every pc whose instruction maps to node; empty for declarations.
/// Throws Error{NodeNotInMethod} when node is not inside method's AST.
std::vector<std::size_t> pcs_for_node(const CompiledMethod& method, const Node& node);

struct ClassInfo {
    std::string name;
    const ClassInfo* superclass = nullptr;
    std::vector<std::string> fields;  // inherited first
    std::map<std::string, const CompiledMethod*, std::less<>> methods;
    StorageKind storage = StorageKind::Plain;
    const Node* definition = nullptr;
    std::vector<std::unique_ptr<CompiledMethod>> owned_methods;

    const CompiledMethod* lookup(std::string_view selector) const;
    bool inherits_from(const ClassInfo* other) const;
    int field_index(std::string_view field) const;
};

class CompiledProgram {
public:
    std::shared_ptr<const Program> ast;
    std::shared_ptr<const CompiledProgram> base;  // the prelude for user programs
    std::vector<std::unique_ptr<ClassInfo>> classes;
    std::unique_ptr<CompiledMethod> main;

    const ClassInfo* find_class(std::string_view name) const;
    /// The compiled method (possibly a block) whose body contains node.
    const CompiledMethod* method_containing(const Node& node) const;
    /// Methods compiled from a MethodDef node.
    const CompiledMethod* method_for_def(const Node& def) const;
    void for_each_method(const std::function<void(const CompiledMethod&)>& fn) const;

    std::map<const Node*, const CompiledMethod*> node_owner;
};

/// Compiles a parsed program against base (the prelude). Throws Error{CompileError}.
std::shared_ptr<const CompiledProgram> compile(std::shared_ptr<const Program> program,
                                               std::shared_ptr<const CompiledProgram> base);

/// Parse and compile against the shared prelude.
std::shared_ptr<const CompiledProgram> compile_source(std::string source, std::string unit = "<main>");

/// The shared, immutable builtin class library.
std::shared_ptr<const CompiledProgram> prelude();
const std::string& prelude_source();
inline constexpr NodeId kPreludeFirstNodeId = 1'000'000;

/// Golden transcript: per method "pc opcode operand  ; nodeId kind [start,end)".
std::string dump_bytecode(const CompiledProgram& program);
std::string dump_method(const CompiledMethod& method);

} // namespace sindarin::lumen
