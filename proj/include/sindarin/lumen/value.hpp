#pragma once

#include "sindarin/lumen/ast.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace sindarin::lumen {

struct ClassInfo;
class CompiledMethod;
class Context;

struct ObjectRef {
    std::uint64_t handle = 0;
    bool operator==(const ObjectRef&) const = default;
};
struct ClassRef {
    const ClassInfo* cls = nullptr;
    bool operator==(const ClassRef&) const = default;
};
struct MethodRef {
    const CompiledMethod* method = nullptr;
    bool operator==(const MethodRef&) const = default;
};
struct NodeRef {
    const Node* node = nullptr;
    bool operator==(const NodeRef&) const = default;
};

// Objects and closures are heap handles; everything else is immediate and
// compares by value (plus variant).
using Value = std::variant<Nil, bool, std::int64_t, std::string, Symbol, ObjectRef, ClassRef, MethodRef, NodeRef>;

inline bool identical(const Value& a, const Value& b) { return a == b; }
inline bool is_nil(const Value& v) { return std::holds_alternative<Nil>(v); }
inline bool is_object(const Value& v) { return std::holds_alternative<ObjectRef>(v); }
Value from_literal(const LiteralValue& lit);

struct BlockClosure {
    const CompiledMethod* method = nullptr;
    Value receiver;
    std::shared_ptr<Context> outer;
};

class Execution;

/// Host-implemented behaviour behind a guest object (debugger proxies).
class ForeignObject {
public:
    virtual ~ForeignObject() = default;
    virtual std::string print_string() const = 0;
};

struct HeapObject {
    std::uint64_t handle = 0;
    const ClassInfo* cls = nullptr;
    std::vector<Value> fields;
    std::vector<Value> elements;                   // Indexed storage
    std::vector<std::pair<Value, Value>> entries;  // Dictionary storage, insertion order
    std::shared_ptr<BlockClosure> closure;
    std::shared_ptr<ForeignObject> foreign;
};

/// Per-execution handle table. Handles start at 1 and are never reused.
/// A script execution may share the heap of the session it debugs.
class Heap {
public:
    ObjectRef allocate(const ClassInfo* cls);
    HeapObject& get(ObjectRef ref);
    const HeapObject& get(ObjectRef ref) const;
    HeapObject* find(std::uint64_t handle);
    const HeapObject* find(std::uint64_t handle) const;
    std::size_t size() const { return objects_.size(); }

private:
    std::vector<std::unique_ptr<HeapObject>> objects_;
};

} // namespace sindarin::lumen
