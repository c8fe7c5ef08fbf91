#include "sindarin/error.hpp"
#include "sindarin/lumen/vm.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <mutex>
#include <regex>
#include <shared_mutex>
#include <unordered_map>

namespace sindarin::lumen {

namespace {

struct ClassPrimitives {
    std::map<std::string, Primitive, std::less<>> instance;
    std::map<std::string, Primitive, std::less<>> meta;
};

struct Registry {
    std::shared_mutex mu;
    std::unordered_map<const ClassInfo*, ClassPrimitives> table;
};

Registry& registry();

void add(std::string_view cls, std::string selector, Primitive fn, bool meta = false) {
    const ClassInfo* info = prelude()->find_class(cls);
    if (!info) throw Error(ErrorCode::VmFault, "primitive for unknown class " + std::string(cls));
    Registry& r = registry();
    std::unique_lock lock(r.mu);
    auto& slot = r.table[info];
    (meta ? slot.meta : slot.instance)[std::move(selector)] = std::move(fn);
}

// -- helpers ------------------------------------------------------------------

PrimResult answer(Value v) { return Answer{std::move(v)}; }

PrimResult fail(Execution& e, std::string_view cls, std::string text) { return Raise{e.make_exception(cls, std::move(text))}; }

PrimResult type_error(Execution& e, std::string_view what, const Value& got) {
    return fail(e, "Error", std::string(what) + " expected, got " + e.print_string(got));
}

HeapObject* object_of(Execution& e, const Value& v) {
    const auto* ref = std::get_if<ObjectRef>(&v);
    return ref ? &e.heap().get(*ref) : nullptr;
}

// Sends `value`-family messages the way conditionals and loops need them:
// closures are entered directly; anything else gets a real send.
PrimResult call(Execution& e, const Value& callable, std::vector<Value> args) {
    if (const auto* ref = std::get_if<ObjectRef>(&callable)) {
        if (e.heap().get(*ref).closure) return e.invoke_block(*ref, std::move(args));
    }
    static const char* const selectors[] = {"value", "value:", "value:value:", "value:value:value:", "value:value:value:value:"};
    if (args.size() >= std::size(selectors)) return fail(e, "Error", "too many block arguments");
    return e.send(callable, selectors[args.size()], std::move(args));
}

std::size_t block_arity(Execution& e, const Value& v) {
    HeapObject* obj = object_of(e, v);
    return obj && obj->closure ? obj->closure->method->num_args : 0;
}

bool truthy(const Value& v, bool& out) {
    const auto* b = std::get_if<bool>(&v);
    if (!b) return false;
    out = *b;
    return true;
}

// Primitive equality: immediates by value, heap objects by identity.
bool prim_equal(const Value& a, const Value& b) { return a == b; }

// -- integers -----------------------------------------------------------------

using Int = std::int64_t;

PrimResult int_binop(Execution& e, const Value& self, std::vector<Value>& args,
                     const std::function<std::optional<Value>(Int, Int, Execution&, PrimResult&)>& op) {
    const auto* b = std::get_if<Int>(&args.at(0));
    if (!b) return type_error(e, "Integer", args[0]);
    PrimResult err = Pushed{};
    auto r = op(std::get<Int>(self), *b, e, err);
    if (!r) return err;
    return answer(*r);
}

Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Int floor_mod(Int a, Int b) {
    Int m = a % b;
    if (m != 0 && ((m < 0) != (b < 0))) m += b;
    return m;
}

void install_integer() {
    auto checked = [](auto fn) {
        return [fn](Execution& e, const Value& self, std::vector<Value>& args) {
            return int_binop(e, self, args, [fn](Int a, Int b, Execution& ex, PrimResult& err) -> std::optional<Value> {
                Int r = 0;
                if (fn(a, b, &r)) {
                    err = fail(ex, "ArithmeticError", "integer overflow");
                    return std::nullopt;
                }
                return r;
            });
        };
    };
    add("Integer", "+", checked([](Int a, Int b, Int* r) { return __builtin_add_overflow(a, b, r); }));
    add("Integer", "-", checked([](Int a, Int b, Int* r) { return __builtin_sub_overflow(a, b, r); }));
    add("Integer", "*", checked([](Int a, Int b, Int* r) { return __builtin_mul_overflow(a, b, r); }));

    auto division = [](std::function<Int(Int, Int)> fn) {
        return [fn](Execution& e, const Value& self, std::vector<Value>& args) {
            return int_binop(e, self, args, [fn](Int a, Int b, Execution& ex, PrimResult& err) -> std::optional<Value> {
                if (b == 0) {
                    err = fail(ex, "ZeroDivide", "division by zero");
                    return std::nullopt;
                }
                if (a == std::numeric_limits<Int>::min() && b == -1) {
                    err = fail(ex, "ArithmeticError", "integer overflow");
                    return std::nullopt;
                }
                return fn(a, b);
            });
        };
    };
    add("Integer", "/", division(floor_div));
    add("Integer", "//", division(floor_div));
    add("Integer", "\\\\", division(floor_mod));
    add("Integer", "rem:", division([](Int a, Int b) { return a % b; }));
    add("Integer", "quo:", division([](Int a, Int b) { return a / b; }));

    auto compare = [](std::function<bool(Int, Int)> fn) {
        return [fn](Execution& e, const Value& self, std::vector<Value>& args) {
            return int_binop(e, self, args, [fn](Int a, Int b, Execution&, PrimResult&) -> std::optional<Value> {
                return fn(a, b);
            });
        };
    };
    add("Integer", "<", compare(std::less<Int>{}));
    add("Integer", ">", compare(std::greater<Int>{}));
    add("Integer", "<=", compare(std::less_equal<Int>{}));
    add("Integer", ">=", compare(std::greater_equal<Int>{}));
    add("Integer", "=", [](Execution&, const Value& self, std::vector<Value>& args) { return answer(self == args.at(0)); });
    add("Integer", "~=", [](Execution&, const Value& self, std::vector<Value>& args) { return answer(self != args.at(0)); });
    add("Integer", "hash", [](Execution&, const Value& self, std::vector<Value>&) { return answer(self); });
    add("Integer", "negated", [](Execution& e, const Value& self, std::vector<Value>&) {
        Int a = std::get<Int>(self);
        if (a == std::numeric_limits<Int>::min()) return fail(e, "ArithmeticError", "integer overflow");
        return answer(-a);
    });
    add("Integer", "bitAnd:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        return int_binop(e, self, args, [](Int a, Int b, Execution&, PrimResult&) -> std::optional<Value> { return a & b; });
    });
    add("Integer", "bitOr:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        return int_binop(e, self, args, [](Int a, Int b, Execution&, PrimResult&) -> std::optional<Value> { return a | b; });
    });
    add("Integer", "bitXor:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        return int_binop(e, self, args, [](Int a, Int b, Execution&, PrimResult&) -> std::optional<Value> { return a ^ b; });
    });
    add("Integer", "printString", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(std::to_string(std::get<Int>(self)));
    });
    add("Integer", "asString", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(std::to_string(std::get<Int>(self)));
    });
}

// -- loops --------------------------------------------------------------------

class WhileRoutine : public NativeRoutine {
public:
    WhileRoutine(Value cond, std::optional<Value> body, bool until_false, std::string selector)
        : cond_(std::move(cond)), body_(std::move(body)), until_(until_false), selector_(std::move(selector)) {}
    const CompiledMethod& method() const override { return native_method("Block", selector_); }
    NativeStep resume(Execution& e, Context&, std::optional<Value> input) override {
        if (!input || in_body_) {
            in_body_ = false;
            return NativeSend{cond_, "value", {}};
        }
        bool b = false;
        if (!truthy(*input, b)) return NativeSignal{e.make_exception("Error", "loop condition is not a Boolean")};
        if (b != until_) return NativeReturn{Nil{}};
        if (!body_) return NativeSend{cond_, "value", {}};
        in_body_ = true;
        return NativeSend{*body_, "value", {}};
    }

private:
    Value cond_;
    std::optional<Value> body_;
    bool until_;
    std::string selector_;
    bool in_body_ = false;
};

class CountingRoutine : public NativeRoutine {
public:
    CountingRoutine(Int from, Int to, Int by, Value block, bool pass_index, std::string selector, Value result)
        : i_(from), to_(to), by_(by), block_(std::move(block)), pass_index_(pass_index), selector_(std::move(selector)),
          result_(std::move(result)) {}
    const CompiledMethod& method() const override { return native_method("Integer", selector_); }
    NativeStep resume(Execution& e, Context&, std::optional<Value> input) override {
        if (input) {
            if (__builtin_add_overflow(i_, by_, &i_)) return NativeReturn{result_};
        }
        if (by_ > 0 ? i_ > to_ : i_ < to_) return NativeReturn{result_};
        (void)e;
        if (pass_index_) return NativeSend{block_, "value:", {i_}};
        return NativeSend{block_, "value", {}};
    }

private:
    Int i_, to_, by_;
    Value block_;
    bool pass_index_;
    std::string selector_;
    Value result_;
};

class RepeatRoutine : public NativeRoutine {
public:
    explicit RepeatRoutine(Value block) : block_(std::move(block)) {}
    const CompiledMethod& method() const override { return native_method("Block", "repeat"); }
    NativeStep resume(Execution&, Context&, std::optional<Value>) override { return NativeSend{block_, "value", {}}; }

private:
    Value block_;
};

void install_loops() {
    auto loop = [](bool until_false, bool with_body, std::string selector) {
        return [=](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
            std::optional<Value> body;
            if (with_body) body = args.at(0);
            e.push_native(std::make_shared<WhileRoutine>(self, body, until_false, selector), self);
            return Pushed{};
        };
    };
    add("Block", "whileTrue:", loop(true, true, "whileTrue:"));
    add("Block", "whileFalse:", loop(false, true, "whileFalse:"));
    add("Block", "whileTrue", loop(true, false, "whileTrue"));
    add("Block", "whileFalse", loop(false, false, "whileFalse"));
    add("Block", "repeat", [](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        e.push_native(std::make_shared<RepeatRoutine>(self), self);
        return Pushed{};
    });
    add("Integer", "timesRepeat:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        e.push_native(std::make_shared<CountingRoutine>(1, std::get<Int>(self), 1, args.at(0), false, "timesRepeat:", self), self);
        return Pushed{};
    });
    add("Integer", "to:do:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* to = std::get_if<Int>(&args.at(0));
        if (!to) return type_error(e, "Integer", args[0]);
        e.push_native(std::make_shared<CountingRoutine>(std::get<Int>(self), *to, 1, args.at(1), true, "to:do:", self), self);
        return Pushed{};
    });
    add("Integer", "to:by:do:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* to = std::get_if<Int>(&args.at(0));
        const auto* by = std::get_if<Int>(&args.at(1));
        if (!to) return type_error(e, "Integer", args[0]);
        if (!by || *by == 0) return fail(e, "Error", "step must be a non-zero Integer");
        e.push_native(std::make_shared<CountingRoutine>(std::get<Int>(self), *to, *by, args.at(2), true, "to:by:do:", self), self);
        return Pushed{};
    });
}

// -- booleans -----------------------------------------------------------------

void install_booleans() {
    auto branch = [](std::string cls, std::string sel, int taken) {
        // taken: index of the argument evaluated, or -1 for none
        add(cls, sel, [taken](Execution& e, const Value&, std::vector<Value>& args) -> PrimResult {
            if (taken < 0) return answer(Nil{});
            return call(e, args.at(static_cast<std::size_t>(taken)), {});
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
    add("True", "and:", [](Execution& e, const Value&, std::vector<Value>& args) { return call(e, args.at(0), {}); });
    add("False", "and:", [](Execution&, const Value&, std::vector<Value>&) { return answer(false); });
    add("True", "or:", [](Execution&, const Value&, std::vector<Value>&) { return answer(true); });
    add("False", "or:", [](Execution& e, const Value&, std::vector<Value>& args) { return call(e, args.at(0), {}); });
    add("Boolean", "not", [](Execution&, const Value& self, std::vector<Value>&) { return answer(!std::get<bool>(self)); });
    auto logical = [](std::function<bool(bool, bool)> fn) {
        return [fn](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
            bool b = false;
            if (!truthy(args.at(0), b)) return type_error(e, "Boolean", args[0]);
            return answer(fn(std::get<bool>(self), b));
        };
    };
    add("Boolean", "&", logical([](bool a, bool b) { return a && b; }));
    add("Boolean", "|", logical([](bool a, bool b) { return a || b; }));
    add("Boolean", "xor:", logical([](bool a, bool b) { return a != b; }));
}

// -- blocks -------------------------------------------------------------------

void install_blocks() {
    auto value_n = [](std::size_t n) {
        return [n](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
            (void)n;
            return e.invoke_block(std::get<ObjectRef>(self), args);
        };
    };
    add("Block", "value", value_n(0));
    add("Block", "value:", value_n(1));
    add("Block", "value:value:", value_n(2));
    add("Block", "value:value:value:", value_n(3));
    add("Block", "value:value:value:value:", value_n(4));
    add("Block", "valueWithArguments:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject* arr = object_of(e, args.at(0));
        if (!arr || arr->cls->storage != StorageKind::Indexed) return type_error(e, "Array", args[0]);
        return e.invoke_block(std::get<ObjectRef>(self), arr->elements);
    });
    add("Block", "cull:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        if (block_arity(e, self) == 0) return e.invoke_block(std::get<ObjectRef>(self), {});
        return e.invoke_block(std::get<ObjectRef>(self), args);
    });
    add("Block", "cull:cull:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        std::size_t n = std::min<std::size_t>(block_arity(e, self), 2);
        args.resize(n);
        return e.invoke_block(std::get<ObjectRef>(self), args);
    });
    add("Block", "numArgs", [](Execution& e, const Value& self, std::vector<Value>&) {
        return answer(static_cast<Int>(block_arity(e, self)));
    });
    add("Block", "method", [](Execution& e, const Value& self, std::vector<Value>&) {
        return answer(MethodRef{object_of(e, self)->closure->method});
    });
    add("Block", "on:do:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        e.push_native(std::make_shared<HandlerRoutine>(self, args.at(0), args.at(1)), self);
        return Pushed{};
    });
}

// -- objects and classes ------------------------------------------------------

PrimResult perform(Execution& e, const Value& self, const Value& selector, std::vector<Value> args) {
    const auto* sym = std::get_if<Symbol>(&selector);
    if (!sym) return type_error(e, "Symbol", selector);
    if (selector_arity(sym->name) != args.size()) return fail(e, "Error", "wrong argument count for #" + sym->name);
    return e.send(self, sym->name, std::move(args));
}

bool responds_to(const ClassInfo* cls, std::string_view selector) {
    for (const ClassInfo* c = cls; c; c = c->superclass)
        if (c->methods.count(std::string(selector)) || find_primitive(c, selector)) return true;
    return false;
}

void install_object() {
    add("Object", "==", [](Execution&, const Value& self, std::vector<Value>& args) { return answer(identical(self, args.at(0))); });
    add("Object", "class", [](Execution& e, const Value& self, std::vector<Value>&) { return answer(ClassRef{e.class_of(self)}); });
    add("Object", "printString", [](Execution& e, const Value& self, std::vector<Value>&) { return answer(e.print_string(self)); });
    add("Object", "displayString", [](Execution& e, const Value& self, std::vector<Value>&) { return answer(e.display_string(self)); });
    add("Object", "asString", [](Execution& e, const Value& self, std::vector<Value>&) { return answer(e.display_string(self)); });
    add("Object", "isKindOf:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* c = std::get_if<ClassRef>(&args.at(0));
        return answer(c && e.class_of(self)->inherits_from(c->cls));
    });
    add("Object", "isMemberOf:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* c = std::get_if<ClassRef>(&args.at(0));
        return answer(c && e.class_of(self) == c->cls);
    });
    add("Object", "respondsTo:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* s = std::get_if<Symbol>(&args.at(0));
        return answer(s && responds_to(e.class_of(self), s->name));
    });
    add("Object", "perform:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        return perform(e, self, args.at(0), {});
    });
    add("Object", "perform:with:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        return perform(e, self, args.at(0), {args.at(1)});
    });
    add("Object", "perform:with:with:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        return perform(e, self, args.at(0), {args.at(1), args.at(2)});
    });
    add("Object", "perform:withArguments:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject* arr = object_of(e, args.at(1));
        if (!arr || arr->cls->storage != StorageKind::Indexed) return type_error(e, "Array", args[1]);
        return perform(e, self, args.at(0), arr->elements);
    });
    add("Object", "copy", [](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        HeapObject* obj = object_of(e, self);
        if (!obj || obj->foreign) return answer(self);
        ObjectRef ref = e.heap().allocate(obj->cls);
        HeapObject& copy = e.heap().get(ref);
        copy.fields = obj->fields;
        copy.elements = obj->elements;
        copy.entries = obj->entries;
        copy.closure = obj->closure;
        return answer(ref);
    });
    add("Object", "hash", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult {
        if (const auto* r = std::get_if<ObjectRef>(&self)) return answer(static_cast<Int>(r->handle));
        if (const auto* s = std::get_if<std::string>(&self))
            return answer(static_cast<Int>(std::hash<std::string>{}(*s) & 0x3fffffff));
        if (const auto* s = std::get_if<Symbol>(&self))
            return answer(static_cast<Int>(std::hash<std::string>{}(s->name) & 0x3fffffff));
        return answer(Int{0});
    });
    add("Object", "instVarNamed:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject* obj = object_of(e, self);
        std::string name = e.display_string(args.at(0));
        int f = obj ? obj->cls->field_index(name) : -1;
        if (f < 0) return fail(e, "Error", "no field " + name);
        return answer(obj->fields[static_cast<std::size_t>(f)]);
    });
    add("Object", "instVarNamed:put:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject* obj = object_of(e, self);
        std::string name = e.display_string(args.at(0));
        int f = obj ? obj->cls->field_index(name) : -1;
        if (f < 0) return fail(e, "Error", "no field " + name);
        obj->fields[static_cast<std::size_t>(f)] = args.at(1);
        return answer(args.at(1));
    });

    // Class handles
    add("Class", "new", [](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        const ClassInfo* cls = std::get<ClassRef>(self).cls;
        static const char* const immediates[] = {"Integer", "String", "Symbol", "Boolean", "True", "False",
                                                 "UndefinedObject", "Block", "Class", "CompiledMethod", "AstNode"};
        for (const char* name : immediates)
            if (cls->name == name) return fail(e, "Error", "cannot create instances of " + cls->name);
        if (cls->storage == StorageKind::Foreign || cls->storage == StorageKind::Closure)
            return fail(e, "Error", "cannot create instances of " + cls->name);
        return answer(e.heap().allocate(cls));
    });
    add("Class", "new:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const ClassInfo* cls = std::get<ClassRef>(self).cls;
        const auto* n = std::get_if<Int>(&args.at(0));
        if (cls->storage != StorageKind::Indexed) return fail(e, "Error", cls->name + " is not indexable");
        if (!n || *n < 0 || *n > 1'000'000) return type_error(e, "size", args[0]);
        ObjectRef ref = e.heap().allocate(cls);
        e.heap().get(ref).elements.assign(static_cast<std::size_t>(*n), Nil{});
        return answer(ref);
    });
    auto with = [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const ClassInfo* cls = std::get<ClassRef>(self).cls;
        if (cls->storage != StorageKind::Indexed) return fail(e, "Error", cls->name + " is not indexable");
        ObjectRef ref = e.heap().allocate(cls);
        e.heap().get(ref).elements = args;
        return answer(ref);
    };
    add("Class", "with:", with);
    add("Class", "with:with:", with);
    add("Class", "with:with:with:", with);
    add("Class", "with:with:with:with:", with);
    add("Class", "withAll:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const ClassInfo* cls = std::get<ClassRef>(self).cls;
        HeapObject* src = object_of(e, args.at(0));
        if (cls->storage != StorageKind::Indexed) return fail(e, "Error", cls->name + " is not indexable");
        if (!src || src->cls->storage != StorageKind::Indexed) return type_error(e, "collection", args[0]);
        std::vector<Value> elems = src->elements;
        ObjectRef ref = e.heap().allocate(cls);
        e.heap().get(ref).elements = std::move(elems);
        return answer(ref);
    });
    add("Class", "name", [](Execution&, const Value& self, std::vector<Value>&) { return answer(std::get<ClassRef>(self).cls->name); });
    add("Class", "superclass", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult {
        const ClassInfo* s = std::get<ClassRef>(self).cls->superclass;
        return s ? answer(ClassRef{s}) : answer(Nil{});
    });
    auto method_named = [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* s = std::get_if<Symbol>(&args.at(0));
        if (!s) return type_error(e, "Symbol", args[0]);
        const CompiledMethod* m = std::get<ClassRef>(self).cls->lookup(s->name);
        return m ? answer(MethodRef{m}) : answer(Nil{});
    };
    add("Class", "methodNamed:", method_named);
    add("Class", ">>", method_named);
    add("Class", "includesSelector:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* s = std::get_if<Symbol>(&args.at(0));
        if (!s) return type_error(e, "Symbol", args[0]);
        return answer(std::get<ClassRef>(self).cls->methods.count(s->name) > 0);
    });
    add("Class", "inheritsFrom:", [](Execution&, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* c = std::get_if<ClassRef>(&args.at(0));
        const ClassInfo* me = std::get<ClassRef>(self).cls;
        return answer(c && me != c->cls && me->inherits_from(c->cls));
    });
    add("Class", "selectors", [](Execution& e, const Value& self, std::vector<Value>&) {
        std::vector<Value> out;
        for (const auto& [sel, m] : std::get<ClassRef>(self).cls->methods) out.push_back(Symbol{sel});
        return answer(e.new_collection("Array", std::move(out)));
    });

    // Class-side shortcuts on exceptions and Random
    auto class_signal = [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const ClassInfo* cls = std::get<ClassRef>(self).cls;
        ObjectRef ref = e.heap().allocate(cls);
        if (!args.empty()) e.heap().get(ref).fields[0] = args[0];
        return Raise{ref};
    };
    add("Exception", "signal", class_signal, true);
    add("Exception", "signal:", class_signal, true);
    add("Random", "seed:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        ObjectRef ref = e.heap().allocate(std::get<ClassRef>(self).cls);
        return e.send(ref, "seed:", {args.at(0)});
    }, true);

    // Exceptions
    add("Exception", "signal", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult { return Raise{self}; });
    add("Exception", "pass", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult { return Raise{self}; });

    // Methods and nodes
    add("CompiledMethod", "selector", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(Symbol{std::get<MethodRef>(self).method->selector});
    });
    add("CompiledMethod", "methodClass", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult {
        const ClassInfo* c = std::get<MethodRef>(self).method->owner;
        return c ? answer(ClassRef{c}) : answer(Nil{});
    });
    add("CompiledMethod", "name", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(std::get<MethodRef>(self).method->print_name());
    });
    add("CompiledMethod", "numArgs", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(static_cast<Int>(std::get<MethodRef>(self).method->num_args));
    });
    add("CompiledMethod", "isBlock", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(std::get<MethodRef>(self).method->is_block());
    });
    // A method equals a block closure whose body it is (ctx method = aBlock).
    add("CompiledMethod", "=", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const CompiledMethod* m = std::get<MethodRef>(self).method;
        if (const auto* other = std::get_if<MethodRef>(&args.at(0))) return answer(other->method == m);
        HeapObject* obj = object_of(e, args.at(0));
        return answer(obj && obj->closure && obj->closure->method == m);
    });

    auto node_is = [](std::string sel, NodeKind kind) {
        add("AstNode", sel, [kind](Execution&, const Value& self, std::vector<Value>&) {
            return answer(std::get<NodeRef>(self).node->kind == kind);
        });
    };
    for (auto [base, kind] : std::initializer_list<std::pair<const char*, NodeKind>>{
             {"Message", NodeKind::Message},   {"Assignment", NodeKind::Assignment}, {"Return", NodeKind::Return},
             {"Block", NodeKind::Block},       {"Literal", NodeKind::Literal},       {"Variable", NodeKind::VariableRead},
             {"Sequence", NodeKind::Sequence}, {"Method", NodeKind::MethodDef},      {"Self", NodeKind::SelfRef},
             {"TempDecl", NodeKind::TempDecl}}) {
        node_is(std::string("is") + base, kind);
        node_is(std::string("is") + base + "Node", kind);
    }
    add("AstNode", "selector", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult {
        const Node* n = std::get<NodeRef>(self).node;
        return n->kind == NodeKind::Message || n->kind == NodeKind::MethodDef ? answer(Symbol{n->name}) : answer(Nil{});
    });
    add("AstNode", "variableName", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult {
        const Node* n = std::get<NodeRef>(self).node;
        return n->kind == NodeKind::Assignment || n->kind == NodeKind::VariableRead ? answer(Symbol{n->name}) : answer(Nil{});
    });
    add("AstNode", "value", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(from_literal(std::get<NodeRef>(self).node->literal));
    });
    add("AstNode", "id", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(static_cast<Int>(std::get<NodeRef>(self).node->id));
    });
    add("AstNode", "kind", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(Symbol{std::string(to_string(std::get<NodeRef>(self).node->kind))});
    });
    add("AstNode", "parent", [](Execution&, const Value& self, std::vector<Value>&) -> PrimResult {
        const Node* p = std::get<NodeRef>(self).node->parent;
        return p ? answer(NodeRef{p}) : answer(Nil{});
    });
    // ast accept: visitor sends visitMessageNode: and friends
    add("AstNode", "accept:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        std::string kind(to_string(std::get<NodeRef>(self).node->kind));
        return e.send(args.at(0), "visit" + kind + "Node:", {self});
    });
    add("AstNode", "start", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(static_cast<Int>(std::get<NodeRef>(self).node->span.start));
    });
    add("AstNode", "stop", [](Execution&, const Value& self, std::vector<Value>&) {
        return answer(static_cast<Int>(std::get<NodeRef>(self).node->span.end));
    });
}

// -- strings and symbols ------------------------------------------------------

std::string text_of(Execution& e, const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* s = std::get_if<Symbol>(&v)) return s->name;
    return e.display_string(v);
}

void install_strings() {
    auto str = [](const Value& v) -> const std::string& { return std::get<std::string>(v); };
    add("String", "size", [str](Execution&, const Value& self, std::vector<Value>&) { return answer(static_cast<Int>(str(self).size())); });
    add("String", "at:", [str](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* i = std::get_if<Int>(&args.at(0));
        if (!i) return type_error(e, "Integer", args[0]);
        if (*i < 1 || *i > static_cast<Int>(str(self).size()))
            return fail(e, "SubscriptOutOfBounds", "index " + std::to_string(*i) + " out of bounds");
        return answer(std::string(1, str(self)[static_cast<std::size_t>(*i - 1)]));
    });
    add("String", ",", [str](Execution& e, const Value& self, std::vector<Value>& args) {
        return answer(str(self) + text_of(e, args.at(0)));
    });
    add("String", "=", [](Execution&, const Value& self, std::vector<Value>& args) { return answer(self == args.at(0)); });
    auto compare = [str](std::function<bool(const std::string&, const std::string&)> fn) {
        return [str, fn](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
            const auto* o = std::get_if<std::string>(&args.at(0));
            if (!o) return type_error(e, "String", args[0]);
            return answer(fn(str(self), *o));
        };
    };
    add("String", "<", compare(std::less<std::string>{}));
    add("String", ">", compare(std::greater<std::string>{}));
    add("String", "<=", compare(std::less_equal<std::string>{}));
    add("String", ">=", compare(std::greater_equal<std::string>{}));
    add("String", "asSymbol", [str](Execution&, const Value& self, std::vector<Value>&) { return answer(Symbol{str(self)}); });
    add("String", "asString", [](Execution&, const Value& self, std::vector<Value>&) { return answer(self); });
    add("String", "includesSubstring:", [str](Execution& e, const Value& self, std::vector<Value>& args) {
        return answer(str(self).find(text_of(e, args.at(0))) != std::string::npos);
    });
    add("String", "beginsWith:", [str](Execution& e, const Value& self, std::vector<Value>& args) {
        return answer(str(self).rfind(text_of(e, args.at(0)), 0) == 0);
    });
    add("String", "endsWith:", [str](Execution& e, const Value& self, std::vector<Value>& args) {
        std::string t = text_of(e, args.at(0));
        const std::string& s = str(self);
        return answer(s.size() >= t.size() && s.compare(s.size() - t.size(), t.size(), t) == 0);
    });
    // The receiver is a regular expression matched against the whole argument.
    add("String", "match:", [str](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        if (std::holds_alternative<Nil>(args.at(0))) return answer(false);
        try {
            std::regex re(str(self));
            return answer(std::regex_match(text_of(e, args.at(0)), re));
        } catch (const std::regex_error&) {
            return fail(e, "Error", "invalid pattern " + str(self));
        }
    });
    add("String", "reversed", [str](Execution&, const Value& self, std::vector<Value>&) {
        std::string s = str(self);
        std::reverse(s.begin(), s.end());
        return answer(s);
    });
    add("String", "asUppercase", [str](Execution&, const Value& self, std::vector<Value>&) {
        std::string s = str(self);
        for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return answer(s);
    });
    add("String", "asLowercase", [str](Execution&, const Value& self, std::vector<Value>&) {
        std::string s = str(self);
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return answer(s);
    });
    add("String", "copyFrom:to:", [str](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        const auto* a = std::get_if<Int>(&args.at(0));
        const auto* b = std::get_if<Int>(&args.at(1));
        const std::string& s = str(self);
        if (!a || !b) return type_error(e, "Integer", !a ? args[0] : args[1]);
        if (*b < *a) return answer(std::string());
        if (*a < 1 || *b > static_cast<Int>(s.size())) return fail(e, "SubscriptOutOfBounds", "range out of bounds");
        return answer(s.substr(static_cast<std::size_t>(*a - 1), static_cast<std::size_t>(*b - *a + 1)));
    });
    add("String", "indexOf:", [str](Execution& e, const Value& self, std::vector<Value>& args) {
        auto pos = str(self).find(text_of(e, args.at(0)));
        return answer(pos == std::string::npos ? Int{0} : static_cast<Int>(pos + 1));
    });
    add("String", "asInteger", [str](Execution&, const Value& self, std::vector<Value>&) -> PrimResult {
        const std::string& s = str(self);
        try {
            std::size_t used = 0;
            long long v = std::stoll(s, &used);
            if (used == s.size()) return answer(static_cast<Int>(v));
        } catch (const std::exception&) {
        }
        return answer(Nil{});
    });

    auto sym = [](const Value& v) -> const std::string& { return std::get<Symbol>(v).name; };
    add("Symbol", "size", [sym](Execution&, const Value& self, std::vector<Value>&) { return answer(static_cast<Int>(sym(self).size())); });
    add("Symbol", "=", [](Execution&, const Value& self, std::vector<Value>& args) { return answer(self == args.at(0)); });
    add("Symbol", "asString", [sym](Execution&, const Value& self, std::vector<Value>&) { return answer(sym(self)); });
    add("Symbol", "asSymbol", [](Execution&, const Value& self, std::vector<Value>&) { return answer(self); });
    add("Symbol", ",", [sym](Execution& e, const Value& self, std::vector<Value>& args) { return answer(sym(self) + text_of(e, args.at(0))); });
    add("Symbol", "numArgs", [sym](Execution&, const Value& self, std::vector<Value>&) {
        return answer(static_cast<Int>(selector_arity(sym(self))));
    });
}

// -- collections --------------------------------------------------------------

HeapObject* indexed(Execution& e, const Value& v) {
    HeapObject* obj = object_of(e, v);
    return obj && obj->cls->storage == StorageKind::Indexed ? obj : nullptr;
}

HeapObject* dictionary(Execution& e, const Value& v) {
    HeapObject* obj = object_of(e, v);
    return obj && obj->cls->storage == StorageKind::Dictionary ? obj : nullptr;
}

PrimResult checked_index(Execution& e, HeapObject& obj, const Value& index, std::size_t& out) {
    const auto* i = std::get_if<Int>(&index);
    if (!i) return type_error(e, "Integer", index);
    if (*i < 1 || *i > static_cast<Int>(obj.elements.size()))
        return fail(e, "SubscriptOutOfBounds", "index " + std::to_string(*i) + " out of bounds for size " +
                                                   std::to_string(obj.elements.size()));
    out = static_cast<std::size_t>(*i - 1);
    return Pushed{};
}

void install_collections() {
    auto not_indexed = [](Execution& e, const Value& self) { return fail(e, "Error", e.print_string(self) + " is not indexable"); };
    add("Collection", "size", [=](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        HeapObject* obj = indexed(e, self);
        if (!obj) return not_indexed(e, self);
        return answer(static_cast<Int>(obj->elements.size()));
    });
    add("Collection", "at:", [=](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject* obj = indexed(e, self);
        if (!obj) return not_indexed(e, self);
        std::size_t i = 0;
        PrimResult r = checked_index(e, *obj, args.at(0), i);
        if (std::holds_alternative<Raise>(r)) return r;
        return answer(obj->elements[i]);
    });
    add("Collection", "at:put:", [=](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject* obj = indexed(e, self);
        if (!obj) return not_indexed(e, self);
        std::size_t i = 0;
        PrimResult r = checked_index(e, *obj, args.at(0), i);
        if (std::holds_alternative<Raise>(r)) return r;
        obj->elements[i] = args.at(1);
        return answer(args.at(1));
    });
    add("Collection", "asArray", [=](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        HeapObject* obj = indexed(e, self);
        if (!obj) return not_indexed(e, self);
        return answer(e.new_collection("Array", obj->elements));
    });
    add("Collection", "asOrderedCollection", [=](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        HeapObject* obj = indexed(e, self);
        if (!obj) return not_indexed(e, self);
        return answer(e.new_collection("OrderedCollection", obj->elements));
    });
    add("Collection", "indexOf:", [=](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject* obj = indexed(e, self);
        if (!obj) return not_indexed(e, self);
        auto it = std::find_if(obj->elements.begin(), obj->elements.end(),
                               [&](const Value& v) { return prim_equal(v, args.at(0)); });
        return answer(it == obj->elements.end() ? Int{0} : static_cast<Int>(it - obj->elements.begin() + 1));
    });
    add("OrderedCollection", "add:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        indexed(e, self)->elements.push_back(args.at(0));
        return answer(args.at(0));
    });
    add("OrderedCollection", "addFirst:", [](Execution& e, const Value& self, std::vector<Value>& args) {
        auto& el = indexed(e, self)->elements;
        el.insert(el.begin(), args.at(0));
        return answer(args.at(0));
    });
    add("OrderedCollection", "removeFirst", [](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        auto& el = indexed(e, self)->elements;
        if (el.empty()) return fail(e, "Error", "collection is empty");
        Value v = el.front();
        el.erase(el.begin());
        return answer(v);
    });
    add("OrderedCollection", "removeLast", [](Execution& e, const Value& self, std::vector<Value>&) -> PrimResult {
        auto& el = indexed(e, self)->elements;
        if (el.empty()) return fail(e, "Error", "collection is empty");
        Value v = el.back();
        el.pop_back();
        return answer(v);
    });
    add("OrderedCollection", "remove:", [](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        auto& el = indexed(e, self)->elements;
        auto it = std::find_if(el.begin(), el.end(), [&](const Value& v) { return prim_equal(v, args.at(0)); });
        if (it == el.end()) return fail(e, "Error", "object not found");
        el.erase(it);
        return answer(args.at(0));
    });

    auto find_entry = [](HeapObject& d, const Value& key) {
        return std::find_if(d.entries.begin(), d.entries.end(), [&](const auto& kv) { return prim_equal(kv.first, key); });
    };
    add("Dictionary", "at:put:", [=](Execution& e, const Value& self, std::vector<Value>& args) {
        HeapObject& d = *dictionary(e, self);
        auto it = find_entry(d, args.at(0));
        if (it != d.entries.end()) it->second = args.at(1);
        else d.entries.emplace_back(args.at(0), args.at(1));
        return answer(args.at(1));
    });
    add("Dictionary", "at:", [=](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject& d = *dictionary(e, self);
        auto it = find_entry(d, args.at(0));
        if (it == d.entries.end()) return fail(e, "KeyNotFound", "key not found: " + e.print_string(args[0]));
        return answer(it->second);
    });
    add("Dictionary", "includesKey:", [=](Execution& e, const Value& self, std::vector<Value>& args) {
        HeapObject& d = *dictionary(e, self);
        return answer(find_entry(d, args.at(0)) != d.entries.end());
    });
    add("Dictionary", "removeKey:", [=](Execution& e, const Value& self, std::vector<Value>& args) -> PrimResult {
        HeapObject& d = *dictionary(e, self);
        auto it = find_entry(d, args.at(0));
        if (it == d.entries.end()) return fail(e, "KeyNotFound", "key not found: " + e.print_string(args[0]));
        Value v = it->second;
        d.entries.erase(it);
        return answer(v);
    });
    add("Dictionary", "size", [](Execution& e, const Value& self, std::vector<Value>&) {
        return answer(static_cast<Int>(dictionary(e, self)->entries.size()));
    });
    add("Dictionary", "keys", [](Execution& e, const Value& self, std::vector<Value>&) {
        std::vector<Value> out;
        for (const auto& kv : dictionary(e, self)->entries) out.push_back(kv.first);
        return answer(e.new_collection("Array", std::move(out)));
    });
    add("Dictionary", "values", [](Execution& e, const Value& self, std::vector<Value>&) {
        std::vector<Value> out;
        for (const auto& kv : dictionary(e, self)->entries) out.push_back(kv.second);
        return answer(e.new_collection("Array", std::move(out)));
    });
}

// -- transcript ---------------------------------------------------------------

void install_transcript() {
    auto show = [](Execution& e, const Value&, std::vector<Value>& args) {
        e.write_output(text_of(e, args.at(0)));
        return answer(e.transcript());
    };
    add("TranscriptStream", "show:", show);
    add("TranscriptStream", "nextPutAll:", show);
    add("TranscriptStream", "cr", [](Execution& e, const Value&, std::vector<Value>&) {
        e.write_output("\n");
        return answer(e.transcript());
    });
    add("TranscriptStream", "tab", [](Execution& e, const Value&, std::vector<Value>&) {
        e.write_output("\t");
        return answer(e.transcript());
    });
    add("TranscriptStream", "space", [](Execution& e, const Value&, std::vector<Value>&) {
        e.write_output(" ");
        return answer(e.transcript());
    });
}

Registry& registry() {
    static Registry r;
    return r;
}

void install_all() {
    install_integer();
    install_loops();
    install_booleans();
    install_blocks();
    install_object();
    install_strings();
    install_collections();
    install_transcript();
}

Registry& initialized_registry() {
    static std::once_flag once;
    std::call_once(once, install_all);
    return registry();
}

} // namespace

const Primitive* find_primitive(const ClassInfo* cls, std::string_view selector, bool meta) {
    Registry& r = initialized_registry();
    std::shared_lock lock(r.mu);
    auto it = r.table.find(cls);
    if (it == r.table.end()) return nullptr;
    const auto& table = meta ? it->second.meta : it->second.instance;
    auto p = table.find(selector);
    return p == table.end() ? nullptr : &p->second;
}

void register_primitive(std::string_view class_name, std::string selector, Primitive fn, bool meta) {
    initialized_registry();
    add(class_name, std::move(selector), std::move(fn), meta);
}

std::vector<std::string> primitive_selectors(const ClassInfo* cls, bool meta) {
    Registry& r = initialized_registry();
    std::shared_lock lock(r.mu);
    std::vector<std::string> out;
    auto it = r.table.find(cls);
    if (it == r.table.end()) return out;
    for (const auto& [sel, fn] : meta ? it->second.meta : it->second.instance) out.push_back(sel);
    return out;
}

} // namespace sindarin::lumen
