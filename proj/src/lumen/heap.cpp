#include "sindarin/lumen/value.hpp"

#include "sindarin/error.hpp"
#include "sindarin/lumen/compiler.hpp"

namespace sindarin::lumen {

Value from_literal(const LiteralValue& lit) {
    return std::visit([](const auto& v) -> Value { return v; }, lit);
}

ObjectRef Heap::allocate(const ClassInfo* cls) {
    auto obj = std::make_unique<HeapObject>();
    obj->handle = objects_.size() + 1;
    obj->cls = cls;
    obj->fields.assign(cls->fields.size(), Nil{});
    objects_.push_back(std::move(obj));
    return ObjectRef{objects_.back()->handle};
}

HeapObject* Heap::find(std::uint64_t handle) {
    if (handle == 0 || handle > objects_.size()) return nullptr;
    return objects_[handle - 1].get();
}

const HeapObject* Heap::find(std::uint64_t handle) const {
    if (handle == 0 || handle > objects_.size()) return nullptr;
    return objects_[handle - 1].get();
}

HeapObject& Heap::get(ObjectRef ref) {
    HeapObject* obj = find(ref.handle);
    if (!obj) throw Error(ErrorCode::VmFault, "dangling handle " + std::to_string(ref.handle));
    return *obj;
}

const HeapObject& Heap::get(ObjectRef ref) const {
    const HeapObject* obj = find(ref.handle);
    if (!obj) throw Error(ErrorCode::VmFault, "dangling handle " + std::to_string(ref.handle));
    return *obj;
}

} // namespace sindarin::lumen
