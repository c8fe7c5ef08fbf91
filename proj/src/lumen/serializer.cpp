#include "sindarin/lumen/serializer.hpp"

#include "sindarin/lumen/compiler.hpp"

namespace sindarin::lumen {

std::string CanonicalSerializer::render(const Value& v, int depth) {
    struct Immediate {
        std::string operator()(const Nil&) const { return "nil"; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(const std::string& s) const { return literal_print_string(s); }
        std::string operator()(const Symbol& s) const { return literal_print_string(s); }
        std::string operator()(const ClassRef& c) const { return c.cls ? c.cls->name : "?"; }
        std::string operator()(const MethodRef& m) const { return m.method ? m.method->print_name() : "?"; }
        std::string operator()(const NodeRef& n) const { return n.node ? "node:" + std::to_string(n.node->id) : "node:?"; }
        std::string operator()(const ObjectRef&) const { return {}; }
    };
    const auto* ref = std::get_if<ObjectRef>(&v);
    if (!ref) return std::visit(Immediate{}, v);

    const HeapObject* obj = heap_.find(ref->handle);
    if (!obj) return "<dangling>";
    auto it = seen_.find(obj->handle);
    if (it != seen_.end()) return "@" + std::to_string(it->second);
    std::size_t k = seen_.size() + 1;
    seen_[obj->handle] = k;
    std::string out = obj->cls->name + "#" + std::to_string(k);
    if (max_depth_ >= 0 && depth >= max_depth_) return out;

    if (obj->closure) return out + "<" + obj->closure->method->print_name() + ">";
    if (obj->foreign) return out + "<" + obj->foreign->print_string() + ">";
    bool container = obj->cls->storage == StorageKind::Indexed || obj->cls->storage == StorageKind::Dictionary;
    if (!obj->fields.empty() || !container) {
        out += "{";
        for (std::size_t i = 0; i < obj->fields.size(); ++i) {
            if (i) out += ",";
            out += obj->cls->fields[i] + "=" + render(obj->fields[i], depth + 1);
        }
        out += "}";
    }
    if (obj->cls->storage == StorageKind::Indexed) {
        out += "[";
        for (std::size_t i = 0; i < obj->elements.size(); ++i) {
            if (i) out += ",";
            out += render(obj->elements[i], depth + 1);
        }
        out += "]";
    } else if (obj->cls->storage == StorageKind::Dictionary) {
        out += "[";
        for (std::size_t i = 0; i < obj->entries.size(); ++i) {
            if (i) out += ",";
            out += render(obj->entries[i].first, depth + 1) + "->" + render(obj->entries[i].second, depth + 1);
        }
        out += "]";
    }
    return out;
}

std::string canonical(const Heap& heap, const Value& v, int max_depth) {
    return CanonicalSerializer(heap, max_depth)(v);
}

} // namespace sindarin::lumen
