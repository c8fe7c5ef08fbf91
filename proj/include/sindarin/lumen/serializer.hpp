#pragma once

#include "sindarin/lumen/value.hpp"

#include <map>
#include <string>

namespace sindarin::lumen {

/// Deterministic depth-first rendering of guest values.
///
///   objects      ClassName#k{field=value,...}
///   collections  ClassName#k[e1,e2]  (fields first when the class adds any)
///   dictionaries ClassName#k[key->value,...]
///   revisits     @k
///
/// k counts objects in first-visit order, so renderings do not depend on raw
/// handle numbers. One serializer instance shares numbering across calls.
class CanonicalSerializer {
public:
    explicit CanonicalSerializer(const Heap& heap, int max_depth = -1) : heap_(heap), max_depth_(max_depth) {}
    std::string operator()(const Value& v) { return render(v, 0); }

private:
    std::string render(const Value& v, int depth);

    const Heap& heap_;
    int max_depth_;
    std::map<std::uint64_t, std::size_t> seen_;
};

std::string canonical(const Heap& heap, const Value& v, int max_depth = -1);

} // namespace sindarin::lumen
