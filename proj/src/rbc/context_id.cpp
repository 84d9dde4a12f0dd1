#include "rbc/context_id.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

namespace rbc {

std::ostream& operator<<(std::ostream& os, const ContextId& ctx) {
    os << '<' << ctx.a << ',' << ctx.b << ',' << ctx.f << ',' << ctx.l << ',' << ctx.c << '>';
    if (ctx.stride != 1)
        os << "/s" << ctx.stride;
    return os;
}

ContextId derive_range_ctx(const ContextId& parent, std::int64_t first, std::int64_t last) {
    if (first < 0 || first > last || last > parent.l - parent.f)
        throw std::invalid_argument("derive_range_ctx: range [" + std::to_string(first) + ", " +
                                    std::to_string(last) + "] outside parent context");
    return ContextId{parent.a, parent.b, parent.f + first, parent.f + last, parent.c + 1, parent.stride};
}

std::size_t ContextIdHash::operator()(const ContextId& ctx) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (std::int64_t v : {ctx.a, ctx.b, ctx.f, ctx.l, ctx.c, ctx.stride}) {
        h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

} // namespace rbc
