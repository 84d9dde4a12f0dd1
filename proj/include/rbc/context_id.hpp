#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>

namespace rbc {

/// Identifier stored in every envelope header; traffic only matches within one context.
///
/// The tuple is <a, b, f, l, c>: leader base rank, leader counter, first and last
/// base rank of the range, generation. `stride` is 1 for contiguous ranges, the
/// composed stride for strided ranges and 0 for leader-allocated contexts, so that
/// neither of those can alias a contiguous range context.
struct ContextId {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t f = 0;
    std::int64_t l = 0;
    std::int64_t c = 0;
    std::int64_t stride = 1;

    friend auto operator<=>(const ContextId&, const ContextId&) = default;
};

std::ostream& operator<<(std::ostream& os, const ContextId& ctx);

/// <a, b, f + first, f + last, c + 1>; pure and constant time.
/// Throws std::invalid_argument unless 0 <= first <= last <= l - f.
ContextId derive_range_ctx(const ContextId& parent, std::int64_t first, std::int64_t last);

struct ContextIdHash {
    std::size_t operator()(const ContextId& ctx) const noexcept;
};

} // namespace rbc
