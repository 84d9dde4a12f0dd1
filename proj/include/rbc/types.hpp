#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <ostream>

namespace rbc {

/// Index of a simulated process in the world group, stable for the fabric's lifetime.
struct BaseRank {
    int id = 0;

    constexpr BaseRank() = default;
    constexpr explicit BaseRank(int value) : id(value) {}

    friend constexpr auto operator<=>(BaseRank, BaseRank) = default;
    friend std::ostream& operator<<(std::ostream& os, BaseRank r) { return os << 'b' << r.id; }
};

using Tag = int;

/// Wildcard source for receive and probe.
inline constexpr int kAnySource = -1;

/// Tags [kReservedTagBase, kReservedTagBase + kReservedTagCount) belong to collectives.
inline constexpr Tag kReservedTagBase = 1 << 20;
inline constexpr Tag kReservedTagCount = 64;

constexpr bool is_reserved_tag(Tag tag) {
    return tag >= kReservedTagBase && tag < kReservedTagBase + kReservedTagCount;
}

} // namespace rbc
