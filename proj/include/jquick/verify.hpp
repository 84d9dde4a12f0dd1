#pragma once

#include <string>
#include <vector>

#include "jquick/jquick.hpp"

namespace jquick {

struct Verdict {
    bool sorted = true;
    bool permutation = true;
    bool balanced = true;
    /// Every rank's holding summed over its tasks equals its capacity at every level.
    bool level_balanced = true;
    /// Each task member received exactly its child capacities, summing to what it held.
    bool capacities_filled = true;
    /// At most 2 data messages per side per source; fan-in within min(q, n/p) + 2.
    bool message_bounds = true;
    int depth = 0;
    std::vector<std::string> problems;

    bool ok() const { return sorted && permutation && balanced && level_balanced && capacities_filled && message_bounds; }
};

/// Checks outputs of one sort against its inputs (both indexed by rank).
Verdict verify_sort(const std::vector<std::vector<Key>>& inputs, const std::vector<SortResult>& outputs);

} // namespace jquick
