#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace jquick {

using Key = std::int64_t;

/// Pivot with its global position; (key, index) pairs are totally ordered.
struct PivotKey {
    Key key = 0;
    std::int64_t index = 0;
    friend bool operator==(const PivotKey&, const PivotKey&) = default;
};

inline bool key_less(const PivotKey& a, const PivotKey& b) {
    return a.key < b.key || (a.key == b.key && a.index < b.index);
}

/// Element at global position `index` goes left of the pivot.
inline bool is_small(Key key, std::int64_t index, const PivotKey& pivot) {
    return key < pivot.key || (key == pivot.key && index < pivot.index);
}

enum class Compare { Less, LessEqual };

struct Partition {
    std::vector<Key> small;
    std::vector<Key> large;
};

/// Stable split by `x < pivot` (Less) or `x <= pivot` (LessEqual).
Partition partition_local(std::span<const Key> elems, Key pivot, Compare cmp);

/// Stable split by the (key, global index) order; elems[i] sits at index first_index + i.
Partition partition_tiebroken(std::span<const Key> elems, std::int64_t first_index, const PivotKey& pivot);

/// Per-rank capacities of n elements over p ranks: ceil(n/p) for the first n mod p ranks.
struct Capacities {
    std::int64_t n = 0;
    int p = 1;

    std::int64_t cap(int b) const { return n / p + (b < n % p ? 1 : 0); }
    /// Sum of cap(y) for y < b.
    std::int64_t cum(int b) const { return b * (n / p) + std::min<std::int64_t>(b, n % p); }
    /// Ranks with nonzero capacity.
    int active() const { return static_cast<int>(std::min<std::int64_t>(n, p)); }
};

/// Load of a task over ranks [first, last]. The first rank holds r elements, the
/// last one whatever remains of `total`, everybody in between its full capacity.
struct TaskShape {
    int first = 0;
    int last = 0;
    std::int64_t r = 0;
    std::int64_t total = 0;

    int size() const { return last - first + 1; }
    bool contains(int b) const { return b >= first && b <= last; }
    /// Elements held by ranks first..b.
    std::int64_t cum(int b, const Capacities& caps) const;
    std::int64_t count(int b, const Capacities& caps) const { return cum(b, caps) - cum(b - 1, caps); }
    std::int64_t offset(int b, const Capacities& caps) const { return cum(b - 1, caps); }
    /// Rank holding task position `pos` (0 <= pos < total).
    int owner(std::int64_t pos, const Capacities& caps) const;

    friend bool operator==(const TaskShape&, const TaskShape&) = default;
};

struct Split {
    TaskShape left;
    TaskShape right;
    /// Rank where the capacity walk reaches s_total.
    int boundary = 0;
    /// True when `boundary` holds elements of both children.
    bool janus = false;
};

/// Capacity walk for s_total small elements, 0 < s_total < shape.total.
Split split_groups(const TaskShape& shape, const Capacities& caps, std::int64_t s_total);

struct Transfer {
    int target = 0;
    /// Offset into the source's side vector.
    std::int64_t begin = 0;
    std::int64_t count = 0;
    friend bool operator==(const Transfer&, const Transfer&) = default;
};

/// Cuts a source's run [pos, pos + count) of `dest`'s position space into
/// pieces, one per target rank, in target order.
std::vector<Transfer> route(std::int64_t pos, std::int64_t count, const TaskShape& dest, const Capacities& caps);

/// Reorders `v` so that its first k entries are the k smallest.
void quickselect(std::vector<Key>& v, std::size_t k);

/// Two-rank base case seen from one side: of the union, the left rank keeps its
/// `keep` smallest and the right rank the `keep` largest, both sorted.
std::vector<Key> base_case_pair(std::vector<Key> mine, std::span<const Key> other, bool left, std::size_t keep);

struct SampleConstants {
    double k1 = 1.0;
    double k2 = 0.0;
    double k3 = 3.0;
};

/// max(k1 * ceil(log2 q), k2 * total / q, k3), rounded up to an odd number.
int sample_count(int q, std::int64_t total, const SampleConstants& k);

/// Seed shared by all members of one task for one pivot attempt.
std::uint64_t task_seed(std::uint64_t seed, std::int64_t global_offset, std::int64_t total, int depth, int attempt);

/// Uniform draws from [0, total) using the task's shared stream.
std::vector<std::int64_t> draw_positions(std::uint64_t seed, std::int64_t total, int count);

} // namespace jquick
