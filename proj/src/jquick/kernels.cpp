#include "jquick/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace jquick {

Partition partition_local(std::span<const Key> elems, Key pivot, Compare cmp) {
    Partition out;
    for (Key x : elems) {
        const bool small = cmp == Compare::Less ? x < pivot : x <= pivot;
        (small ? out.small : out.large).push_back(x);
    }
    return out;
}

Partition partition_tiebroken(std::span<const Key> elems, std::int64_t first_index, const PivotKey& pivot) {
    Partition out;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        const bool small = is_small(elems[i], first_index + static_cast<std::int64_t>(i), pivot);
        (small ? out.small : out.large).push_back(elems[i]);
    }
    return out;
}

std::int64_t TaskShape::cum(int b, const Capacities& caps) const {
    if (b < first)
        return 0;
    if (b >= last)
        return total;
    return r + caps.cum(b + 1) - caps.cum(first + 1);
}

int TaskShape::owner(std::int64_t pos, const Capacities& caps) const {
    int lo = first;
    int hi = last;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (cum(mid, caps) > pos)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

Split split_groups(const TaskShape& shape, const Capacities& caps, std::int64_t s_total) {
    if (s_total <= 0 || s_total >= shape.total)
        throw std::invalid_argument("split_groups: both sides must be nonempty");
    Split out;
    const int j = shape.owner(s_total - 1, caps);
    const std::int64_t reach = shape.cum(j, caps);
    out.boundary = j;
    out.janus = reach > s_total;
    out.left = TaskShape{shape.first, j, j == shape.first ? s_total : shape.r, s_total};
    const std::int64_t g_total = shape.total - s_total;
    if (out.janus)
        out.right = TaskShape{j, shape.last, reach - s_total, g_total};
    else
        out.right = TaskShape{j + 1, shape.last, shape.count(j + 1, caps), g_total};
    return out;
}

std::vector<Transfer> route(std::int64_t pos, std::int64_t count, const TaskShape& dest, const Capacities& caps) {
    std::vector<Transfer> out;
    if (count <= 0)
        return out;
    int t = dest.owner(pos, caps);
    std::int64_t done = 0;
    while (done < count) {
        const std::int64_t room = dest.cum(t, caps) - (pos + done);
        const std::int64_t take = std::min(room, count - done);
        out.push_back({t, done, take});
        done += take;
        ++t;
    }
    return out;
}

void quickselect(std::vector<Key>& v, std::size_t k) {
    if (k == 0 || k >= v.size())
        return;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
}

std::vector<Key> base_case_pair(std::vector<Key> mine, std::span<const Key> other, bool left, std::size_t keep) {
    mine.insert(mine.end(), other.begin(), other.end());
    if (keep > mine.size())
        throw std::invalid_argument("base_case_pair: capacity exceeds the pair's elements");
    const std::size_t cut = left ? keep : mine.size() - keep;
    quickselect(mine, cut);
    std::vector<Key> out = left ? std::vector<Key>(mine.begin(), mine.begin() + static_cast<std::ptrdiff_t>(cut))
                                : std::vector<Key>(mine.begin() + static_cast<std::ptrdiff_t>(cut), mine.end());
    std::sort(out.begin(), out.end());
    return out;
}

int sample_count(int q, std::int64_t total, const SampleConstants& k) {
    int log_q = 0;
    while ((1 << log_q) < q)
        ++log_q;
    const double want = std::max({k.k1 * log_q, k.k2 * static_cast<double>(total) / q, k.k3});
    int s = std::max(1, static_cast<int>(std::ceil(want)));
    if (s % 2 == 0)
        ++s;
    return s;
}

std::uint64_t task_seed(std::uint64_t seed, std::int64_t global_offset, std::int64_t total, int depth, int attempt) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    std::uint64_t h = splitmix(seed);
    for (std::uint64_t v : {static_cast<std::uint64_t>(global_offset), static_cast<std::uint64_t>(total),
                            static_cast<std::uint64_t>(depth), static_cast<std::uint64_t>(attempt)})
        h = splitmix(h ^ v);
    return h;
}

std::vector<std::int64_t> draw_positions(std::uint64_t seed, std::int64_t total, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> dist(0, total - 1);
    std::vector<std::int64_t> out(static_cast<std::size_t>(count));
    for (auto& x : out)
        x = dist(rng);
    return out;
}

} // namespace jquick
