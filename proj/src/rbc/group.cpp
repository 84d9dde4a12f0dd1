#include "rbc/group.hpp"

#include <algorithm>
#include <stdexcept>

namespace rbc {

Group Group::range(int first, int last, int stride) {
    if (stride < 1 || first < 0 || last < first)
        throw std::invalid_argument("Group::range: need 0 <= first <= last and stride >= 1");
    Group g;
    g.size_ = (last - first) / stride + 1;
    g.first_ = first;
    g.last_ = first + (g.size_ - 1) * stride;
    g.stride_ = stride;
    return g;
}

Group Group::table(std::vector<int> base_ranks) {
    if (base_ranks.empty())
        throw std::invalid_argument("Group::table: empty group");
    if (!std::is_sorted(base_ranks.begin(), base_ranks.end()) ||
        std::adjacent_find(base_ranks.begin(), base_ranks.end()) != base_ranks.end() || base_ranks.front() < 0)
        throw std::invalid_argument("Group::table: ranks must be ascending and duplicate-free");
    Group g;
    g.size_ = static_cast<int>(base_ranks.size());
    g.first_ = base_ranks.front();
    g.last_ = base_ranks.back();
    g.stride_ = 0;
    g.table_ = std::make_shared<const std::vector<int>>(std::move(base_ranks));
    return g;
}

std::optional<int> Group::index_of(BaseRank rank) const noexcept {
    const int m = rank.id;
    if (m < first_ || m > last_)
        return std::nullopt;
    if (!table_) {
        if ((m - first_) % stride_ != 0)
            return std::nullopt;
        return (m - first_) / stride_;
    }
    auto it = std::lower_bound(table_->begin(), table_->end(), m);
    if (it == table_->end() || *it != m)
        return std::nullopt;
    return static_cast<int>(it - table_->begin());
}

std::vector<int> Group::members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size_));
    for (int i = 0; i < size_; ++i)
        out.push_back(at(i).id);
    return out;
}

bool operator==(const Group& lhs, const Group& rhs) {
    if (lhs.size_ != rhs.size_ || lhs.first_ != rhs.first_ || lhs.last_ != rhs.last_)
        return false;
    if (lhs.is_range() && rhs.is_range())
        return lhs.size_ == 1 || lhs.stride_ == rhs.stride_;
    return lhs.members() == rhs.members();
}

int overlap(const Group& lhs, const Group& rhs) {
    const Group& small = lhs.size() <= rhs.size() ? lhs : rhs;
    const Group& other = lhs.size() <= rhs.size() ? rhs : lhs;
    int count = 0;
    for (int i = 0; i < small.size(); ++i)
        count += other.contains(small.at(i)) ? 1 : 0;
    return count;
}

} // namespace rbc
