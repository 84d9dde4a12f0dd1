#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "rbc/types.hpp"

namespace rbc {

/// Ordered set of base ranks: either a strided range {f, f+s, ..., f+s*floor((l-f)/s)}
/// held in O(1) space, or an explicit ascending translation table.
class Group {
public:
    Group() = default;

    static Group range(int first, int last, int stride = 1);
    static Group table(std::vector<int> base_ranks);

    int size() const noexcept { return size_; }
    bool is_range() const noexcept { return table_ == nullptr; }
    int first() const noexcept { return first_; }
    int last() const noexcept { return last_; }
    int stride() const noexcept { return stride_; }

    /// Base rank of local rank `local`; no bounds check.
    BaseRank at(int local) const noexcept {
        return table_ ? BaseRank((*table_)[static_cast<std::size_t>(local)]) : BaseRank(first_ + local * stride_);
    }

    std::optional<int> index_of(BaseRank rank) const noexcept;
    bool contains(BaseRank rank) const noexcept { return index_of(rank).has_value(); }

    std::vector<int> members() const;

    friend bool operator==(const Group& lhs, const Group& rhs);

private:
    int first_ = 0;
    int last_ = 0;
    int stride_ = 1;
    int size_ = 0;
    std::shared_ptr<const std::vector<int>> table_;
};

/// Number of base ranks contained in both groups.
int overlap(const Group& lhs, const Group& rhs);

} // namespace rbc
