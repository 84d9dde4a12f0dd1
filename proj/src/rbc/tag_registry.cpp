#include "rbc/tag_registry.hpp"

#include <algorithm>
#include <sstream>

namespace rbc {

TagRegistry::Token TagRegistry::enter(const ContextId& ctx, Tag tag, const Group& group, BaseRank rank,
                                      const char* what) {
    std::lock_guard lock(mutex_);
    for (const Entry& e : entries_) {
        if (e.ctx != ctx || e.tag != tag || e.group == group)
            continue;
        if (overlap(e.group, group) < 2)
            continue;
        std::ostringstream os;
        os << "tag " << tag << " in context " << ctx << ": " << what << " on [" << group.first() << ".."
           << group.last() << "] at " << rank << " overlaps " << e.what << " on [" << e.group.first() << ".."
           << e.group.last() << "] at " << e.rank;
        reports_.push_back(os.str());
    }
    const Token token = next_++;
    entries_.push_back(Entry{token, ctx, tag, group, rank, what});
    return token;
}

void TagRegistry::leave(Token token) {
    std::lock_guard lock(mutex_);
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.token == token; });
    if (it != entries_.end())
        entries_.erase(it);
}

std::size_t TagRegistry::violations() const {
    std::lock_guard lock(mutex_);
    return reports_.size();
}

std::vector<std::string> TagRegistry::reports() const {
    std::lock_guard lock(mutex_);
    return reports_;
}

std::size_t TagRegistry::active() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

} // namespace rbc
