#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "rbc/context_id.hpp"
#include "rbc/group.hpp"
#include "rbc/types.hpp"

namespace rbc {

/// Debug registry for the tag discipline of communicators sharing one context:
/// two different groups that overlap in >= 2 ranks must not have operations with
/// the same tag in flight at the same time.
class TagRegistry {
public:
    using Token = std::uint64_t;

    Token enter(const ContextId& ctx, Tag tag, const Group& group, BaseRank rank, const char* what);
    void leave(Token token);

    std::size_t violations() const;
    std::vector<std::string> reports() const;
    std::size_t active() const;

private:
    struct Entry {
        Token token;
        ContextId ctx;
        Tag tag;
        Group group;
        BaseRank rank;
        const char* what;
    };

    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
    std::vector<std::string> reports_;
    Token next_ = 1;
};

} // namespace rbc
