#pragma once

#include <span>
#include <variant>
#include <vector>

#include "rbc/comm.hpp"
#include "rbc/request.hpp"

namespace rbc {

/// Members of a new communicator, in local ranks of the parent.
struct GroupSpec {
    struct Range {
        int first = 0;
        int last = 0;
    };
    /// Ascending, duplicate-free.
    struct Explicit {
        std::vector<int> ranks;
    };

    std::variant<Range, Explicit> members;

    static GroupSpec range(int first, int last) { return {Range{first, last}}; }
    static GroupSpec list(std::vector<int> ranks) { return {Explicit{std::move(ranks)}}; }

    int size() const;
    bool contains(int parent_rank) const;
};

/// Request that yields a communicator on completion.
class CommRequest : public Request {
public:
    CommRequest() = default;
    explicit CommRequest(std::shared_ptr<detail::RequestState> state) : Request(std::move(state)) {}

    /// Valid once done(); throws InvalidUse before.
    const Comm& comm() const;
};

/// Context-isolated communicator over `spec`, called by exactly its members with the
/// same spec and tag.
///
/// A range spec on a range parent completes at once with a derived context and no
/// traffic. Any other spec goes through the group leader (smallest parent rank),
/// which allocates <base id, counter, 0, size, 0> and broadcasts it to the group
/// with `tag`; this costs |group| - 1 envelopes.
CommRequest icomm_create_group(const Comm& parent, const GroupSpec& spec, Tag tag);

/// Blocking form.
Comm comm_create_group(const Comm& parent, const GroupSpec& spec, Tag tag);

/// False iff two of `comms` share a context while covering different groups.
/// Descriptors of the same communicator held by different ranks count as one.
bool ctx_registry_check(std::span<const Comm> comms);

} // namespace rbc
