#pragma once

#include "rbc/context_id.hpp"
#include "rbc/group.hpp"
#include "rbc/transport.hpp"
#include "rbc/types.hpp"

namespace rbc {

/// How a communicator separates its traffic from other communicators on the same fabric.
enum class CommMode {
    /// Children inherit the parent context; concurrent operations on communicators
    /// overlapping in >= 2 ranks must use distinct tags.
    TagScoped,
    /// Children get a derived context ID; traffic is isolated without tag rules.
    ContextScoped,
};

const char* to_string(CommMode mode);

/// A communicator as seen by one rank (`me`): a group of base ranks plus a context.
///
/// Values are immutable and cheap to copy. A descriptor may be held by a rank that
/// is not a member; it is then only good for bookkeeping and rank arithmetic.
class Comm {
public:
    Comm() = default;
    Comm(Fabric& fabric, BaseRank me, Group group, ContextId ctx, CommMode mode);

    Fabric& fabric() const noexcept { return *fabric_; }
    BaseRank me() const noexcept { return me_; }
    const Group& group() const noexcept { return group_; }
    const ContextId& context() const noexcept { return ctx_; }
    CommMode mode() const noexcept { return mode_; }

    int size() const noexcept { return group_.size(); }
    bool is_member() const noexcept { return group_.contains(me_); }
    bool contains(BaseRank rank) const noexcept { return group_.contains(rank); }

    /// Local rank of the caller. Throws std::invalid_argument for non-members.
    int rank() const { return rank_of(me_); }
    /// Inverse translation (m - f) / stride. Throws std::invalid_argument for non-members.
    int rank_of(BaseRank rank) const;
    /// Forward translation f + r * stride. Throws std::invalid_argument when r is out of range.
    BaseRank base_rank(int local) const;

private:
    Fabric* fabric_ = nullptr;
    BaseRank me_;
    Group group_;
    ContextId ctx_;
    CommMode mode_ = CommMode::TagScoped;
};

/// All ranks of the fabric, root context <0, 0, 0, p-1, 0>. Local, no envelopes.
Comm create_from_world(Fabric& fabric, BaseRank me, CommMode mode = CommMode::TagScoped);

/// Local ranks first..last (every `stride`-th) of `parent`, created locally in O(1).
/// Context is inherited (TagScoped) or derived (ContextScoped). Non-members may call it.
Comm split_range(const Comm& parent, int first, int last, int stride = 1);

inline int comm_size(const Comm& comm) { return comm.size(); }
inline int comm_rank(const Comm& comm, BaseRank me) { return comm.rank_of(me); }
inline BaseRank translate_rank(const Comm& comm, int local) { return comm.base_rank(local); }
inline int translate_rank(const Comm& comm, BaseRank base) { return comm.rank_of(base); }

} // namespace rbc
