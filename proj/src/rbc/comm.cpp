#include "rbc/comm.hpp"

#include <stdexcept>
#include <string>

#include "rbc/errors.hpp"

namespace rbc {

const char* to_string(CommMode mode) {
    return mode == CommMode::TagScoped ? "tag" : "ctx";
}

Comm::Comm(Fabric& fabric, BaseRank me, Group group, ContextId ctx, CommMode mode)
    : fabric_(&fabric), me_(me), group_(std::move(group)), ctx_(ctx), mode_(mode) {}

int Comm::rank_of(BaseRank rank) const {
    if (auto local = group_.index_of(rank))
        return *local;
    throw std::invalid_argument("rank " + std::to_string(rank.id) + " is not a member of the communicator");
}

BaseRank Comm::base_rank(int local) const {
    if (local < 0 || local >= size())
        throw std::invalid_argument("local rank " + std::to_string(local) + " outside [0, " +
                                    std::to_string(size()) + ")");
    return group_.at(local);
}

Comm create_from_world(Fabric& fabric, BaseRank me, CommMode mode) {
    const int last = fabric.size() - 1;
    return Comm(fabric, me, Group::range(0, last), ContextId{0, 0, 0, last, 0, 1}, mode);
}

Comm split_range(const Comm& parent, int first, int last, int stride) {
    if (first < 0 || last < first || last >= parent.size() || stride < 1)
        throw std::invalid_argument("split_range: need 0 <= first <= last < " + std::to_string(parent.size()) +
                                    " and stride >= 1");
    const Group& pg = parent.group();
    if (!pg.is_range())
        throw InvalidUse("split_range: explicit-group communicators are split with icomm_create_group");
    const int s = pg.stride();
    Group child = Group::range(pg.first() + first * s, pg.first() + last * s, s * stride);
    ContextId ctx = parent.context();
    if (parent.mode() == CommMode::ContextScoped) {
        ctx = derive_range_ctx(ctx, child.first() - ctx.f, child.last() - ctx.f);
        ctx.stride = child.size() == 1 ? 1 : child.stride();
    }
    return Comm(parent.fabric(), parent.me(), std::move(child), ctx, parent.mode());
}

} // namespace rbc
