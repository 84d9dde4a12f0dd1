#include "rbc/ctx_create.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "rbc/collectives.hpp"
#include "rbc/errors.hpp"

namespace rbc {

int GroupSpec::size() const {
    if (const auto* r = std::get_if<Range>(&members))
        return r->last - r->first + 1;
    return static_cast<int>(std::get<Explicit>(members).ranks.size());
}

bool GroupSpec::contains(int parent_rank) const {
    if (const auto* r = std::get_if<Range>(&members))
        return parent_rank >= r->first && parent_rank <= r->last;
    const auto& v = std::get<Explicit>(members).ranks;
    return std::binary_search(v.begin(), v.end(), parent_rank);
}

namespace {

class CreateState final : public detail::RequestState {
public:
    CreateState(const Comm& parent) : RequestState(parent.fabric(), parent.me()) {}

    void finish(Comm comm) {
        result_ = std::move(comm);
        complete();
    }

    void begin_broadcast(const Comm& tmp, Group group, Tag tag, bool leader) {
        group_ = std::move(group);
        if (leader) {
            RankLocal& local = tmp.fabric().local(tmp.me());
            ctx_ = ContextId{tmp.me().id, local.leader_counter++, 0, group_.size(), 0, 0};
        }
        bcast_ = ibcast(tmp, 0, std::span<ContextId>(&ctx_, 1), tag);
        count_transition();
        if (bcast_.done())
            finish(Comm(tmp.fabric(), tmp.me(), group_, ctx_, CommMode::ContextScoped));
        else
            fabric_ = &tmp.fabric();
    }

    const Comm& result() const { return result_; }

protected:
    Progress advance() override {
        if (const Progress pr = bcast_.poll(); pr != Progress::Done)
            return pr;
        count_transition();
        finish(Comm(*fabric_, owner(), group_, ctx_, CommMode::ContextScoped));
        return Progress::Done;
    }

private:
    Comm result_;
    Group group_;
    ContextId ctx_;
    Request bcast_;
    Fabric* fabric_ = nullptr;
};

void validate(const Comm& parent, const GroupSpec& spec) {
    const int p = parent.size();
    if (const auto* r = std::get_if<GroupSpec::Range>(&spec.members)) {
        if (r->first < 0 || r->last < r->first || r->last >= p)
            throw std::invalid_argument("icomm_create_group: range outside the parent");
        return;
    }
    const auto& v = std::get<GroupSpec::Explicit>(spec.members).ranks;
    if (v.empty())
        throw std::invalid_argument("icomm_create_group: empty group");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0 || v[i] >= p)
            throw std::invalid_argument("icomm_create_group: member " + std::to_string(v[i]) + " outside the parent");
        if (i > 0 && v[i] <= v[i - 1])
            throw std::invalid_argument("icomm_create_group: members must be ascending and unique");
    }
}

std::vector<int> spec_ranks(const GroupSpec& spec) {
    if (const auto* r = std::get_if<GroupSpec::Range>(&spec.members)) {
        std::vector<int> v(static_cast<std::size_t>(r->last - r->first + 1));
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = r->first + static_cast<int>(i);
        return v;
    }
    return std::get<GroupSpec::Explicit>(spec.members).ranks;
}

} // namespace

const Comm& CommRequest::comm() const {
    if (!done())
        throw InvalidUse("communicator requested before creation completed");
    return static_cast<const CreateState&>(*state_).result();
}

CommRequest icomm_create_group(const Comm& parent, const GroupSpec& spec, Tag tag) {
    if (tag < 0 || is_reserved_tag(tag))
        throw std::invalid_argument("icomm_create_group: tag " + std::to_string(tag) + " is negative or reserved");
    validate(parent, spec);
    if (!parent.is_member() || !spec.contains(parent.rank()))
        throw InvalidUse("icomm_create_group called by rank " + std::to_string(parent.me().id) +
                         " outside the new group");

    auto state = std::make_shared<CreateState>(parent);
    const auto* range = std::get_if<GroupSpec::Range>(&spec.members);
    if (range && parent.group().is_range()) {
        Comm scoped(parent.fabric(), parent.me(), parent.group(), parent.context(), CommMode::ContextScoped);
        state->finish(split_range(scoped, range->first, range->last));
        return CommRequest(std::move(state));
    }

    std::vector<int> base;
    for (int r : spec_ranks(spec))
        base.push_back(parent.base_rank(r).id);
    std::sort(base.begin(), base.end());
    Group group = Group::table(std::move(base));
    // The new context is not known yet, so the broadcast runs on the parent's.
    Comm tmp(parent.fabric(), parent.me(), group, parent.context(), CommMode::TagScoped);
    const bool leader = spec_ranks(spec).front() == parent.rank();
    state->begin_broadcast(tmp, std::move(group), tag, leader);
    return CommRequest(std::move(state));
}

Comm comm_create_group(const Comm& parent, const GroupSpec& spec, Tag tag) {
    CommRequest req = icomm_create_group(parent, spec, tag);
    req.wait();
    return req.comm();
}

bool ctx_registry_check(std::span<const Comm> comms) {
    std::unordered_map<ContextId, const Group*, ContextIdHash> seen;
    for (const Comm& c : comms) {
        auto [it, inserted] = seen.emplace(c.context(), &c.group());
        if (!inserted && !(*it->second == c.group()))
            return false;
    }
    return true;
}

} // namespace rbc
