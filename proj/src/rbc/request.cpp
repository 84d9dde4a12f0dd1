#include "rbc/request.hpp"

#include "rbc/comm.hpp"
#include "rbc/errors.hpp"

namespace rbc {
namespace detail {

RequestState::RequestState(Fabric& fabric, BaseRank owner)
    : fabric_(&fabric), owner_(owner), thread_(std::this_thread::get_id()) {}

RequestState::~RequestState() {
    if (token_)
        fabric_->registry()->leave(*token_);
}

Progress RequestState::poll() {
    if (std::this_thread::get_id() != thread_)
        throw InvalidUse("request of rank " + std::to_string(owner_.id) + " tested from a foreign worker");
    if (done_)
        return Progress::Done;
    const Progress p = advance();
    return done_ ? Progress::Done : p;
}

void RequestState::track(const Comm& comm, Tag tag, const char* what) {
    if (TagRegistry* reg = fabric_->registry())
        token_ = reg->enter(comm.context(), tag, comm.group(), owner_, what);
}

void RequestState::complete(std::optional<Status> status) {
    done_ = true;
    status_ = status;
    if (token_) {
        fabric_->registry()->leave(*token_);
        token_.reset();
    }
}

} // namespace detail

BaseRank Request::owner() const {
    if (!state_)
        throw InvalidUse("null request has no owner");
    return state_->owner();
}

void Request::wait() {
    if (!state_)
        return;
    Fabric& fabric = state_->fabric();
    const BaseRank me = state_->owner();
    for (;;) {
        const std::uint64_t seen = fabric.arrivals(me);
        const Progress p = state_->poll();
        if (p == Progress::Done)
            return;
        if (p == Progress::Blocked)
            fabric.park(me, seen);
    }
}

bool testall(std::span<Request> reqs) {
    bool all = true;
    for (Request& r : reqs)
        all = r.test() && all;
    return all;
}

void waitall(std::span<Request> reqs) {
    Fabric* fabric = nullptr;
    BaseRank me;
    for (const Request& r : reqs) {
        if (!r.valid())
            continue;
        if (fabric && (r.fabric() != fabric || r.owner() != me))
            throw InvalidUse("waitall over requests of different ranks");
        fabric = r.fabric();
        me = r.owner();
    }
    if (!fabric)
        return;
    for (;;) {
        const std::uint64_t seen = fabric->arrivals(me);
        bool all = true;
        bool advanced = false;
        for (Request& r : reqs) {
            const Progress p = r.poll();
            all = all && p == Progress::Done;
            advanced = advanced || p == Progress::Advanced;
        }
        if (all)
            return;
        if (!advanced)
            fabric->park(me, seen);
    }
}

} // namespace rbc
