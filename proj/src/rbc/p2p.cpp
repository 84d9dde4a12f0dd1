#include "rbc/p2p.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>

#include "rbc/errors.hpp"

namespace rbc {

namespace {

void require_member(const Comm& comm) {
    if (!comm.is_member())
        throw InvalidUse("rank " + std::to_string(comm.me().id) + " is not a member of the communicator");
}

void require_user_tag(Tag tag) {
    if (tag < 0)
        throw std::invalid_argument("negative tag " + std::to_string(tag));
    if (is_reserved_tag(tag))
        throw std::invalid_argument("tag " + std::to_string(tag) + " lies in the reserved collective band");
}

void require_source(const Comm& comm, int src) {
    if (src != kAnySource && (src < 0 || src >= comm.size()))
        throw std::invalid_argument("source rank " + std::to_string(src) + " outside [0, " +
                                    std::to_string(comm.size()) + ")");
}

Status copy_out(const Comm& comm, Envelope& env, std::span<std::byte> buffer) {
    std::memcpy(buffer.data(), env.payload.data(), env.payload.size());
    return Status{comm.rank_of(env.header.src), env.header.tag, env.payload.size()};
}

/// Dequeues the envelope announced by `header` into `buffer`.
Status receive_matched(const Comm& comm, const EnvelopeHeader& header, std::span<std::byte> buffer) {
    if (header.size > buffer.size())
        throw TruncationError("message of " + std::to_string(header.size) + " bytes does not fit a " +
                              std::to_string(buffer.size()) + "-byte buffer");
    auto env = comm.fabric().raw_recv(comm.me(), comm.context(), header.tag, header.src);
    if (!env)
        throw ProtocolError("probed envelope vanished before receive");
    return copy_out(comm, *env, buffer);
}

class SendRequest final : public detail::RequestState {
public:
    using RequestState::RequestState;
    void finish(int dst, Tag tag, std::size_t count) { complete(Status{dst, tag, count}); }

protected:
    Progress advance() override { return Progress::Done; }
};

class RecvRequest final : public detail::RequestState {
public:
    RecvRequest(const Comm& comm, int src, Tag tag, std::span<std::byte> buffer)
        : RequestState(comm.fabric(), comm.me()), comm_(comm), src_(src), tag_(tag), buffer_(buffer) {
        track(comm_, tag_, src == kAnySource ? "irecv(any)" : "irecv");
    }

protected:
    Progress advance() override {
        // Wildcard requests search again on every test until a member-sourced
        // envelope shows up, then latch onto its concrete source.
        std::optional<Status> found = detail::probe_member(comm_, src_, tag_);
        if (!found)
            return Progress::Blocked;
        src_ = found->source;
        auto header = comm_.fabric().raw_probe(comm_.me(), comm_.context(), tag_, comm_.base_rank(src_));
        count_transition();
        complete(receive_matched(comm_, *header, buffer_));
        return Progress::Done;
    }

private:
    Comm comm_;
    int src_;
    Tag tag_;
    std::span<std::byte> buffer_;
};

} // namespace

namespace detail {

void post_send(const Comm& comm, int dst, Tag tag, std::span<const std::byte> payload, std::uint64_t check) {
    Envelope env;
    env.header.ctx = comm.context();
    env.header.tag = tag;
    env.header.src = comm.me();
    env.header.dst = comm.base_rank(dst);
    env.header.size = payload.size();
    env.header.check = check;
    env.payload.assign(payload.begin(), payload.end());
    comm.fabric().raw_send(std::move(env));
}

MessageRecv::MessageRecv(const Comm& comm, int src, Tag tag, std::uint64_t check)
    : comm_(&comm), src_(src), src_base_(comm.base_rank(src)), tag_(tag), check_(check) {}

bool MessageRecv::try_complete() {
    if (done_)
        return true;
    auto env = comm_->fabric().raw_recv(comm_->me(), comm_->context(), tag_, src_base_);
    if (!env)
        return false;
    if (check_ != 0 && env->header.check != 0 && env->header.check != check_)
        throw ProtocolError("collective schedule mismatch between rank " + std::to_string(src_base_.id) +
                            " and rank " + std::to_string(comm_->me().id) + " (tag " + std::to_string(tag_) + ")");
    payload_ = std::move(env->payload);
    done_ = true;
    return true;
}

std::optional<Status> probe_member(const Comm& comm, int src, Tag tag) {
    Fabric& fabric = comm.fabric();
    std::optional<EnvelopeHeader> header;
    if (src == kAnySource) {
        const Group& group = comm.group();
        header = fabric.raw_probe_if(comm.me(), comm.context(), tag,
                                     [&group](BaseRank from) { return group.contains(from); });
    } else {
        header = fabric.raw_probe(comm.me(), comm.context(), tag, comm.base_rank(src));
    }
    if (!header)
        return std::nullopt;
    return Status{comm.rank_of(header->src), header->tag, header->size};
}

} // namespace detail

void send(const Comm& comm, int dst, Tag tag, std::span<const std::byte> payload) {
    // Eager: the envelope is in the destination mailbox once this returns.
    Request req = isend(comm, dst, tag, payload);
    req.wait();
}

Request isend(const Comm& comm, int dst, Tag tag, std::span<const std::byte> payload) {
    require_member(comm);
    require_user_tag(tag);
    if (dst < 0 || dst >= comm.size())
        throw std::invalid_argument("destination rank " + std::to_string(dst) + " outside [0, " +
                                    std::to_string(comm.size()) + ")");
    detail::post_send(comm, dst, tag, payload);
    auto state = std::make_shared<SendRequest>(comm.fabric(), comm.me());
    state->finish(dst, tag, payload.size());
    return Request(std::move(state));
}

Status recv(const Comm& comm, int src, Tag tag, std::span<std::byte> buffer) {
    Request req = irecv(comm, src, tag, buffer);
    req.wait();
    return *req.status();
}

Request irecv(const Comm& comm, int src, Tag tag, std::span<std::byte> buffer) {
    require_member(comm);
    require_user_tag(tag);
    require_source(comm, src);
    return Request(std::make_shared<RecvRequest>(comm, src, tag, buffer));
}

Status probe(const Comm& comm, int src, Tag tag) {
    Fabric& fabric = comm.fabric();
    for (;;) {
        const std::uint64_t seen = fabric.arrivals(comm.me());
        if (auto st = iprobe(comm, src, tag))
            return *st;
        fabric.park(comm.me(), seen);
    }
}

std::optional<Status> iprobe(const Comm& comm, int src, Tag tag) {
    require_member(comm);
    require_user_tag(tag);
    require_source(comm, src);
    return detail::probe_member(comm, src, tag);
}

} // namespace rbc
