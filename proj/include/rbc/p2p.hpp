#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "rbc/comm.hpp"
#include "rbc/request.hpp"
#include "rbc/types.hpp"

namespace rbc {

// Byte-level point-to-point operations. `src` may be kAnySource for receives and
// probes; wildcard matching only accepts senders that are members of `comm`.
// Public entry points reject tags inside the reserved collective band.

void send(const Comm& comm, int dst, Tag tag, std::span<const std::byte> payload);
Request isend(const Comm& comm, int dst, Tag tag, std::span<const std::byte> payload);

/// Throws TruncationError when the matched payload is larger than `buffer`.
Status recv(const Comm& comm, int src, Tag tag, std::span<std::byte> buffer);
Request irecv(const Comm& comm, int src, Tag tag, std::span<std::byte> buffer);

Status probe(const Comm& comm, int src, Tag tag);
std::optional<Status> iprobe(const Comm& comm, int src, Tag tag);

template <class T>
concept Trivial = std::is_trivially_copyable_v<T> && !std::is_same_v<std::remove_cv_t<T>, std::byte>;

template <Trivial T>
void send(const Comm& comm, int dst, Tag tag, std::span<const T> values) {
    send(comm, dst, tag, std::as_bytes(values));
}

template <Trivial T>
Request isend(const Comm& comm, int dst, Tag tag, std::span<const T> values) {
    return isend(comm, dst, tag, std::as_bytes(values));
}

template <Trivial T>
Status recv(const Comm& comm, int src, Tag tag, std::span<T> values) {
    return recv(comm, src, tag, std::as_writable_bytes(values));
}

template <Trivial T>
Request irecv(const Comm& comm, int src, Tag tag, std::span<T> values) {
    return irecv(comm, src, tag, std::as_writable_bytes(values));
}

namespace detail {

/// Unchecked send used by collectives (reserved tags allowed). Returns immediately.
void post_send(const Comm& comm, int dst, Tag tag, std::span<const std::byte> payload, std::uint64_t check = 0);

/// Receive of a whole message of any size from a concrete local source.
class MessageRecv {
public:
    MessageRecv() = default;
    MessageRecv(const Comm& comm, int src, Tag tag, std::uint64_t check = 0);

    /// True once the message has been dequeued. Throws ProtocolError on a checksum mismatch.
    bool try_complete();
    bool done() const noexcept { return done_; }
    int source() const noexcept { return src_; }
    std::vector<std::byte>& payload() noexcept { return payload_; }

private:
    const Comm* comm_ = nullptr;
    int src_ = 0;
    BaseRank src_base_;
    Tag tag_ = 0;
    std::uint64_t check_ = 0;
    bool done_ = false;
    std::vector<std::byte> payload_;
};

std::optional<Status> probe_member(const Comm& comm, int src, Tag tag);

} // namespace detail
} // namespace rbc
