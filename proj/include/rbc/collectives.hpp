#pragma once

#include <cstddef>
#include <cstring>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbc/comm.hpp"
#include "rbc/errors.hpp"
#include "rbc/p2p.hpp"
#include "rbc/request.hpp"
#include "rbc/types.hpp"

namespace rbc {

/// Fixed tags of collectives started without a user tag.
namespace tags {
inline constexpr Tag kBcast = kReservedTagBase;
inline constexpr Tag kReduce = kReservedTagBase + 1;
inline constexpr Tag kScan = kReservedTagBase + 2;
inline constexpr Tag kExscan = kReservedTagBase + 3;
inline constexpr Tag kGather = kReservedTagBase + 4;
inline constexpr Tag kGatherv = kReservedTagBase + 5;
inline constexpr Tag kBarrierUp = kReservedTagBase + 6;
inline constexpr Tag kBarrierDown = kReservedTagBase + 7;

inline constexpr Tag kIbcast = kReservedTagBase + 8;
inline constexpr Tag kIreduce = kReservedTagBase + 9;
inline constexpr Tag kIscan = kReservedTagBase + 10;
inline constexpr Tag kIexscan = kReservedTagBase + 11;
inline constexpr Tag kIgather = kReservedTagBase + 12;
inline constexpr Tag kIgatherv = kReservedTagBase + 13;
inline constexpr Tag kIbarrierUp = kReservedTagBase + 14;
inline constexpr Tag kIbarrierDown = kReservedTagBase + 15;
} // namespace tags

enum class CollectiveOp { Bcast, Reduce, Scan, Exscan, Gather, Gatherv, Barrier };

/// Elementwise reduction operator. `combine(a, b)` folds a lower-ranked `a` with a
/// higher-ranked `b`; ranks are never reordered, even when `commutative` is set.
template <class T>
struct ReduceOp {
    std::function<T(const T&, const T&)> combine;
    bool commutative = true;
    /// Required by exscan, where local rank 0 receives it.
    std::optional<T> identity;
};

namespace ops {
template <class T>
ReduceOp<T> sum() { return {[](const T& a, const T& b) { return a + b; }, true, T{}}; }
template <class T>
ReduceOp<T> max() { return {[](const T& a, const T& b) { return a < b ? b : a; }, true, std::nullopt}; }
template <class T>
ReduceOp<T> min() { return {[](const T& a, const T& b) { return b < a ? b : a; }, true, std::nullopt}; }
} // namespace ops

namespace detail {

using Bytes = std::vector<std::byte>;
using ByteCombine = std::function<Bytes(std::span<const std::byte> lower, std::span<const std::byte> upper)>;
using ByteSink = std::function<void(Bytes&&)>;

Request start_bcast(const Comm& comm, int root, Bytes payload, ByteSink sink, Tag tag);
Request start_reduce(const Comm& comm, int root, Bytes payload, ByteCombine combine, ByteSink sink, Tag tag,
                     CollectiveOp op);
/// `identity` is delivered to local rank 0 for exclusive scans.
Request start_scan(const Comm& comm, Bytes payload, ByteCombine combine, std::optional<Bytes> identity,
                   ByteSink sink, Tag tag, bool exclusive);
Request start_barrier(const Comm& comm, Tag up_tag, Tag down_tag);

template <class T>
ByteCombine elementwise(std::function<T(const T&, const T&)> f) {
    return [f = std::move(f)](std::span<const std::byte> lo, std::span<const std::byte> hi) {
        if (lo.size() != hi.size())
            throw std::invalid_argument("reduce: contributions have different lengths (" +
                                        std::to_string(lo.size() / sizeof(T)) + " vs " +
                                        std::to_string(hi.size() / sizeof(T)) + ")");
        const std::size_t n = lo.size() / sizeof(T);
        Bytes out(lo.size());
        for (std::size_t i = 0; i < n; ++i) {
            T a, b;
            std::memcpy(&a, lo.data() + i * sizeof(T), sizeof(T));
            std::memcpy(&b, hi.data() + i * sizeof(T), sizeof(T));
            const T c = f(a, b);
            std::memcpy(out.data() + i * sizeof(T), &c, sizeof(T));
        }
        return out;
    };
}

template <class T>
Bytes to_bytes(std::span<const T> values) {
    auto b = std::as_bytes(values);
    return Bytes(b.begin(), b.end());
}

/// Sink copying a result of exactly out.size() elements into `out`.
template <class T>
ByteSink exact_sink(std::span<T> out, const char* what) {
    return [out, what](Bytes&& bytes) {
        if (bytes.size() > out.size_bytes())
            throw TruncationError(std::string(what) + ": result of " + std::to_string(bytes.size()) +
                                  " bytes exceeds a " + std::to_string(out.size_bytes()) + "-byte buffer");
        if (bytes.size() != out.size_bytes())
            throw std::invalid_argument(std::string(what) + ": result length differs from buffer length");
        std::memcpy(out.data(), bytes.data(), bytes.size());
    };
}

} // namespace detail

/// Broadcast of `root`'s buffer to every member. Each member passes a buffer of the same length.
template <Trivial T>
Request ibcast(const Comm& comm, int root, std::span<T> buffer, Tag tag = tags::kIbcast) {
    detail::Bytes payload;
    if (comm.is_member() && comm.rank() == root)
        payload = detail::to_bytes(std::span<const T>(buffer));
    return detail::start_bcast(comm, root, std::move(payload), detail::exact_sink(buffer, "bcast"), tag);
}

/// `recv` is written at the root only and must match the length of `send`.
template <Trivial T>
Request ireduce(const Comm& comm, int root, std::span<const T> send, std::span<T> recv, const ReduceOp<T>& op,
                Tag tag = tags::kIreduce) {
    return detail::start_reduce(comm, root, detail::to_bytes(send), detail::elementwise<T>(op.combine),
                                detail::exact_sink(recv, "reduce"), tag, CollectiveOp::Reduce);
}

template <Trivial T>
Request iscan(const Comm& comm, std::span<const T> send, std::span<T> recv, const ReduceOp<T>& op,
              Tag tag = tags::kIscan) {
    return detail::start_scan(comm, detail::to_bytes(send), detail::elementwise<T>(op.combine), std::nullopt,
                              detail::exact_sink(recv, "scan"), tag, false);
}

/// Throws std::invalid_argument when `op` has no identity.
template <Trivial T>
Request iexscan(const Comm& comm, std::span<const T> send, std::span<T> recv, const ReduceOp<T>& op,
                Tag tag = tags::kIexscan) {
    if (!op.identity)
        throw std::invalid_argument("exscan requires a reduce operator with an identity");
    std::vector<T> id(send.size(), *op.identity);
    return detail::start_scan(comm, detail::to_bytes(send), detail::elementwise<T>(op.combine),
                              detail::to_bytes(std::span<const T>(id)), detail::exact_sink(recv, "exscan"), tag, true);
}

/// Concatenation of all members' `send` in local rank order, delivered to the root.
/// `counts` (elements per member) is read at the root only; a total larger than
/// `recv` throws TruncationError there.
template <Trivial T>
Request igatherv(const Comm& comm, int root, std::span<const T> send, std::span<T> recv, std::span<const int> counts,
                 Tag tag = tags::kIgatherv) {
    std::size_t expected = 0;
    const bool at_root = comm.is_member() && comm.rank() == root;
    if (at_root) {
        if (counts.size() != static_cast<std::size_t>(comm.size()))
            throw std::invalid_argument("gatherv: counts must have one entry per member");
        for (int c : counts) {
            if (c < 0)
                throw std::invalid_argument("gatherv: negative count");
            expected += static_cast<std::size_t>(c);
        }
        if (expected > recv.size())
            throw TruncationError("gatherv: " + std::to_string(expected) + " elements do not fit a buffer of " +
                                  std::to_string(recv.size()));
    }
    auto concat = [](std::span<const std::byte> lo, std::span<const std::byte> hi) {
        detail::Bytes out(lo.begin(), lo.end());
        out.insert(out.end(), hi.begin(), hi.end());
        return out;
    };
    auto sink = [recv, expected](detail::Bytes&& bytes) {
        if (bytes.size() != expected * sizeof(T))
            throw ProtocolError("gatherv: received " + std::to_string(bytes.size() / sizeof(T)) +
                                " elements, counts announce " + std::to_string(expected));
        std::memcpy(recv.data(), bytes.data(), bytes.size());
    };
    return detail::start_reduce(comm, root, detail::to_bytes(send), concat, sink, tag, CollectiveOp::Gatherv);
}

/// Equal-count gather: every member contributes send.size() elements.
template <Trivial T>
Request igather(const Comm& comm, int root, std::span<const T> send, std::span<T> recv, Tag tag = tags::kIgather) {
    std::vector<int> counts(static_cast<std::size_t>(comm.size()), static_cast<int>(send.size()));
    return igatherv(comm, root, send, recv, std::span<const int>(counts), tag);
}

inline Request ibarrier(const Comm& comm) { return detail::start_barrier(comm, tags::kIbarrierUp, tags::kIbarrierDown); }
/// A user tag carries both sweeps.
inline Request ibarrier(const Comm& comm, Tag tag) { return detail::start_barrier(comm, tag, tag); }

template <Trivial T>
void bcast(const Comm& comm, int root, std::span<T> buffer) {
    ibcast(comm, root, buffer, tags::kBcast).wait();
}
template <Trivial T>
void reduce(const Comm& comm, int root, std::span<const T> send, std::span<T> recv, const ReduceOp<T>& op) {
    ireduce(comm, root, send, recv, op, tags::kReduce).wait();
}
template <Trivial T>
void scan(const Comm& comm, std::span<const T> send, std::span<T> recv, const ReduceOp<T>& op) {
    iscan(comm, send, recv, op, tags::kScan).wait();
}
template <Trivial T>
void exscan(const Comm& comm, std::span<const T> send, std::span<T> recv, const ReduceOp<T>& op) {
    iexscan(comm, send, recv, op, tags::kExscan).wait();
}
template <Trivial T>
void gather(const Comm& comm, int root, std::span<const T> send, std::span<T> recv) {
    igather(comm, root, send, recv, tags::kGather).wait();
}
template <Trivial T>
void gatherv(const Comm& comm, int root, std::span<const T> send, std::span<T> recv, std::span<const int> counts) {
    igatherv(comm, root, send, recv, counts, tags::kGatherv).wait();
}
inline void barrier(const Comm& comm) { detail::start_barrier(comm, tags::kBarrierUp, tags::kBarrierDown).wait(); }

} // namespace rbc
