#include "rbc/transport.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

#include "rbc/errors.hpp"

namespace rbc {

namespace {
constexpr auto kParkSlice = std::chrono::milliseconds(20);
constexpr int kQuietSlicesForDeadlock = 3;
} // namespace

Fabric::Fabric(int p_world, FabricOptions options) : options_(options) {
    if (p_world < 1)
        throw std::invalid_argument("Fabric: p_world must be >= 1, got " + std::to_string(p_world));
    boxes_.reserve(static_cast<std::size_t>(p_world));
    locals_.reserve(static_cast<std::size_t>(p_world));
    for (int i = 0; i < p_world; ++i) {
        boxes_.push_back(std::make_unique<Mailbox>());
        locals_.push_back(std::make_unique<RankLocal>());
    }
    if (options_.tag_registry)
        registry_ = std::make_unique<TagRegistry>();
}

Fabric::~Fabric() = default;

const Fabric::Mailbox& Fabric::mailbox(BaseRank rank) const {
    if (rank.id < 0 || rank.id >= size())
        throw std::invalid_argument("Fabric: rank " + std::to_string(rank.id) + " outside [0, " +
                                    std::to_string(size()) + ")");
    return *boxes_[static_cast<std::size_t>(rank.id)];
}

Fabric::Mailbox& Fabric::mailbox(BaseRank rank) {
    return const_cast<Mailbox&>(std::as_const(*this).mailbox(rank));
}

void Fabric::raw_send(Envelope env) {
    Mailbox& dst = mailbox(env.header.dst);
    Mailbox& src = mailbox(env.header.src);
    if (env.header.size != env.payload.size())
        throw std::invalid_argument("raw_send: header size does not match payload");
    env.header.stamp = src.clock.load(std::memory_order_relaxed);
    const std::uint64_t bytes = env.payload.size();
    src.sent_messages.fetch_add(1, std::memory_order_relaxed);
    src.sent_bytes.fetch_add(bytes, std::memory_order_relaxed);
    bytes_sent_.fetch_add(bytes, std::memory_order_relaxed);
    {
        std::lock_guard lock(dst.mutex);
        dst.pending.push_back(std::move(env));
        ++dst.arrivals;
        // Counted under the lock so a parked receiver never sees a stale total.
        messages_sent_.fetch_add(1);
    }
    dst.cv.notify_all();
}

std::optional<EnvelopeHeader> Fabric::raw_probe(BaseRank me, const ContextId& ctx, Tag tag,
                                                std::optional<BaseRank> src) const {
    if (src)
        return raw_probe_if(me, ctx, tag, [s = *src](BaseRank from) { return from == s; });
    return raw_probe_if(me, ctx, tag, [](BaseRank) { return true; });
}

std::optional<Envelope> Fabric::raw_recv(BaseRank me, const ContextId& ctx, Tag tag, BaseRank src) {
    Mailbox& box = mailbox(me);
    std::optional<Envelope> out;
    {
        std::lock_guard lock(box.mutex);
        auto it = std::find_if(box.pending.begin(), box.pending.end(), [&](const Envelope& env) {
            return env.header.tag == tag && env.header.src == src && env.header.ctx == ctx;
        });
        if (it == box.pending.end())
            return std::nullopt;
        out.emplace(std::move(*it));
        box.pending.erase(it);
    }
    const std::uint64_t stamp = out->header.stamp + 1;
    if (box.clock.load(std::memory_order_relaxed) < stamp)
        box.clock.store(stamp, std::memory_order_relaxed);
    box.recv_messages.fetch_add(1, std::memory_order_relaxed);
    box.recv_bytes.fetch_add(out->payload.size(), std::memory_order_relaxed);
    messages_received_.fetch_add(1);
    return out;
}

std::size_t Fabric::pending(BaseRank me) const {
    const Mailbox& box = mailbox(me);
    std::lock_guard lock(box.mutex);
    return box.pending.size();
}

std::size_t Fabric::pending_total() const {
    std::size_t total = 0;
    for (int i = 0; i < size(); ++i)
        total += pending(BaseRank(i));
    return total;
}

TrafficCounters Fabric::sent_by(BaseRank rank) const {
    const Mailbox& box = mailbox(rank);
    return {box.sent_messages.load(), box.sent_bytes.load()};
}

TrafficCounters Fabric::received_by(BaseRank rank) const {
    const Mailbox& box = mailbox(rank);
    return {box.recv_messages.load(), box.recv_bytes.load()};
}

std::uint64_t Fabric::clock(BaseRank rank) const { return mailbox(rank).clock.load(); }

std::uint64_t Fabric::max_clock() const {
    std::uint64_t best = 0;
    for (const auto& box : boxes_)
        best = std::max(best, box->clock.load());
    return best;
}

std::uint64_t Fabric::arrivals(BaseRank me) const {
    const Mailbox& box = mailbox(me);
    std::lock_guard lock(box.mutex);
    return box.arrivals;
}

void Fabric::park(BaseRank me, std::uint64_t seen) {
    Mailbox& box = mailbox(me);
    std::unique_lock lock(box.mutex);
    if (box.arrivals != seen)
        return;
    parked_.fetch_add(1);
    std::uint64_t last_total = messages_sent_.load();
    int quiet = 0;
    while (box.arrivals == seen) {
        if (aborted_.load()) {
            parked_.fetch_sub(1);
            throw Aborted("fabric aborted while rank " + std::to_string(me.id) + " was waiting");
        }
        if (box.cv.wait_for(lock, kParkSlice) != std::cv_status::timeout)
            continue;
        const int running = running_.load();
        const std::uint64_t total = messages_sent_.load();
        if (running > 0 && parked_.load() >= running && total == last_total) {
            if (++quiet >= kQuietSlicesForDeadlock) {
                parked_.fetch_sub(1);
                lock.unlock();
                abort();
                throw DeadlockError("all " + std::to_string(running) + " workers parked; rank " +
                                    std::to_string(me.id) + " can never be woken");
            }
        } else {
            quiet = 0;
            last_total = total;
        }
    }
    parked_.fetch_sub(1);
}

void Fabric::abort() {
    aborted_.store(true);
    for (auto& box : boxes_) {
        std::lock_guard lock(box->mutex);
        box->cv.notify_all();
    }
}

void Fabric::set_running(int workers) {
    running_.store(workers);
    parked_.store(0);
}

void Fabric::worker_exited() { running_.fetch_sub(1); }

} // namespace rbc
