#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "rbc/context_id.hpp"
#include "rbc/tag_registry.hpp"
#include "rbc/types.hpp"

namespace rbc {

struct EnvelopeHeader {
    ContextId ctx;
    Tag tag = 0;
    BaseRank src;
    BaseRank dst;
    std::size_t size = 0;
    /// Debug schedule checksum of collective traffic, 0 when unused.
    std::uint64_t check = 0;
    /// Sender's logical clock at send time.
    std::uint64_t stamp = 0;
};

struct Envelope {
    EnvelopeHeader header;
    std::vector<std::byte> payload;
};

struct FabricOptions {
    /// Track in-flight (context, tag, group) triples and report tag-discipline violations.
    bool tag_registry = false;
    /// Stamp collective envelopes with a schedule checksum and verify it on receipt.
    bool schedule_check = false;
};

struct TrafficCounters {
    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;
};

/// State owned by one rank's worker; never touched by other workers.
struct RankLocal {
    std::int64_t leader_counter = 0;
    std::map<std::pair<ContextId, Tag>, std::uint64_t> collective_sequence;
};

/// In-process message fabric connecting p simulated ranks.
///
/// Sends are eager: an envelope is appended to the destination mailbox before
/// raw_send returns. Mailboxes are unbounded and internally synchronized; matching
/// scans a mailbox oldest-first, which gives FIFO order per (source, context, tag).
class Fabric {
public:
    explicit Fabric(int p_world, FabricOptions options = {});
    Fabric(const Fabric&) = delete;
    Fabric& operator=(const Fabric&) = delete;
    ~Fabric();

    int size() const noexcept { return static_cast<int>(boxes_.size()); }
    const FabricOptions& options() const noexcept { return options_; }

    void raw_send(Envelope env);

    /// Header of the oldest pending envelope with `ctx`, `tag` and a source accepted by `accept`.
    template <class SourcePredicate>
    std::optional<EnvelopeHeader> raw_probe_if(BaseRank me, const ContextId& ctx, Tag tag,
                                               SourcePredicate&& accept) const {
        const Mailbox& box = mailbox(me);
        std::lock_guard lock(box.mutex);
        for (const Envelope& env : box.pending) {
            if (env.header.tag == tag && env.header.ctx == ctx && accept(env.header.src))
                return env.header;
        }
        return std::nullopt;
    }

    /// `src` empty means any source.
    std::optional<EnvelopeHeader> raw_probe(BaseRank me, const ContextId& ctx, Tag tag,
                                            std::optional<BaseRank> src) const;

    /// Removes the oldest envelope from concrete `src`; empty when none is pending.
    std::optional<Envelope> raw_recv(BaseRank me, const ContextId& ctx, Tag tag, BaseRank src);

    std::uint64_t messages_sent() const noexcept { return messages_sent_.load(); }
    std::uint64_t bytes_sent() const noexcept { return bytes_sent_.load(); }
    std::uint64_t messages_received() const noexcept { return messages_received_.load(); }
    std::size_t pending(BaseRank me) const;
    std::size_t pending_total() const;
    TrafficCounters sent_by(BaseRank rank) const;
    TrafficCounters received_by(BaseRank rank) const;

    /// Logical clock: max over received stamps + 1; sends do not advance it.
    std::uint64_t clock(BaseRank rank) const;
    std::uint64_t max_clock() const;

    /// Count of envelopes that have arrived at `me`; used to park without lost wakeups.
    std::uint64_t arrivals(BaseRank me) const;

    /// Blocks the caller until arrivals(me) differs from `seen`. Throws DeadlockError
    /// when every running worker is parked and the fabric is quiet, Aborted after abort().
    void park(BaseRank me, std::uint64_t seen);

    void abort();
    bool aborted() const noexcept { return aborted_.load(); }

    /// Worker bookkeeping for deadlock detection; 0 disables it.
    void set_running(int workers);
    void worker_exited();

    RankLocal& local(BaseRank me) { return *locals_.at(static_cast<std::size_t>(me.id)); }
    TagRegistry* registry() noexcept { return registry_.get(); }

private:
    struct Mailbox {
        mutable std::mutex mutex;
        std::condition_variable cv;
        std::deque<Envelope> pending;
        std::uint64_t arrivals = 0;
        std::atomic<std::uint64_t> clock{0};
        std::atomic<std::uint64_t> sent_messages{0};
        std::atomic<std::uint64_t> sent_bytes{0};
        std::atomic<std::uint64_t> recv_messages{0};
        std::atomic<std::uint64_t> recv_bytes{0};
    };

    const Mailbox& mailbox(BaseRank rank) const;
    Mailbox& mailbox(BaseRank rank);

    FabricOptions options_;
    std::vector<std::unique_ptr<Mailbox>> boxes_;
    std::vector<std::unique_ptr<RankLocal>> locals_;
    std::unique_ptr<TagRegistry> registry_;
    std::atomic<std::uint64_t> messages_sent_{0};
    std::atomic<std::uint64_t> bytes_sent_{0};
    std::atomic<std::uint64_t> messages_received_{0};
    std::atomic<int> running_{0};
    std::atomic<int> parked_{0};
    std::atomic<bool> aborted_{false};
};

} // namespace rbc
