#include <algorithm>
#include <list>
#include <stdexcept>
#include <string>

#include "jquick/jquick.hpp"
#include "rbc/collectives.hpp"
#include "rbc/errors.hpp"
#include "rbc/p2p.hpp"

namespace jquick {

using rbc::Comm;
using rbc::Progress;
using rbc::Request;
using rbc::Tag;

const char* to_string(PivotMode mode) { return mode == PivotMode::Single ? "single" : "sample-median"; }
const char* to_string(Schedule schedule) { return schedule == Schedule::Cascaded ? "cascaded" : "alternating"; }

namespace {

constexpr Tag kRebalanceScanTag = 990;
constexpr Tag kRebalanceTotalTag = 991;
constexpr Tag kRebalanceDataTag = 992;
constexpr Tag kBaseCaseTag = 999;
constexpr int kRandomPivotAttempts = 4;

// Per-depth tag block; tasks alive at the same time share at most one rank unless
// their depths differ.
enum TagSlot : Tag {
    kPivotBcast = 0,
    kPivotGather = 1,
    kCountScan = 2,
    kTotalsBcast = 3,
    kDataSmall = 4,
    kDataLarge = 5,
    kFallbackGather = 6,
    kFallbackBcast = 7,
};

Tag task_tag(int depth, TagSlot slot) { return 1000 + 8 * depth + slot; }

struct Counts {
    std::int64_t s = 0;
    std::int64_t g = 0;
};

const rbc::ReduceOp<Counts> kCountSum{[](const Counts& a, const Counts& b) { return Counts{a.s + b.s, a.g + b.g}; },
                                      true, Counts{}};

std::int64_t size_of(const rbc::Status& st) { return static_cast<std::int64_t>(st.count / sizeof(Key)); }

/// Receives whatever `tag` messages are pending on `comm` until `got` reaches `want`.
bool drain(const Comm& comm, Tag tag, std::int64_t want, std::int64_t& got, std::vector<Key>& into, int& messages) {
    bool moved = false;
    while (got < want) {
        auto st = rbc::iprobe(comm, rbc::kAnySource, tag);
        if (!st)
            break;
        const std::size_t at = into.size();
        into.resize(at + st->count / sizeof(Key));
        rbc::recv(comm, st->source, tag, std::span<Key>(into.data() + at, into.size() - at));
        got += size_of(*st);
        ++messages;
        moved = true;
    }
    if (got > want)
        throw rbc::ProtocolError("received " + std::to_string(got) + " elements, capacity is " + std::to_string(want));
    return moved;
}

} // namespace

struct BaseCase {
    Comm comm;
    TaskShape shape;
    std::int64_t global_offset = 0;
    std::vector<Key> elems;
    std::vector<Key> other;
    bool received = false;
};

class Task;

struct JanusSorter::Impl {
    Config cfg;
    Comm comm;
    int me = 0;
    int p = 1;
    Capacities caps;
    std::vector<Key> input;

    enum class Phase { RebalanceScan, RebalanceTotal, RebalanceRecv, Distributed, BaseRecv, Done };
    Phase phase = Phase::RebalanceScan;

    std::int64_t m = 0;
    std::int64_t before = 0;
    std::int64_t n = 0;
    std::int64_t got = 0;
    int in_messages = 0;
    Request req;
    std::vector<Key> received;

    std::list<std::unique_ptr<Task>> tasks;
    std::vector<BaseCase> base_cases;
    std::vector<std::pair<std::int64_t, std::vector<Key>>> pieces;
    SortStats stats;
    SortResult result;

    Impl(const Comm& c, std::vector<Key> in, Config config);
    Progress poll();
    Progress poll_distributed();
    Progress poll_base_cases();
    void start_base_cases();
    void finish();
    void spawn(Comm task_comm, const TaskShape& shape, int depth, std::int64_t global_offset, std::vector<Key> elems);
};

class Task {
public:
    Task(JanusSorter::Impl& owner, Comm comm, TaskShape shape, int depth, std::int64_t global_offset,
         std::vector<Key> elems)
        : s_(owner), comm_(std::move(comm)), shape_(shape), depth_(depth), goff_(global_offset),
          elems_(std::move(elems)) {
        TaskTrace t;
        t.depth = depth;
        t.shape = shape;
        t.global_offset = global_offset;
        t.held = static_cast<std::int64_t>(elems_.size());
        trace_ = s_.stats.traces.size();
        s_.stats.traces.push_back(t);
        s_.stats.depth = std::max(s_.stats.depth, depth);
        if (t.held != shape_.count(s_.me, s_.caps))
            throw rbc::ProtocolError("task starts with " + std::to_string(t.held) + " elements, capacity is " +
                                     std::to_string(shape_.count(s_.me, s_.caps)));
    }

    Progress step() {
        switch (stage_) {
        case Stage::Start:
            select_pivot();
            return Progress::Advanced;
        case Stage::AwaitSamples:
        case Stage::AwaitFallback:
            if (const Progress pr = req_.poll(); pr != Progress::Done)
                return pr;
            choose_from_gathered();
            return Progress::Advanced;
        case Stage::AwaitPivot:
            if (const Progress pr = req_.poll(); pr != Progress::Done)
                return pr;
            partition();
            return Progress::Advanced;
        case Stage::AwaitCounts:
            if (const Progress pr = req_.poll(); pr != Progress::Done)
                return pr;
            broadcast_totals();
            return Progress::Advanced;
        case Stage::AwaitTotals:
            if (const Progress pr = req_.poll(); pr != Progress::Done)
                return pr;
            if (totals_.s == 0 || totals_.g == 0) {
                ++attempt_;
                select_pivot();
            } else {
                exchange();
            }
            return Progress::Advanced;
        case Stage::Receive:
            return receive();
        case Stage::Finished:
            return Progress::Done;
        }
        return Progress::Blocked;
    }

private:
    enum class Stage { Start, AwaitSamples, AwaitFallback, AwaitPivot, AwaitCounts, AwaitTotals, Receive, Finished };

    TaskTrace& trace() { return s_.stats.traces[trace_]; }
    int local(int b) const { return b - shape_.first; }
    Tag tag(TagSlot slot) const { return task_tag(depth_, slot); }
    std::int64_t my_offset() const { return shape_.offset(s_.me, s_.caps); }

    void select_pivot() {
        const int q = shape_.size();
        const std::int64_t off = my_offset();
        const bool root = local(s_.me) == 0;
        mine_.clear();
        gathered_.clear();
        std::vector<int> counts(static_cast<std::size_t>(q), 0);

        if (attempt_ >= kRandomPivotAttempts) {
            // Exact median of the task; the tie-broken order makes both sides nonempty.
            trace().fallback_pivot = true;
            for (std::size_t i = 0; i < elems_.size(); ++i)
                mine_.push_back({elems_[i], off + static_cast<std::int64_t>(i)});
            for (int b = shape_.first; b <= shape_.last; ++b)
                counts[static_cast<std::size_t>(local(b))] = static_cast<int>(shape_.count(b, s_.caps));
            if (root)
                gathered_.resize(static_cast<std::size_t>(shape_.total));
            select_index_ = shape_.total / 2;
            req_ = rbc::igatherv(comm_, 0, std::span<const PivotKey>(mine_), std::span<PivotKey>(gathered_),
                                 std::span<const int>(counts), tag(kFallbackGather));
            stage_ = Stage::AwaitFallback;
            return;
        }

        const std::uint64_t seed = task_seed(s_.cfg.seed, goff_, shape_.total, depth_, attempt_);
        if (s_.cfg.pivot == PivotMode::Single) {
            const std::int64_t pos = draw_positions(seed, shape_.total, 1).front();
            const int owner = shape_.owner(pos, s_.caps);
            if (owner == s_.me)
                pivot_ = {elems_[static_cast<std::size_t>(pos - off)], pos};
            req_ = rbc::ibcast(comm_, local(owner), std::span<PivotKey>(&pivot_, 1), tag(kPivotBcast));
            stage_ = Stage::AwaitPivot;
            return;
        }

        const int count = sample_count(q, shape_.total, s_.cfg.samples);
        for (std::int64_t pos : draw_positions(seed, shape_.total, count)) {
            const int owner = shape_.owner(pos, s_.caps);
            ++counts[static_cast<std::size_t>(local(owner))];
            if (owner == s_.me)
                mine_.push_back({elems_[static_cast<std::size_t>(pos - off)], pos});
        }
        if (root)
            gathered_.resize(static_cast<std::size_t>(count));
        select_index_ = count / 2;
        req_ = rbc::igatherv(comm_, 0, std::span<const PivotKey>(mine_), std::span<PivotKey>(gathered_),
                             std::span<const int>(counts), tag(kPivotGather));
        stage_ = Stage::AwaitSamples;
    }

    void choose_from_gathered() {
        const bool fallback = stage_ == Stage::AwaitFallback;
        if (local(s_.me) == 0) {
            auto nth = gathered_.begin() + static_cast<std::ptrdiff_t>(select_index_);
            std::nth_element(gathered_.begin(), nth, gathered_.end(), key_less);
            pivot_ = *nth;
        }
        req_ = rbc::ibcast(comm_, 0, std::span<PivotKey>(&pivot_, 1), tag(fallback ? kFallbackBcast : kPivotBcast));
        stage_ = Stage::AwaitPivot;
    }

    void partition() {
        part_ = partition_tiebroken(elems_, my_offset(), pivot_);
        local_ = {static_cast<std::int64_t>(part_.small.size()), static_cast<std::int64_t>(part_.large.size())};
        req_ = rbc::iexscan(comm_, std::span<const Counts>(&local_, 1), std::span<Counts>(&prefix_, 1), kCountSum,
                            tag(kCountScan));
        stage_ = Stage::AwaitCounts;
    }

    void broadcast_totals() {
        // Every element left of this rank is either small or large.
        if (prefix_.s + prefix_.g != my_offset())
            throw rbc::ProtocolError("prefix identity violated at rank " + std::to_string(s_.me));
        if (s_.me == shape_.last)
            totals_ = {prefix_.s + local_.s, prefix_.g + local_.g};
        req_ = rbc::ibcast(comm_, local(shape_.last), std::span<Counts>(&totals_, 1), tag(kTotalsBcast));
        stage_ = Stage::AwaitTotals;
    }

    void exchange() {
        if (totals_.s + totals_.g != shape_.total)
            throw rbc::ProtocolError("partition totals do not add up to the task size");
        TaskTrace& t = trace();
        t.pivot_attempts = attempt_ + 1;
        t.s_total = totals_.s;
        t.pivot = pivot_;
        split_ = split_groups(shape_, s_.caps, totals_.s);

        auto ship = [&](const std::vector<Key>& side, const std::vector<Transfer>& plan, TagSlot slot,
                        std::vector<Key>& keep, std::int64_t& got, int& sends) {
            for (const Transfer& tr : plan) {
                const auto first = side.begin() + static_cast<std::ptrdiff_t>(tr.begin);
                if (tr.target == s_.me) {
                    keep.insert(keep.end(), first, first + static_cast<std::ptrdiff_t>(tr.count));
                    got += tr.count;
                    continue;
                }
                rbc::isend(comm_, local(tr.target), tag(slot),
                           std::span<const Key>(&*first, static_cast<std::size_t>(tr.count)));
                ++sends;
            }
        };
        ship(part_.small, route(prefix_.s, local_.s, split_.left, s_.caps), kDataSmall, in_small_, got_small_,
             t.sends_small);
        ship(part_.large, route(prefix_.g, local_.g, split_.right, s_.caps), kDataLarge, in_large_, got_large_,
             t.sends_large);
        part_ = {};
        elems_ = {};
        want_small_ = split_.left.contains(s_.me) ? split_.left.count(s_.me, s_.caps) : 0;
        want_large_ = split_.right.contains(s_.me) ? split_.right.count(s_.me, s_.caps) : 0;
        t.cap_small = want_small_;
        t.cap_large = want_large_;
        stage_ = Stage::Receive;
    }

    Progress receive() {
        TaskTrace& t = trace();
        const bool a = drain(comm_, tag(kDataSmall), want_small_, got_small_, in_small_, t.msgs_in_small);
        const bool b = drain(comm_, tag(kDataLarge), want_large_, got_large_, in_large_, t.msgs_in_large);
        if (got_small_ < want_small_ || got_large_ < want_large_)
            return a || b ? Progress::Advanced : Progress::Blocked;
        t.recv_small = got_small_;
        t.recv_large = got_large_;
        stage_ = Stage::Finished;
        spawn_children();
        return Progress::Done;
    }

    void spawn_children() {
        const bool in_left = split_.left.contains(s_.me);
        const bool in_right = split_.right.contains(s_.me);
        auto left = [&] {
            s_.spawn(rbc::split_range(comm_, local(split_.left.first), local(split_.left.last)), split_.left,
                     depth_ + 1, goff_, std::move(in_small_));
        };
        auto right = [&] {
            s_.spawn(rbc::split_range(comm_, local(split_.right.first), local(split_.right.last)), split_.right,
                     depth_ + 1, goff_ + totals_.s, std::move(in_large_));
        };
        const bool right_first =
            in_left && in_right && s_.cfg.schedule == Schedule::Alternating && comm_.me().id % 2 == 1;
        if (right_first) {
            right();
            left();
            return;
        }
        if (in_left)
            left();
        if (in_right)
            right();
    }

    JanusSorter::Impl& s_;
    Comm comm_;
    TaskShape shape_;
    int depth_;
    std::int64_t goff_;
    std::vector<Key> elems_;
    std::size_t trace_ = 0;

    Stage stage_ = Stage::Start;
    int attempt_ = 0;
    Request req_;
    PivotKey pivot_;
    std::vector<PivotKey> mine_;
    std::vector<PivotKey> gathered_;
    std::int64_t select_index_ = 0;
    Partition part_;
    Counts local_;
    Counts prefix_;
    Counts totals_;
    Split split_;
    std::int64_t want_small_ = 0;
    std::int64_t want_large_ = 0;
    std::int64_t got_small_ = 0;
    std::int64_t got_large_ = 0;
    std::vector<Key> in_small_;
    std::vector<Key> in_large_;
};

JanusSorter::Impl::Impl(const Comm& c, std::vector<Key> in, Config config)
    : cfg(config), comm(c.fabric(), c.me(), c.group(), c.context(), config.mode), input(std::move(in)) {
    if (!comm.is_member())
        throw rbc::InvalidUse("sort called by a rank outside the communicator");
    me = comm.rank();
    p = comm.size();
    m = static_cast<std::int64_t>(input.size());
    req = rbc::iexscan(comm, std::span<const std::int64_t>(&m, 1), std::span<std::int64_t>(&before, 1),
                       rbc::ops::sum<std::int64_t>(), kRebalanceScanTag);
}

void JanusSorter::Impl::spawn(Comm task_comm, const TaskShape& shape, int depth, std::int64_t global_offset,
                              std::vector<Key> elems) {
    if (shape.size() > 2) {
        tasks.push_back(std::make_unique<Task>(*this, std::move(task_comm), shape, depth, global_offset,
                                               std::move(elems)));
        return;
    }
    TaskTrace t;
    t.depth = depth;
    t.shape = shape;
    t.global_offset = global_offset;
    t.held = static_cast<std::int64_t>(elems.size());
    t.base_case = true;
    stats.traces.push_back(t);
    base_cases.push_back(BaseCase{std::move(task_comm), shape, global_offset, std::move(elems), {}, false});
}

Progress JanusSorter::Impl::poll() {
    switch (phase) {
    case Phase::RebalanceScan:
        if (const Progress pr = req.poll(); pr != Progress::Done)
            return pr;
        if (me == p - 1)
            n = before + m;
        req = rbc::ibcast(comm, p - 1, std::span<std::int64_t>(&n, 1), kRebalanceTotalTag);
        phase = Phase::RebalanceTotal;
        return Progress::Advanced;
    case Phase::RebalanceTotal: {
        if (const Progress pr = req.poll(); pr != Progress::Done)
            return pr;
        caps = Capacities{n, p};
        const TaskShape all{0, std::max(caps.active() - 1, 0), caps.cap(0), n};
        for (const Transfer& tr : route(before, m, all, caps)) {
            const auto first = input.begin() + static_cast<std::ptrdiff_t>(tr.begin);
            if (tr.target == me) {
                received.insert(received.end(), first, first + static_cast<std::ptrdiff_t>(tr.count));
                got += tr.count;
            } else {
                rbc::isend(comm, tr.target, kRebalanceDataTag,
                           std::span<const Key>(&*first, static_cast<std::size_t>(tr.count)));
            }
        }
        input = {};
        phase = Phase::RebalanceRecv;
        return Progress::Advanced;
    }
    case Phase::RebalanceRecv: {
        const bool moved = drain(comm, kRebalanceDataTag, caps.cap(me), got, received, in_messages);
        if (got < caps.cap(me))
            return moved ? Progress::Advanced : Progress::Blocked;
        if (caps.cap(me) > 0) {
            const int last = caps.active() - 1;
            spawn(rbc::split_range(comm, 0, last), TaskShape{0, last, caps.cap(0), n}, 1, 0, std::move(received));
        }
        phase = Phase::Distributed;
        return Progress::Advanced;
    }
    case Phase::Distributed:
        return poll_distributed();
    case Phase::BaseRecv:
        return poll_base_cases();
    case Phase::Done:
        return Progress::Done;
    }
    return Progress::Blocked;
}

Progress JanusSorter::Impl::poll_distributed() {
    bool moved = false;
    // Children spawned during this pass are appended and get their first step right away.
    for (auto it = tasks.begin(); it != tasks.end();) {
        const Progress pr = (*it)->step();
        moved = moved || pr != Progress::Blocked;
        if (pr == Progress::Done)
            it = tasks.erase(it);
        else
            ++it;
    }
    if (!tasks.empty())
        return moved ? Progress::Advanced : Progress::Blocked;
    start_base_cases();
    return Progress::Advanced;
}

void JanusSorter::Impl::start_base_cases() {
    // All sends first, so a rank sitting in two pair base cases never waits on one
    // while holding the other's data.
    for (BaseCase& bc : base_cases) {
        if (bc.shape.size() == 2) {
            const int partner = 1 - (me - bc.shape.first);
            rbc::isend(bc.comm, partner, kBaseCaseTag, std::span<const Key>(bc.elems));
        }
    }
    phase = Phase::BaseRecv;
}

Progress JanusSorter::Impl::poll_base_cases() {
    bool moved = false;
    bool all = true;
    for (BaseCase& bc : base_cases) {
        if (bc.received || bc.shape.size() == 1)
            continue;
        const int partner = 1 - (me - bc.shape.first);
        auto st = rbc::iprobe(bc.comm, partner, kBaseCaseTag);
        if (!st) {
            all = false;
            continue;
        }
        bc.other.resize(st->count / sizeof(Key));
        rbc::recv(bc.comm, partner, kBaseCaseTag, std::span<Key>(bc.other));
        bc.received = true;
        moved = true;
    }
    if (!all)
        return moved ? Progress::Advanced : Progress::Blocked;
    finish();
    return Progress::Done;
}

void JanusSorter::Impl::finish() {
    for (BaseCase& bc : base_cases) {
        const auto keep = static_cast<std::size_t>(bc.shape.count(me, caps));
        std::vector<Key> out;
        if (bc.shape.size() == 1) {
            out = std::move(bc.elems);
            std::sort(out.begin(), out.end());
        } else {
            out = base_case_pair(std::move(bc.elems), bc.other, me == bc.shape.first, keep);
        }
        pieces.emplace_back(bc.global_offset + bc.shape.offset(me, caps), std::move(out));
    }
    base_cases.clear();
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& piece : pieces)
        result.data.insert(result.data.end(), piece.second.begin(), piece.second.end());
    pieces.clear();
    result.stats = std::move(stats);
    phase = Phase::Done;
}

JanusSorter::JanusSorter(const Comm& comm, std::vector<Key> input, Config config)
    : impl_(std::make_unique<Impl>(comm, std::move(input), config)) {}
JanusSorter::~JanusSorter() = default;
JanusSorter::JanusSorter(JanusSorter&&) noexcept = default;
JanusSorter& JanusSorter::operator=(JanusSorter&&) noexcept = default;

Progress JanusSorter::poll() { return impl_->poll(); }
bool JanusSorter::done() const { return impl_->phase == Impl::Phase::Done; }

void JanusSorter::run() {
    rbc::Fabric& fabric = impl_->comm.fabric();
    const rbc::BaseRank me = impl_->comm.me();
    for (;;) {
        const std::uint64_t seen = fabric.arrivals(me);
        const Progress pr = poll();
        if (pr == Progress::Done)
            return;
        if (pr == Progress::Blocked)
            fabric.park(me, seen);
    }
}

SortResult JanusSorter::take_result() {
    if (!done())
        throw rbc::InvalidUse("sort result requested before completion");
    return std::move(impl_->result);
}

SortResult sort(const Comm& comm, std::vector<Key> input, const Config& config) {
    JanusSorter sorter(comm, std::move(input), config);
    sorter.run();
    return sorter.take_result();
}

} // namespace jquick
