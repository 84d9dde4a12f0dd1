#include <algorithm>
#include <chrono>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include "harness/harness.hpp"
#include "jquick/verify.hpp"
#include "rbc/rbc.hpp"

namespace harness {

using Clock = std::chrono::steady_clock;

const char* to_string(SplitImpl impl) { return impl == SplitImpl::Range ? "range" : "group"; }
const char* to_string(SplitShape shape) { return shape == SplitShape::Halves ? "halves" : "chain"; }

const char* to_string(CollectiveKind op) {
    switch (op) {
    case CollectiveKind::Bcast: return "bcast";
    case CollectiveKind::Reduce: return "reduce";
    case CollectiveKind::Scan: return "scan";
    case CollectiveKind::Gatherv: return "gatherv";
    case CollectiveKind::Barrier: return "barrier";
    }
    return "?";
}

namespace {

std::int64_t elapsed_ns(Clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count();
}

BenchRecord record(std::string bench, int p, std::int64_t n_per_p, rbc::CommMode mode, int rep, std::int64_t ns,
                   const rbc::Fabric& fabric) {
    return BenchRecord{std::move(bench),      p, n_per_p, rbc::to_string(mode), rep, ns, fabric.messages_sent(),
                       fabric.bytes_sent(), 0, fabric.max_clock()};
}

void fail(BenchOutcome& out, std::string why) {
    out.ok = false;
    out.problems.push_back(std::move(why));
}

/// Group k of the chain covers ranks 3k..3k+3.
int chain_groups(int p) { return p >= 4 ? (p - 1) / 3 : 0; }

/// Chain groups rank b belongs to, in the order the schedule creates them.
std::vector<int> chain_order(int b, int groups, jquick::Schedule schedule) {
    std::vector<int> mine;
    for (int k = std::max(0, (b - 3) / 3 - 1); k <= std::min(groups - 1, b / 3); ++k)
        if (b >= 3 * k && b <= 3 * k + 3)
            mine.push_back(k);
    // A boundary rank 3k leads group k and is the last member of group k-1.
    if (mine.size() == 2 && schedule == jquick::Schedule::Alternating && (b / 3) % 2 == 1)
        std::swap(mine[0], mine[1]);
    return mine;
}

void split_halves(const SplitOptions& opt, BenchOutcome& out) {
    const int p = opt.p;
    const int half = p / 2;
    for (int rep = 0; rep < opt.reps; ++rep) {
        rbc::Fabric fabric(p);
        if (opt.impl == SplitImpl::Range) {
            std::vector<rbc::Comm> world;
            for (int r = 0; r < p; ++r)
                world.push_back(rbc::create_from_world(fabric, rbc::BaseRank(r), opt.mode));
            std::int64_t checksum = 0;
            const auto t0 = Clock::now();
            for (int i = 0; i < opt.splits; ++i) {
                const int r = i % p;
                const rbc::Comm c = r < half ? rbc::split_range(world[r], 0, half - 1)
                                             : rbc::split_range(world[r], half, p - 1);
                checksum += c.rank() + c.context().c;
            }
            const std::int64_t ns = elapsed_ns(t0);
            if (checksum < 0)
                fail(out, "impossible checksum");
            out.records.push_back(record("split_halves_range", p, 0, opt.mode, rep, ns, fabric));
        } else {
            std::vector<int> lower(static_cast<std::size_t>(half)), upper(static_cast<std::size_t>(p - half));
            std::iota(lower.begin(), lower.end(), 0);
            std::iota(upper.begin(), upper.end(), half);
            std::vector<rbc::Comm> made(static_cast<std::size_t>(p));
            const auto t0 = Clock::now();
            rbc::run_ranks(fabric, [&](rbc::BaseRank me) {
                const rbc::Comm world = rbc::create_from_world(fabric, me, opt.mode);
                made[me.id] = rbc::comm_create_group(world, rbc::GroupSpec::list(me.id < half ? lower : upper), 7);
            });
            const std::int64_t ns = elapsed_ns(t0);
            if (!rbc::ctx_registry_check(made))
                fail(out, "split_halves_group: duplicate context");
            out.records.push_back(record("split_halves_group", p, 0, opt.mode, rep, ns, fabric));
        }
    }
}

void split_chain(const SplitOptions& opt, BenchOutcome& out) {
    const int p = opt.p;
    const int groups = chain_groups(p);
    if (groups == 0) {
        fail(out, "split chain needs p >= 4");
        return;
    }
    const int members = 3 * groups + 1;
    const std::string name = std::string("split_chain_") + jquick::to_string(opt.schedule) + "_" + to_string(opt.impl);
    for (int rep = 0; rep < opt.reps; ++rep) {
        rbc::Fabric fabric(p);
        std::vector<std::vector<rbc::Comm>> made(static_cast<std::size_t>(p));
        std::int64_t ns = 0;
        if (opt.impl == SplitImpl::Range) {
            // Range splits are local, so the ranks are simulated one after another.
            std::vector<rbc::Comm> world;
            for (int r = 0; r < p; ++r)
                world.push_back(rbc::create_from_world(fabric, rbc::BaseRank(r), opt.mode));
            std::vector<std::vector<int>> order(static_cast<std::size_t>(p));
            for (int b = 0; b < members; ++b)
                order[b] = chain_order(b, groups, opt.schedule);
            const int iters = std::max(1, 20000 / p);
            const auto t0 = Clock::now();
            for (int it = 0; it < iters; ++it) {
                for (int b = 0; b < members; ++b) {
                    made[b].clear();
                    for (int k : order[b])
                        made[b].push_back(rbc::split_range(world[b], 3 * k, 3 * k + 3));
                }
            }
            ns = elapsed_ns(t0) / iters;
        } else {
            const auto t0 = Clock::now();
            rbc::run_ranks(fabric, [&](rbc::BaseRank me) {
                if (me.id >= members)
                    return;
                const rbc::Comm world = rbc::create_from_world(fabric, me, opt.mode);
                for (int k : chain_order(me.id, groups, opt.schedule))
                    made[me.id].push_back(
                        rbc::comm_create_group(world, rbc::GroupSpec::list({3 * k, 3 * k + 1, 3 * k + 2, 3 * k + 3}), 11));
            });
            ns = elapsed_ns(t0);
        }
        std::vector<rbc::Comm> all;
        for (int b = 0; b < members; ++b) {
            for (const rbc::Comm& c : made[b]) {
                if (c.size() != 4 || c.base_rank(0).id % 3 != 0)
                    fail(out, name + ": wrong group at rank " + std::to_string(b));
                all.push_back(c);
            }
        }
        if (!rbc::ctx_registry_check(all))
            fail(out, name + ": duplicate context");
        out.records.push_back(record(name, p, 0, opt.mode, rep, ns, fabric));
    }
}

/// Runs `count` instances of the collective on `comm` and checks the last result.
bool run_collective(const rbc::Comm& comm, CollectiveKind op, std::int64_t n, int count) {
    using V = std::vector<std::int64_t>;
    const int p = comm.size();
    const int r = comm.rank();
    auto value = [](int rank, std::int64_t i) { return static_cast<std::int64_t>(rank) * 1000 + i; };
    V mine(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        mine[static_cast<std::size_t>(i)] = value(r, i);
    bool ok = true;
    for (int k = 0; k < count; ++k) {
        switch (op) {
        case CollectiveKind::Bcast: {
            V buf = r == 0 ? mine : V(mine.size(), -1);
            rbc::bcast(comm, 0, std::span<std::int64_t>(buf));
            for (std::int64_t i = 0; i < n; ++i)
                ok = ok && buf[static_cast<std::size_t>(i)] == value(0, i);
            break;
        }
        case CollectiveKind::Reduce: {
            V res(mine.size());
            rbc::reduce(comm, 0, std::span<const std::int64_t>(mine), std::span<std::int64_t>(res),
                        rbc::ops::sum<std::int64_t>());
            if (r == 0)
                for (std::int64_t i = 0; i < n; ++i)
                    ok = ok && res[static_cast<std::size_t>(i)] ==
                                   1000LL * p * (p - 1) / 2 + static_cast<std::int64_t>(p) * i;
            break;
        }
        case CollectiveKind::Scan: {
            V res(mine.size());
            rbc::scan(comm, std::span<const std::int64_t>(mine), std::span<std::int64_t>(res),
                      rbc::ops::sum<std::int64_t>());
            for (std::int64_t i = 0; i < n; ++i)
                ok = ok && res[static_cast<std::size_t>(i)] == 1000LL * r * (r + 1) / 2 + (r + 1) * i;
            break;
        }
        case CollectiveKind::Gatherv: {
            std::vector<int> counts(static_cast<std::size_t>(p), static_cast<int>(n));
            V all(r == 0 ? static_cast<std::size_t>(n * p) : 0);
            rbc::gatherv(comm, 0, std::span<const std::int64_t>(mine), std::span<std::int64_t>(all),
                         std::span<const int>(counts));
            if (r == 0)
                for (int q = 0; q < p; ++q)
                    for (std::int64_t i = 0; i < n; ++i)
                        ok = ok && all[static_cast<std::size_t>(q * n + i)] == value(q, i);
            break;
        }
        case CollectiveKind::Barrier:
            rbc::barrier(comm);
            break;
        }
    }
    return ok;
}

} // namespace

BenchOutcome bench_split(const SplitOptions& opt) {
    BenchOutcome out;
    if (opt.p < 2) {
        fail(out, "split benchmarks need p >= 2");
        return out;
    }
    if (opt.shape == SplitShape::Halves)
        split_halves(opt, out);
    else
        split_chain(opt, out);
    return out;
}

BenchOutcome bench_collective(const CollectiveOptions& opt) {
    BenchOutcome out;
    const int p = opt.p;
    const std::string op = to_string(opt.op);
    std::vector<std::pair<std::string, int>> variants;
    if (opt.scope == CollectiveScope::Full)
        variants = {{"collective_full_" + op, 1}};
    else
        variants = {{"collective_half_x1_" + op + "_" + to_string(opt.impl), 1},
                    {"collective_half_x50_" + op + "_" + to_string(opt.impl), 50}};
    if (opt.scope == CollectiveScope::Half && p < 2) {
        fail(out, "half-range collectives need p >= 2");
        return out;
    }
    const int half = std::max(1, p / 2);
    for (const auto& [name, count] : variants) {
        for (int rep = 0; rep < opt.reps; ++rep) {
            rbc::Fabric fabric(p);
            std::mutex mutex;
            bool ok = true;
            const auto t0 = Clock::now();
            rbc::run_ranks(fabric, [&](rbc::BaseRank me) {
                const rbc::Comm world = rbc::create_from_world(fabric, me, opt.mode);
                bool mine = true;
                if (opt.scope == CollectiveScope::Full) {
                    mine = run_collective(world, opt.op, opt.n_per_p, count);
                } else if (me.id < half) {
                    rbc::Comm sub;
                    if (opt.impl == SplitImpl::Range) {
                        sub = rbc::split_range(world, 0, half - 1);
                    } else {
                        std::vector<int> members(static_cast<std::size_t>(half));
                        std::iota(members.begin(), members.end(), 0);
                        sub = rbc::comm_create_group(world, rbc::GroupSpec::list(members), 3);
                    }
                    mine = run_collective(sub, opt.op, opt.n_per_p, count);
                }
                std::lock_guard lock(mutex);
                ok = ok && mine;
            });
            const std::int64_t ns = elapsed_ns(t0);
            if (!ok)
                fail(out, name + ": wrong result in repetition " + std::to_string(rep));
            else
                out.records.push_back(record(name, p, opt.n_per_p, opt.mode, rep, ns, fabric));
        }
    }
    return out;
}

BenchOutcome bench_sort(const SortOptions& opt) {
    BenchOutcome out;
    const int p = opt.p;
    const std::string name = std::string("sort_") + jquick::to_string(opt.config.pivot) + "_" +
                             jquick::to_string(opt.config.schedule);
    for (int rep = 0; rep < opt.reps; ++rep) {
        std::mt19937_64 rng(opt.seed * 1000003ULL + static_cast<std::uint64_t>(rep));
        std::vector<std::vector<jquick::Key>> inputs(static_cast<std::size_t>(p));
        for (auto& v : inputs) {
            v.resize(static_cast<std::size_t>(opt.n_per_p));
            for (auto& x : v)
                x = static_cast<jquick::Key>(rng() >> 1);
        }
        jquick::Config cfg = opt.config;
        cfg.seed = rng();
        rbc::Fabric fabric(p);
        std::vector<jquick::SortResult> results(static_cast<std::size_t>(p));
        const auto t0 = Clock::now();
        rbc::run_ranks(fabric, [&](rbc::BaseRank me) {
            results[me.id] = jquick::sort(rbc::create_from_world(fabric, me), inputs[me.id], cfg);
        });
        const std::int64_t ns = elapsed_ns(t0);
        const jquick::Verdict v = jquick::verify_sort(inputs, results);
        if (!v.ok()) {
            std::ostringstream os;
            os << name << " p=" << p << " n/p=" << opt.n_per_p << " rep " << rep << ":";
            for (const auto& problem : v.problems)
                os << "\n  " << problem;
            fail(out, os.str());
            continue;
        }
        BenchRecord r = record(name, p, opt.n_per_p, cfg.mode, rep, ns, fabric);
        r.depth = v.depth;
        out.records.push_back(std::move(r));
    }
    return out;
}

} // namespace harness
