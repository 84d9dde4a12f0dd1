#include <gtest/gtest.h>

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "support.hpp"

using namespace rbc;
using rbc::testing::world_comms;

namespace {

using Vec = std::vector<std::int64_t>;

int ceil_log2(int p) {
    int d = 0;
    while ((1 << d) < p)
        ++d;
    return d;
}

Vec contribution(int rank, std::size_t len, std::uint64_t salt) {
    Vec v(len);
    for (std::size_t i = 0; i < len; ++i)
        v[i] = static_cast<std::int64_t>((rank + 1) * 1000003ULL + i * 7919ULL + salt) % 100000 - 50000;
    return v;
}

Vec add(const Vec& a, const Vec& b) {
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        c[i] = a[i] + b[i];
    return c;
}

/// Affine maps x -> a*x + b composed left to right; associative, not commutative.
struct Affine {
    std::int64_t a = 1;
    std::int64_t b = 0;
    friend bool operator==(const Affine&, const Affine&) = default;
};

Affine then(const Affine& f, const Affine& g) { return {f.a * g.a, g.a * f.b + g.b}; }

struct Run {
    std::vector<Vec> out;
    std::vector<Request> reqs;
};

} // namespace

TEST(Collectives, OracleAllOpsAllSizes) {
    for (int p = 1; p <= 33; ++p) {
        for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{17}}) {
            for (int root : {0, p / 2, p - 1}) {
                Fabric f(p);
                auto w = world_comms(f);
                std::vector<Vec> in(p);
                for (int r = 0; r < p; ++r)
                    in[r] = contribution(r, len, static_cast<std::uint64_t>(p));

                // bcast
                std::vector<Vec> buf(p, Vec(len, -1));
                buf[root] = in[root];
                std::vector<Request> reqs;
                for (int r = 0; r < p; ++r)
                    reqs.push_back(ibcast(w[r], root, std::span<std::int64_t>(buf[r])));
                ASSERT_GT(drive(reqs), 0);
                for (int r = 0; r < p; ++r)
                    ASSERT_EQ(buf[r], in[root]);
                ASSERT_EQ(f.messages_sent(), static_cast<std::uint64_t>(p - 1));

                // reduce
                Vec expect = in[0];
                for (int r = 1; r < p; ++r)
                    expect = add(expect, in[r]);
                std::vector<Vec> res(p, Vec(len, 0));
                reqs.clear();
                for (int r = 0; r < p; ++r)
                    reqs.push_back(ireduce(w[r], root, std::span<const std::int64_t>(in[r]),
                                           std::span<std::int64_t>(res[r]), ops::sum<std::int64_t>()));
                ASSERT_GT(drive(reqs), 0);
                ASSERT_EQ(res[root], expect);
                ASSERT_EQ(f.messages_sent(), static_cast<std::uint64_t>(2 * (p - 1)));

                // gatherv with ragged counts
                std::vector<int> counts(p);
                std::vector<Vec> part(p);
                Vec concat;
                for (int r = 0; r < p; ++r) {
                    counts[r] = static_cast<int>((r * 5 + len) % (len + 1));
                    part[r] = Vec(in[r].begin(), in[r].begin() + counts[r]);
                    concat.insert(concat.end(), part[r].begin(), part[r].end());
                }
                Vec gathered(concat.size(), -7);
                Vec unused;
                reqs.clear();
                for (int r = 0; r < p; ++r)
                    reqs.push_back(igatherv(w[r], root, std::span<const std::int64_t>(part[r]),
                                            std::span<std::int64_t>(r == root ? gathered : unused),
                                            std::span<const int>(counts)));
                ASSERT_GT(drive(reqs), 0);
                ASSERT_EQ(gathered, concat);
                ASSERT_EQ(f.messages_sent(), static_cast<std::uint64_t>(3 * (p - 1)));
            }
        }
    }
}

TEST(Collectives, ScanExscanBarrierOracle) {
    for (int p = 1; p <= 33; ++p) {
        for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{17}}) {
            Fabric f(p);
            auto w = world_comms(f);
            std::vector<Vec> in(p);
            for (int r = 0; r < p; ++r)
                in[r] = contribution(r, len, 11);
            std::vector<Vec> inc(p, Vec(len)), exc(p, Vec(len));
            std::vector<Request> reqs;
            for (int r = 0; r < p; ++r)
                reqs.push_back(iscan(w[r], std::span<const std::int64_t>(in[r]), std::span<std::int64_t>(inc[r]),
                                     ops::sum<std::int64_t>()));
            for (int r = 0; r < p; ++r)
                reqs.push_back(iexscan(w[r], std::span<const std::int64_t>(in[r]), std::span<std::int64_t>(exc[r]),
                                       ops::sum<std::int64_t>()));
            for (int r = 0; r < p; ++r)
                reqs.push_back(ibarrier(w[r]));
            ASSERT_GT(drive(reqs), 0);
            Vec acc(len, 0);
            for (int r = 0; r < p; ++r) {
                ASSERT_EQ(exc[r], acc);
                acc = add(acc, in[r]);
                ASSERT_EQ(inc[r], acc);
            }
            ASSERT_EQ(f.messages_sent(), static_cast<std::uint64_t>(3 * 2 * (p - 1)));
        }
    }
}

TEST(Collectives, SpecExamples) {
    Fabric f(4);
    auto w = world_comms(f);
    std::vector<std::int64_t> v{1, 2, 3, 4}, inc(4), exc(4), red(4);
    std::vector<Request> reqs;
    for (int r = 0; r < 4; ++r) {
        reqs.push_back(iscan(w[r], std::span<const std::int64_t>(&v[r], 1), std::span<std::int64_t>(&inc[r], 1),
                             ops::sum<std::int64_t>()));
        reqs.push_back(iexscan(w[r], std::span<const std::int64_t>(&v[r], 1), std::span<std::int64_t>(&exc[r], 1),
                               ops::sum<std::int64_t>()));
        reqs.push_back(ireduce(w[r], 0, std::span<const std::int64_t>(&v[r], 1), std::span<std::int64_t>(&red[r], 1),
                               ops::sum<std::int64_t>()));
    }
    ASSERT_GT(drive(reqs), 0);
    EXPECT_EQ(inc, (std::vector<std::int64_t>{1, 3, 6, 10}));
    EXPECT_EQ(exc, (std::vector<std::int64_t>{0, 1, 3, 6}));
    EXPECT_EQ(red[0], 10);
}

TEST(Collectives, GathervExampleAndTruncation) {
    Fabric f(4);
    auto w = world_comms(f);
    const std::vector<int> counts{1, 2, 0, 3};
    const std::vector<std::vector<int>> parts{{10}, {20, 21}, {}, {30, 31, 32}};
    std::vector<int> out(6);
    std::vector<Request> reqs;
    for (int r = 0; r < 4; ++r)
        reqs.push_back(igatherv(w[r], 0, std::span<const int>(parts[r]), r == 0 ? std::span<int>(out) : std::span<int>(),
                                std::span<const int>(counts)));
    ASSERT_GT(drive(reqs), 0);
    EXPECT_EQ(out, (std::vector<int>{10, 20, 21, 30, 31, 32}));

    std::vector<int> small(5);
    EXPECT_THROW(igatherv(w[0], 0, std::span<const int>(parts[0]), std::span<int>(small), std::span<const int>(counts)),
                 TruncationError);
}

TEST(Collectives, NonCommutativeReduceKeepsRankOrder) {
    for (int p = 1; p <= 20; ++p) {
        for (int root = 0; root < p; ++root) {
            Fabric f(p);
            auto w = world_comms(f);
            std::vector<Affine> in(p);
            for (int r = 0; r < p; ++r)
                in[r] = {r % 3 + 2, r - 4};
            Affine expect = in[0];
            for (int r = 1; r < p; ++r)
                expect = then(expect, in[r]);
            const ReduceOp<Affine> op{then, false, Affine{}};
            std::vector<Affine> red(p), sc(p);
            std::vector<Request> reqs;
            for (int r = 0; r < p; ++r) {
                reqs.push_back(ireduce(w[r], root, std::span<const Affine>(&in[r], 1), std::span<Affine>(&red[r], 1), op));
                reqs.push_back(iscan(w[r], std::span<const Affine>(&in[r], 1), std::span<Affine>(&sc[r], 1), op));
            }
            ASSERT_GT(drive(reqs), 0);
            ASSERT_EQ(red[root], expect) << "p=" << p << " root=" << root;
            Affine acc = in[0];
            for (int r = 0; r < p; ++r) {
                if (r > 0)
                    acc = then(acc, in[r]);
                ASSERT_EQ(sc[r], acc);
            }
        }
    }
}

TEST(Collectives, AffineOperatorIsAssociative) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int i = 0; i < 1000; ++i) {
        const Affine a{d(rng), d(rng)}, b{d(rng), d(rng)}, c{d(rng), d(rng)};
        ASSERT_EQ(then(then(a, b), c), then(a, then(b, c)));
    }
}

TEST(Collectives, TransitionBound) {
    for (int p = 1; p <= 40; ++p) {
        Fabric f(p);
        auto w = world_comms(f);
        const int bound = ceil_log2(p) + 2;
        std::vector<std::int64_t> buf(p, 1), res(p), sc(p);
        std::vector<Request> rooted, swept;
        for (int r = 0; r < p; ++r) {
            rooted.push_back(ibcast(w[r], p / 3, std::span<std::int64_t>(&buf[r], 1)));
            rooted.push_back(ireduce(w[r], p / 2, std::span<const std::int64_t>(&buf[r], 1),
                                     std::span<std::int64_t>(&res[r], 1), ops::sum<std::int64_t>()));
            rooted.push_back(iscan(w[r], std::span<const std::int64_t>(&buf[r], 1), std::span<std::int64_t>(&sc[r], 1),
                                   ops::sum<std::int64_t>()));
            swept.push_back(ibarrier(w[r]));
        }
        ASSERT_GT(drive(rooted), 0);
        ASSERT_GT(drive(swept), 0);
        for (Request& r : rooted)
            ASSERT_LE(r.transitions(), bound);
        for (Request& r : swept)
            ASSERT_LE(r.transitions(), 2 * ceil_log2(p) + 2);
    }
}

TEST(Collectives, BarrierWaitsForLateRank) {
    Fabric f(2);
    auto w = world_comms(f);
    Request r0 = ibarrier(w[0]);
    for (int i = 0; i < 5; ++i)
        EXPECT_FALSE(r0.test());
    Request r1 = ibarrier(w[1]);
    std::vector<Request> reqs{r0, r1};
    ASSERT_GT(drive(reqs), 0);
}

TEST(Collectives, SingleRankCompletesLocally) {
    Fabric f(1);
    auto w = world_comms(f);
    std::int64_t x = 5, y = 0;
    EXPECT_TRUE(ibcast(w[0], 0, std::span<std::int64_t>(&x, 1)).done());
    EXPECT_TRUE(ireduce(w[0], 0, std::span<const std::int64_t>(&x, 1), std::span<std::int64_t>(&y, 1),
                        ops::sum<std::int64_t>())
                    .done());
    EXPECT_EQ(y, 5);
    EXPECT_TRUE(ibarrier(w[0]).done());
    EXPECT_EQ(f.messages_sent(), 0u);
}

TEST(Collectives, ErrorCases) {
    Fabric f(2);
    auto w = world_comms(f);
    std::vector<std::int64_t> a{1, 2}, b{1}, out(2);
    const ReduceOp<std::int64_t> no_identity{[](auto x, auto y) { return x + y; }, true, std::nullopt};
    EXPECT_THROW(iexscan(w[0], std::span<const std::int64_t>(a), std::span<std::int64_t>(out), no_identity),
                 std::invalid_argument);

    Request r0 = ireduce(w[0], 0, std::span<const std::int64_t>(a), std::span<std::int64_t>(out), ops::sum<std::int64_t>());
    Request r1 = ireduce(w[1], 0, std::span<const std::int64_t>(b), std::span<std::int64_t>(out), ops::sum<std::int64_t>());
    EXPECT_TRUE(r1.done());
    EXPECT_THROW(r0.wait(), std::invalid_argument);

    const Comm right = split_range(w[0], 1, 1);
    EXPECT_THROW(ibarrier(right), InvalidUse);
}

TEST(Collectives, DistinctUserTagsInterleave) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 2 + trial % 15;
        Fabric f(p);
        auto w = world_comms(f);
        std::vector<int> a(p, 0), b(p, 0);
        a[0] = 111;
        b[p - 1] = 222;
        std::vector<Request> reqs;
        for (int r = 0; r < p; ++r) {
            reqs.push_back(ibcast(w[r], 0, std::span<int>(&a[r], 1), 10));
            reqs.push_back(ibcast(w[r], p - 1, std::span<int>(&b[r], 1), 11));
        }
        std::vector<std::size_t> pending(reqs.size());
        std::iota(pending.begin(), pending.end(), 0);
        while (!pending.empty()) {
            const std::size_t k = rng() % pending.size();
            if (reqs[pending[k]].test())
                pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(k));
        }
        for (int r = 0; r < p; ++r) {
            ASSERT_EQ(a[r], 111);
            ASSERT_EQ(b[r], 222);
        }
    }
}

TEST(Collectives, ProgressOnlyInsideTest) {
    Fabric f(4);
    auto w = world_comms(f);
    std::vector<int> v{9, 0, 0, 0};
    std::vector<Request> reqs;
    for (int r = 0; r < 4; ++r)
        reqs.push_back(ibcast(w[r], 0, std::span<int>(&v[r], 1)));
    // Rank 2 forwards to rank 3; while it does not test, rank 3 cannot finish.
    for (int i = 0; i < 10; ++i)
        for (int r : {0, 1, 3})
            reqs[r].test();
    EXPECT_TRUE(reqs[1].done());
    EXPECT_FALSE(reqs[2].done());
    EXPECT_FALSE(reqs[3].done());
    ASSERT_GT(drive(reqs), 0);
    EXPECT_EQ(v, (std::vector<int>{9, 9, 9, 9}));
}

TEST(Collectives, OverlappingTagScopedCommsMisdeliver) {
    for (CommMode mode : {CommMode::TagScoped, CommMode::ContextScoped}) {
        Fabric f(6, FabricOptions{.tag_registry = true});
        auto w = world_comms(f, mode);
        std::vector<Comm> a, b;
        for (int r = 0; r < 6; ++r) {
            a.push_back(split_range(w[r], 0, 3));
            b.push_back(split_range(w[r], 2, 5));
        }
        std::vector<int> va(6, 0), vb(6, 0);
        va[0] = 1;
        vb[2] = 2;
        std::vector<Request> reqs;
        for (int r = 0; r < 6; ++r) {
            if (r <= 3)
                reqs.push_back(ibcast(a[r], 0, std::span<int>(&va[r], 1), 5));
            if (r >= 2)
                reqs.push_back(ibcast(b[r], 0, std::span<int>(&vb[r], 1), 5));
        }
        drive(reqs);
        if (mode == CommMode::TagScoped) {
            EXPECT_NE(va[3], 1);
            EXPECT_GT(f.registry()->violations(), 0u);
        } else {
            EXPECT_EQ(va, (std::vector<int>{1, 1, 1, 1, 0, 0}));
            EXPECT_EQ(vb, (std::vector<int>{0, 0, 2, 2, 2, 2}));
            EXPECT_EQ(f.registry()->violations(), 0u);
        }
    }
}

TEST(Collectives, ScheduleChecksumFlagsRootMismatch) {
    Fabric f(4, FabricOptions{.schedule_check = true});
    auto w = world_comms(f);
    std::vector<int> v{1, 0, 0, 0};
    std::vector<Request> reqs;
    const int roots[] = {0, 0, 0, 1};
    for (int r = 0; r < 4; ++r)
        reqs.push_back(ibcast(w[r], roots[r], std::span<int>(&v[r], 1)));
    EXPECT_THROW(drive(reqs), ProtocolError);
}

TEST(Collectives, BlockingVariantsPipelineUnderThreads) {
    for (int p : {1, 2, 5, 8, 13}) {
        Fabric f(p);
        run_ranks(f, [&](BaseRank me) {
            const Comm w = create_from_world(f, me);
            for (int round = 0; round < 20; ++round) {
                int v = w.rank() == 0 ? round : -1;
                bcast(w, 0, std::span<int>(&v, 1));
                ASSERT_EQ(v, round);
            }
            std::int64_t x = w.rank() + 1, s = 0, e = 0, red = 0;
            scan(w, std::span<const std::int64_t>(&x, 1), std::span<std::int64_t>(&s, 1), ops::sum<std::int64_t>());
            exscan(w, std::span<const std::int64_t>(&x, 1), std::span<std::int64_t>(&e, 1), ops::sum<std::int64_t>());
            reduce(w, p - 1, std::span<const std::int64_t>(&x, 1), std::span<std::int64_t>(&red, 1),
                   ops::sum<std::int64_t>());
            barrier(w);
            ASSERT_EQ(s, x * (x + 1) / 2);
            ASSERT_EQ(e, s - x);
            if (w.rank() == p - 1)
                ASSERT_EQ(red, static_cast<std::int64_t>(p) * (p + 1) / 2);
            std::vector<int> all(static_cast<std::size_t>(p));
            const int mine = w.rank() * 3;
            gather(w, 0, std::span<const int>(&mine, 1), std::span<int>(all));
            if (w.rank() == 0)
                for (int r = 0; r < p; ++r)
                    ASSERT_EQ(all[r], 3 * r);
        });
    }
}

TEST(Collectives, BcastMatchesIbcastWait) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 9);
        const int root = static_cast<int>(rng() % p);
        std::vector<std::int64_t> data(1 + rng() % 40);
        for (auto& x : data)
            x = static_cast<std::int64_t>(rng());
        Fabric f(p);
        run_ranks(f, [&](BaseRank me) {
            const Comm w = create_from_world(f, me);
            std::vector<std::int64_t> x(data.size()), y(data.size());
            if (w.rank() == root)
                x = y = data;
            bcast(w, root, std::span<std::int64_t>(x));
            ibcast(w, root, std::span<std::int64_t>(y)).wait();
            ASSERT_EQ(x, data);
            ASSERT_EQ(x, y);
        });
    }
}

TEST(Collectives, ReservedTagsRejectedForUserTraffic) {
    Fabric f(2);
    auto w = world_comms(f);
    const int v = 0;
    for (Tag t : {tags::kBcast, tags::kBarrierDown, tags::kIbarrierDown})
        EXPECT_THROW(send(w[0], 1, t, std::span<const int>(&v, 1)), std::invalid_argument);
}
