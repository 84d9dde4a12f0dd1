#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "harness/harness.hpp"

using namespace harness;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}

} // namespace

TEST(Csv, EmptyRunWritesHeaderOnly) {
    const auto path = temp_path("rbc_harness_empty.csv");
    emit_csv({}, path);
    EXPECT_EQ(read_lines(path), (std::vector<std::string>{kCsvHeader}));
}

TEST(Csv, RoundTrip) {
    const std::vector<BenchRecord> recs{
        {"split_halves_range", 4, 0, "ctx", 0, 1234, 0, 0, 0, 0},
        {"sort_sample_cascaded", 8, 64, "tag", 1, 99, 40, 2048, 5, 17},
    };
    const auto path = temp_path("rbc_harness_two.csv");
    emit_csv(recs, path);
    const auto lines = read_lines(path);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], kCsvHeader);
    EXPECT_EQ(lines[1], "split_halves_range,4,0,ctx,0,1234,0,0,0,0");
    std::ifstream in(path);
    EXPECT_EQ(parse_csv(in), recs);
}

TEST(Csv, UnwritablePathNamesIt) {
    try {
        emit_csv({}, "/nonexistent-dir/x.csv");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
    }
}

TEST(Bench, RangeSplitSendsNothing) {
    for (SplitShape shape : {SplitShape::Halves, SplitShape::Chain}) {
        SplitOptions o;
        o.p = 16;
        o.shape = shape;
        o.reps = 2;
        o.splits = 100;
        const auto out = bench_split(o);
        ASSERT_TRUE(out.ok);
        ASSERT_EQ(out.records.size(), 2u);
        for (const auto& r : out.records)
            EXPECT_EQ(r.messages, 0u);
    }
}

TEST(Bench, GroupChainCascadesOnlyWhenCascaded) {
    SplitOptions o;
    o.p = 64;
    o.shape = SplitShape::Chain;
    o.impl = SplitImpl::Group;
    o.reps = 1;
    o.schedule = jquick::Schedule::Cascaded;
    const auto cascaded = bench_split(o);
    o.schedule = jquick::Schedule::Alternating;
    const auto alternating = bench_split(o);
    ASSERT_TRUE(cascaded.ok && alternating.ok);
    // 21 groups of 4 ranks: 3 envelopes each
    EXPECT_EQ(cascaded.records[0].messages, 63u);
    EXPECT_EQ(alternating.records[0].messages, 63u);
    EXPECT_GT(cascaded.records[0].rounds, 4 * alternating.records[0].rounds);
}

TEST(Bench, HalfBcastMessageCounts) {
    CollectiveOptions o;
    o.p = 16;
    o.scope = CollectiveScope::Half;
    o.reps = 1;
    const auto range = bench_collective(o);
    ASSERT_TRUE(range.ok);
    ASSERT_EQ(range.records.size(), 2u);
    EXPECT_EQ(range.records[0].bench, "collective_half_x1_bcast_range");
    EXPECT_EQ(range.records[0].messages, 7u);
    EXPECT_EQ(range.records[1].messages, 50u * 7u);

    o.impl = SplitImpl::Group;
    const auto group = bench_collective(o);
    ASSERT_TRUE(group.ok);
    EXPECT_EQ(group.records[0].messages, 14u);
    EXPECT_EQ(group.records[1].messages, 7u + 50u * 7u);
}

TEST(Bench, FullCollectivesVerify) {
    for (CollectiveKind op : {CollectiveKind::Bcast, CollectiveKind::Reduce, CollectiveKind::Scan,
                              CollectiveKind::Gatherv, CollectiveKind::Barrier}) {
        CollectiveOptions o;
        o.p = 9;
        o.op = op;
        o.n_per_p = 3;
        o.reps = 1;
        const auto out = bench_collective(o);
        EXPECT_TRUE(out.ok) << to_string(op);
        ASSERT_EQ(out.records.size(), 1u);
        if (op != CollectiveKind::Scan && op != CollectiveKind::Barrier)
            EXPECT_EQ(out.records[0].messages, 8u) << to_string(op);
    }
}

TEST(Bench, TinySortVerifies) {
    SortOptions o;
    o.p = 8;
    o.n_per_p = 1;
    o.reps = 2;
    const auto out = bench_sort(o);
    EXPECT_TRUE(out.ok);
    ASSERT_EQ(out.records.size(), 2u);
    for (const auto& r : out.records) {
        EXPECT_GE(r.depth, 1);
        EXPECT_EQ(r.n_per_p, 1);
    }
}

TEST(Bench, SortVerifiesInBothModes) {
    SortOptions o;
    o.p = 6;
    o.n_per_p = 50;
    o.reps = 1;
    o.config.mode = rbc::CommMode::TagScoped;
    const auto tag = bench_sort(o);
    o.config.mode = rbc::CommMode::ContextScoped;
    const auto ctx = bench_sort(o);
    EXPECT_TRUE(tag.ok && ctx.ok);
    EXPECT_EQ(tag.records[0].mode, "tag");
    EXPECT_EQ(ctx.records[0].mode, "ctx");
}
