#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jquick/jquick.hpp"
#include "rbc/comm.hpp"

namespace harness {

/// One repetition of one benchmark configuration.
struct BenchRecord {
    std::string bench;
    int p = 0;
    std::int64_t n_per_p = 0;
    std::string mode;
    int repetition = 0;
    std::int64_t wall_ns = 0;
    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;
    int depth = 0;
    /// Longest causal message chain (logical clock) of the run.
    std::uint64_t rounds = 0;

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct BenchOutcome {
    std::vector<BenchRecord> records;
    bool ok = true;
    std::vector<std::string> problems;
};

enum class SplitImpl { Range, Group };
enum class SplitShape { Halves, Chain };
enum class CollectiveKind { Bcast, Reduce, Scan, Gatherv, Barrier };
enum class CollectiveScope { Full, Half };

const char* to_string(SplitImpl impl);
const char* to_string(SplitShape shape);
const char* to_string(CollectiveKind op);

struct SplitOptions {
    int p = 64;
    SplitShape shape = SplitShape::Halves;
    SplitImpl impl = SplitImpl::Range;
    jquick::Schedule schedule = jquick::Schedule::Cascaded;
    rbc::CommMode mode = rbc::CommMode::ContextScoped;
    int reps = 5;
    /// Range impl: local splits timed per repetition.
    int splits = 10000;
};

/// Halves: every rank joins <0..p/2-1> or <p/2..p-1>. Chain: overlapping groups
/// {0..3}, {3..6}, ..., boundary ranks creating their two groups in schedule order.
/// The group impl uses blocking creations, so a cascaded chain serializes.
BenchOutcome bench_split(const SplitOptions& opt);

struct CollectiveOptions {
    int p = 64;
    CollectiveKind op = CollectiveKind::Bcast;
    std::int64_t n_per_p = 1;
    CollectiveScope scope = CollectiveScope::Full;
    SplitImpl impl = SplitImpl::Range;
    rbc::CommMode mode = rbc::CommMode::ContextScoped;
    int reps = 5;
};

/// Full: the collective on all p ranks. Half: split off ranks 0..p/2-1 and run the
/// collective there once ("half_x1") and 50 times ("half_x50").
BenchOutcome bench_collective(const CollectiveOptions& opt);

struct SortOptions {
    int p = 8;
    std::int64_t n_per_p = 1;
    jquick::Config config;
    int reps = 3;
    std::uint64_t seed = 1;
};

/// Threaded sort of uniform random keys, verified against a sequential oracle.
BenchOutcome bench_sort(const SortOptions& opt);

inline constexpr const char* kCsvHeader = "bench,p,n_per_p,mode,repetition,wall_ns,messages,bytes,depth,rounds";

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);
/// Throws std::runtime_error naming `path` on I/O failure.
void emit_csv(const std::vector<BenchRecord>& records, const std::string& path);
std::vector<BenchRecord> parse_csv(std::istream& is);

} // namespace harness
