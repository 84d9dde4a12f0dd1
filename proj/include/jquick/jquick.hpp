#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "jquick/kernels.hpp"
#include "rbc/comm.hpp"
#include "rbc/request.hpp"

namespace jquick {

enum class PivotMode { Single, SampleMedian };
enum class Schedule { Cascaded, Alternating };

const char* to_string(PivotMode mode);
const char* to_string(Schedule schedule);

struct Config {
    PivotMode pivot = PivotMode::SampleMedian;
    SampleConstants samples;
    std::uint64_t seed = 1;
    rbc::CommMode mode = rbc::CommMode::ContextScoped;
    /// Order in which a janus rank starts its two child tasks.
    Schedule schedule = Schedule::Cascaded;
};

/// One task as seen by one member rank. Ranks are indices into the sort communicator.
struct TaskTrace {
    int depth = 0;
    TaskShape shape;
    std::int64_t global_offset = 0;
    /// Elements this rank held when the task started.
    std::int64_t held = 0;
    bool base_case = false;
    int pivot_attempts = 0;
    bool fallback_pivot = false;
    PivotKey pivot;
    std::int64_t s_total = 0;
    /// Child capacities of this rank on the small and large side (0 if not a member).
    std::int64_t cap_small = 0;
    std::int64_t cap_large = 0;
    std::int64_t recv_small = 0;
    std::int64_t recv_large = 0;
    /// Data messages sent to other ranks per side; local moves are not counted.
    int sends_small = 0;
    int sends_large = 0;
    int msgs_in_small = 0;
    int msgs_in_large = 0;
};

struct SortStats {
    /// Deepest distributed level this rank took part in (root level = 1).
    int depth = 0;
    std::vector<TaskTrace> traces;
};

struct SortResult {
    std::vector<Key> data;
    SortStats stats;
};

/// Janus Quicksort for one rank, driven by poll(). Inputs of any size are first
/// redistributed to capacities ceil/floor(n/p); the result holds this rank's
/// capacity-many elements of the global order.
class JanusSorter {
public:
    JanusSorter(const rbc::Comm& comm, std::vector<Key> input, Config config = {});
    ~JanusSorter();
    JanusSorter(JanusSorter&&) noexcept;
    JanusSorter& operator=(JanusSorter&&) noexcept;

    /// Runs every runnable step of all active tasks once.
    rbc::Progress poll();
    bool done() const;
    /// poll() until done, parking while nothing is runnable.
    void run();

    /// Valid once done().
    SortResult take_result();

private:
    friend class Task;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blocking collective sort over `comm`.
SortResult sort(const rbc::Comm& comm, std::vector<Key> input, const Config& config = {});

} // namespace jquick
