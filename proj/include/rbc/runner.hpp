#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "rbc/errors.hpp"
#include "rbc/request.hpp"
#include "rbc/transport.hpp"

namespace rbc {

/// Runs `body(BaseRank)` on one thread per rank of `fabric` and joins them.
///
/// The first failure aborts the fabric so that blocked peers unwind, and is rethrown
/// here. Aborted exceptions of the peers are not reported.
template <class Body>
void run_ranks(Fabric& fabric, Body&& body) {
    const int p = fabric.size();
    std::mutex mutex;
    std::exception_ptr first;
    bool first_is_abort = false;
    fabric.set_running(p);
    {
        std::vector<std::jthread> workers;
        workers.reserve(static_cast<std::size_t>(p));
        for (int r = 0; r < p; ++r) {
            workers.emplace_back([&, r] {
                try {
                    body(BaseRank(r));
                } catch (const Aborted&) {
                    std::lock_guard lock(mutex);
                    if (!first) {
                        first = std::current_exception();
                        first_is_abort = true;
                    }
                } catch (...) {
                    {
                        std::lock_guard lock(mutex);
                        if (!first || first_is_abort) {
                            first = std::current_exception();
                            first_is_abort = false;
                        }
                    }
                    fabric.abort();
                }
                fabric.worker_exited();
            });
        }
    }
    fabric.set_running(0);
    if (first)
        std::rethrow_exception(first);
}

/// Polls `reqs` round-robin on the calling thread until all are done.
/// Returns the number of sweeps, or -1 when a full sweep made no progress
/// while some request was still pending.
inline int drive(std::span<Request> reqs) {
    for (int sweep = 1;; ++sweep) {
        bool all = true;
        bool moved = false;
        for (Request& r : reqs) {
            if (r.done())
                continue;
            const Progress p = r.poll();
            moved = moved || p != Progress::Blocked;
            all = all && p == Progress::Done;
        }
        if (all)
            return sweep;
        if (!moved)
            return -1;
    }
}

} // namespace rbc
