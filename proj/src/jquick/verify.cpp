#include "jquick/verify.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace jquick {

namespace {

template <class... Args>
std::string describe(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}

} // namespace

Verdict verify_sort(const std::vector<std::vector<Key>>& inputs, const std::vector<SortResult>& outputs) {
    Verdict v;
    const int p = static_cast<int>(outputs.size());
    std::vector<Key> all_in;
    std::vector<Key> all_out;
    for (const auto& in : inputs)
        all_in.insert(all_in.end(), in.begin(), in.end());
    for (const auto& out : outputs)
        all_out.insert(all_out.end(), out.data.begin(), out.data.end());

    if (!std::is_sorted(all_out.begin(), all_out.end())) {
        v.sorted = false;
        v.problems.push_back("concatenated output is not sorted");
    }
    std::sort(all_in.begin(), all_in.end());
    std::vector<Key> sorted_out = all_out;
    std::sort(sorted_out.begin(), sorted_out.end());
    if (sorted_out != all_in) {
        v.permutation = false;
        v.problems.push_back("output is not a permutation of the input");
    }

    const Capacities caps{static_cast<std::int64_t>(all_in.size()), p};
    for (int b = 0; b < p; ++b) {
        if (static_cast<std::int64_t>(outputs[b].data.size()) != caps.cap(b)) {
            v.balanced = false;
            v.problems.push_back(describe("rank ", b, " holds ", outputs[b].data.size(), " elements, capacity ",
                                          caps.cap(b)));
        }
    }

    for (int b = 0; b < p; ++b) {
        const auto& traces = outputs[b].stats.traces;
        int max_depth = 0;
        for (const TaskTrace& t : traces) {
            max_depth = std::max(max_depth, t.depth);
            if (!t.base_case)
                v.depth = std::max(v.depth, t.depth);
        }
        for (int d = 1; d <= max_depth; ++d) {
            std::int64_t held = 0;
            for (const TaskTrace& t : traces)
                if (t.depth == d || (t.base_case && t.depth < d))
                    held += t.held;
            if (held != caps.cap(b)) {
                v.level_balanced = false;
                v.problems.push_back(describe("rank ", b, " holds ", held, " elements at level ", d));
            }
        }
        for (const TaskTrace& t : traces) {
            if (t.base_case)
                continue;
            if (t.recv_small != t.cap_small || t.recv_large != t.cap_large || t.cap_small + t.cap_large != t.held) {
                v.capacities_filled = false;
                v.problems.push_back(describe("rank ", b, " at depth ", t.depth, " received ", t.recv_small, "+",
                                              t.recv_large, " for capacities ", t.cap_small, "+", t.cap_large));
            }
            const std::int64_t fan_in = std::min<std::int64_t>(t.shape.size(), std::max<std::int64_t>(caps.cap(b), 1));
            if (t.sends_small > 2 || t.sends_large > 2 || t.msgs_in_small + t.msgs_in_large > fan_in + 2) {
                v.message_bounds = false;
                v.problems.push_back(describe("rank ", b, " at depth ", t.depth, " sent ", t.sends_small, "+",
                                              t.sends_large, " and received ", t.msgs_in_small + t.msgs_in_large,
                                              " data messages"));
            }
        }
    }
    return v;
}

} // namespace jquick
