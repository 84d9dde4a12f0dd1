#include "rbc/binomial_tree.hpp"

#include <stdexcept>

namespace rbc {

namespace {

/// Split point of [lo, hi]: lo plus the largest power of two below the size.
int split_point(int lo, int hi) {
    const int size = hi - lo + 1;
    int half = 1;
    while (half * 2 < size)
        half *= 2;
    return lo + half;
}

} // namespace

TreeNode tree_node(int p, int root, int rank) {
    if (p < 1 || root < 0 || root >= p || rank < 0 || rank >= p)
        throw std::invalid_argument("tree_node: rank or root outside [0, p)");
    TreeNode node;
    node.rank = rank;
    int lo = 0;
    int hi = p - 1;
    int sub = root;
    while (sub != rank) {
        const int m = split_point(lo, hi);
        const bool sub_left = sub < m;
        const bool rank_left = rank < m;
        if (sub_left == rank_left) {
            if (rank_left)
                hi = m - 1;
            else
                lo = m;
            continue;
        }
        node.parent = sub;
        if (rank_left) {
            hi = m - 1;
        } else {
            lo = m;
        }
        sub = lo;
    }
    node.lo = lo;
    node.hi = hi;
    while (lo < hi) {
        const int m = split_point(lo, hi);
        if (rank < m) {
            node.children.push_back({m, m, hi});
            hi = m - 1;
        } else {
            node.children.push_back({lo, lo, m - 1});
            lo = m;
        }
    }
    return node;
}

int tree_depth(int p) {
    int d = 0;
    while ((1 << d) < p)
        ++d;
    return d;
}

} // namespace rbc
