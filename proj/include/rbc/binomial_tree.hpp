#pragma once

#include <vector>

namespace rbc {

/// A subtree hanging off a node: its root and the contiguous local-rank interval it covers.
struct TreeChild {
    int rank = 0;
    int lo = 0;
    int hi = 0;
};

/// One rank's view of the interval-halving tree over local ranks [0, p).
///
/// [lo, hi] is split after the largest power of two below its size; the half
/// holding the current subroot stays with it, the other half becomes a child
/// rooted at its lowest rank. Every subtree is a contiguous interval, so folding
/// children by side keeps rank order. For root 0 this is the usual binomial tree.
struct TreeNode {
    int rank = 0;
    int parent = -1;
    int lo = 0;
    int hi = 0;
    /// Largest subtree first.
    std::vector<TreeChild> children;
};

TreeNode tree_node(int p, int root, int rank);

/// Number of levels, ceil(log2 p).
int tree_depth(int p);

} // namespace rbc
