#pragma once

// Directed communication graph with leader pinning. Follower i receives from
// follower j iff adjacency(i,j) = 1; pinning(i) = 1 iff i hears the leader.

#include <vector>

#include "petreg/matrix.hpp"

namespace petreg {

struct CommGraph {
    Index n_followers = 0;
    Matrix adjacency;            // n x n, zero diagonal, entries in {0,1}
    std::vector<int> pinning;    // length n, entries in {0,1}

    CommGraph() = default;
    CommGraph(Index n, Matrix adj, std::vector<int> pin)
        : n_followers(n), adjacency(std::move(adj)), pinning(std::move(pin)) {
        validate();
    }

    void validate() const {
        if (n_followers < 1) throw InputError("CommGraph: need at least one follower");
        if (adjacency.rows() != n_followers || adjacency.cols() != n_followers)
            throw DimensionError("CommGraph: adjacency must be n x n");
        if (static_cast<Index>(pinning.size()) != n_followers)
            throw DimensionError("CommGraph: pinning must have length n");
        bool any_pinned = false;
        for (Index i = 0; i < n_followers; ++i) {
            if (pinning[static_cast<std::size_t>(i)] != 0 &&
                pinning[static_cast<std::size_t>(i)] != 1)
                throw InputError("CommGraph: pinning entries must be 0 or 1");
            any_pinned |= pinning[static_cast<std::size_t>(i)] == 1;
            for (Index j = 0; j < n_followers; ++j) {
                const Real a = adjacency(i, j);
                if (a != 0.0 && a != 1.0)
                    throw InputError("CommGraph: adjacency entries must be 0 or 1");
                if (i == j && a != 0.0) throw InputError("CommGraph: no self loops");
            }
        }
        if (!any_pinned) throw InputError("CommGraph: at least one follower must be pinned");
    }
};

/// H = L + B with L = D - A (D = diag of row sums) and B = diag(pinning).
inline Matrix h_matrix(const CommGraph& g) {
    const Index n = g.n_followers;
    Matrix h(n, n);
    for (Index i = 0; i < n; ++i) {
        Real degree = 0;
        for (Index j = 0; j < n; ++j) {
            degree += g.adjacency(i, j);
            h(i, j) = -g.adjacency(i, j);
        }
        h(i, i) = degree + g.pinning[static_cast<std::size_t>(i)];
    }
    return h;
}

/// Followers not reachable from the leader through pinning + adjacency edges.
/// Empty result means the leader-rooted spanning tree exists.
inline std::vector<Index> unreachable_followers(const CommGraph& g) {
    const Index n = g.n_followers;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Index> stack;
    for (Index i = 0; i < n; ++i)
        if (g.pinning[static_cast<std::size_t>(i)] == 1) {
            seen[static_cast<std::size_t>(i)] = true;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        const Index j = stack.back();
        stack.pop_back();
        // information flows j -> i when a_ij = 1
        for (Index i = 0; i < n; ++i)
            if (g.adjacency(i, j) == 1.0 && !seen[static_cast<std::size_t>(i)]) {
                seen[static_cast<std::size_t>(i)] = true;
                stack.push_back(i);
            }
    }
    std::vector<Index> missing;
    for (Index i = 0; i < n; ++i)
        if (!seen[static_cast<std::size_t>(i)]) missing.push_back(i);
    return missing;
}

inline bool has_leader_spanning_tree(const CommGraph& g) {
    return unreachable_followers(g).empty();
}

/// The benchmark topology: a chain leader -> 1 -> 2 -> ... -> n.
inline CommGraph chain_graph(Index n) {
    Matrix adj(n, n);
    for (Index i = 1; i < n; ++i) adj(i, i - 1) = 1.0;
    std::vector<int> pin(static_cast<std::size_t>(n), 0);
    pin[0] = 1;
    return CommGraph(n, std::move(adj), std::move(pin));
}

}  // namespace petreg
