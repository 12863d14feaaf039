#ifndef TSCAUSAL_TESTS_SUPPORT_HPP
#define TSCAUSAL_TESTS_SUPPORT_HPP

#include <algorithm>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"

namespace tscausal::testsupport {

inline TsEdge directed(TsNode a, TsNode b) { return {a, b, Edgemark::Tail, Edgemark::Head}; }

// Random window DAG: random contemporaneous order, forward lag-0 edges,
// arbitrary lagged edges.
inline TsGraph random_window_dag(RngStream& rng, int n_vars, int tau_max, double edge_prob) {
    std::vector<int> order(static_cast<std::size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    std::vector<int> rank(static_cast<std::size_t>(n_vars));
    for (int pos = 0; pos < n_vars; ++pos)
        rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;

    std::vector<TsEdge> edges;
    for (int i = 0; i < n_vars; ++i) {
        for (int j = 0; j < n_vars; ++j) {
            for (int tau = 0; tau <= tau_max; ++tau) {
                if (tau == 0 && i >= j) continue;
                if (rng.uniform01() >= edge_prob) continue;
                if (tau == 0) {
                    const bool i_first = rank[static_cast<std::size_t>(i)] < rank[static_cast<std::size_t>(j)];
                    edges.push_back(directed({i_first ? i : j, 0}, {i_first ? j : i, 0}));
                } else {
                    edges.push_back(directed({i, tau}, {j, 0}));
                }
            }
        }
    }
    return TsGraph(GraphKind::DAG, n_vars, tau_max, std::move(edges));
}

// Random plain DAG as a StaticGraph over one time slice.
inline StaticGraph random_static_dag(RngStream& rng, int n_nodes, double edge_prob) {
    std::vector<int> order(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    StaticGraph g(n_nodes, 1);
    for (int i = 0; i < n_nodes; ++i)
        for (int j = i + 1; j < n_nodes; ++j)
            if (rng.uniform01() < edge_prob)
                g.add_edge(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    return g;
}

// Exhaustive path-enumeration separation check, the slow reference for the
// reachability implementation. Walks every simple path between x and y and
// applies the blocking rules directly.
inline bool brute_force_d_separated(const StaticGraph& g, int x, int y, const std::vector<int>& cond) {
    const int n = g.node_count();
    std::vector<char> in_cond(static_cast<std::size_t>(n), 0);
    for (int c : cond) in_cond[static_cast<std::size_t>(c)] = 1;

    // Nodes with a descendant in the conditioning set.
    std::vector<char> opens(static_cast<std::size_t>(n), 0);
    std::vector<int> work(cond);
    for (int c : cond) opens[static_cast<std::size_t>(c)] = 1;
    while (!work.empty()) {
        const int v = work.back();
        work.pop_back();
        for (int p : g.parents(v))
            if (!opens[static_cast<std::size_t>(p)]) {
                opens[static_cast<std::size_t>(p)] = 1;
                work.push_back(p);
            }
    }

    auto is_child = [&](int parent, int child) {
        const auto& cs = g.children(parent);
        return std::find(cs.begin(), cs.end(), child) != cs.end();
    };

    std::vector<int> path{x};
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    on_path[static_cast<std::size_t>(x)] = 1;

    auto path_active = [&]() {
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            const int prev = path[i - 1], mid = path[i], next = path[i + 1];
            const bool collider = is_child(prev, mid) && is_child(next, mid);
            if (collider) {
                if (!opens[static_cast<std::size_t>(mid)]) return false;
            } else {
                if (in_cond[static_cast<std::size_t>(mid)]) return false;
            }
        }
        return true;
    };

    // DFS over all simple undirected paths.
    struct Frame {
        int node;
        std::vector<int> nbrs;
        std::size_t next = 0;
    };
    auto neighbors = [&](int v) {
        std::vector<int> out(g.parents(v));
        out.insert(out.end(), g.children(v).begin(), g.children(v).end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };
    std::vector<Frame> stack{{x, neighbors(x), 0}};
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next >= top.nbrs.size()) {
            on_path[static_cast<std::size_t>(top.node)] = 0;
            path.pop_back();
            stack.pop_back();
            continue;
        }
        const int nxt = top.nbrs[top.next++];
        if (on_path[static_cast<std::size_t>(nxt)]) continue;
        path.push_back(nxt);
        if (nxt == y) {
            if (path_active()) return false;
            path.pop_back();
            continue;
        }
        on_path[static_cast<std::size_t>(nxt)] = 1;
        stack.push_back({nxt, neighbors(nxt), 0});
    }
    return true;
}

// All subsets of the integers [0, n) excluding the two endpoints.
inline std::vector<std::vector<int>> all_conditioning_sets(int n, int x, int y) {
    std::vector<int> others;
    for (int v = 0; v < n; ++v)
        if (v != x && v != y) others.push_back(v);
    std::vector<std::vector<int>> out;
    const int m = static_cast<int>(others.size());
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> set;
        for (int b = 0; b < m; ++b)
            if (mask & (1 << b)) set.push_back(others[static_cast<std::size_t>(b)]);
        out.push_back(std::move(set));
    }
    return out;
}

}  // namespace tscausal::testsupport

#endif
