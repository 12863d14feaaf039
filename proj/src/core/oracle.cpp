#include "oracle.hpp"

#include <algorithm>

#include "ci.hpp"
#include "discovery.hpp"

namespace tscausal {

namespace {

void check_query(const StaticGraph& g, int x, int y, const std::vector<int>& cond) {
    auto in_range = [&](int v) { return v >= 0 && v < g.node_count(); };
    if (!in_range(x) || !in_range(y)) raise(Errc::NodeNotFound, "query node outside graph");
    for (int c : cond)
        if (!in_range(c)) raise(Errc::NodeNotFound, "conditioning node outside graph");
    if (x == y) raise(Errc::InvalidArgument, "separation query needs distinct endpoints");
    for (int c : cond)
        if (c == x || c == y) raise(Errc::InvalidArgument, "endpoints may not appear in the conditioning set");
}

}  // namespace

bool d_separated(const StaticGraph& g, int x, int y, const std::vector<int>& cond) {
    check_query(g, x, y, cond);

    const int n = g.node_count();
    std::vector<char> in_cond(static_cast<std::size_t>(n), 0);
    for (int c : cond) in_cond[static_cast<std::size_t>(c)] = 1;

    // Nodes with a descendant inside the conditioning set (including it).
    std::vector<char> opens_collider(static_cast<std::size_t>(n), 0);
    std::vector<int> work(cond);
    for (int c : cond) opens_collider[static_cast<std::size_t>(c)] = 1;
    while (!work.empty()) {
        const int v = work.back();
        work.pop_back();
        for (int p : g.parents(v)) {
            if (!opens_collider[static_cast<std::size_t>(p)]) {
                opens_collider[static_cast<std::size_t>(p)] = 1;
                work.push_back(p);
            }
        }
    }

    // Reachability over (node, arrival direction) states.
    std::vector<char> vis_up(static_cast<std::size_t>(n), 0), vis_down(static_cast<std::size_t>(n), 0);
    std::vector<std::pair<int, bool>> stack;  // bool: arrived moving up (from a child)
    stack.emplace_back(x, true);
    while (!stack.empty()) {
        const auto [v, up] = stack.back();
        stack.pop_back();
        auto& vis = up ? vis_up : vis_down;
        if (vis[static_cast<std::size_t>(v)]) continue;
        vis[static_cast<std::size_t>(v)] = 1;
        if (v == y) return false;
        if (up) {
            if (!in_cond[static_cast<std::size_t>(v)]) {
                for (int p : g.parents(v)) stack.emplace_back(p, true);
                for (int c : g.children(v)) stack.emplace_back(c, false);
            }
        } else {
            if (!in_cond[static_cast<std::size_t>(v)])
                for (int c : g.children(v)) stack.emplace_back(c, false);
            if (opens_collider[static_cast<std::size_t>(v)])
                for (int p : g.parents(v)) stack.emplace_back(p, true);
        }
    }
    return true;
}

bool ts_d_separated(const TsGraph& window_dag, const SeparationQuery& q, int padding) {
    UnrolledDag u(window_dag, padding);
    return u.d_sep(q.x, q.y, q.cond);
}

namespace {

StaticGraph unroll_padded(const TsGraph& window_dag, int padding) {
    if (padding < 0) raise(Errc::HorizonTooShort, "padding must be non-negative");
    return unroll(window_dag, window_dag.tau_max() + 1 + padding);
}

}  // namespace

UnrolledDag::UnrolledDag(const TsGraph& window_dag, int padding)
    : graph_(unroll_padded(window_dag, padding)), tau_max_(window_dag.tau_max()) {
    const auto n = static_cast<std::size_t>(graph_.node_count());
    stamp_anc_.assign(n, 0);
    stamp_cond_.assign(n, 0);
    stamp_up_.assign(n, 0);
    stamp_down_.assign(n, 0);
}

int UnrolledDag::anchor_node(TsNode n) const {
    if (n.lag < 0 || n.lag > tau_max_)
        raise(Errc::LagOutOfRange, "query lag " + std::to_string(n.lag) + " outside the window");
    return graph_.node_id(n.var, graph_.steps() - 1 - n.lag);
}

bool UnrolledDag::d_sep(TsNode x, TsNode y, const std::vector<TsNode>& cond) const {
    const int xid = anchor_node(x);
    const int yid = anchor_node(y);
    if (xid == yid) raise(Errc::InvalidArgument, "separation query needs distinct endpoints");

    ++epoch_;
    const int e = epoch_;
    worklist_.clear();
    for (const TsNode& c : cond) {
        const int cid = anchor_node(c);
        if (cid == xid || cid == yid)
            raise(Errc::InvalidArgument, "endpoints may not appear in the conditioning set");
        stamp_cond_[static_cast<std::size_t>(cid)] = e;
        if (stamp_anc_[static_cast<std::size_t>(cid)] != e) {
            stamp_anc_[static_cast<std::size_t>(cid)] = e;
            worklist_.push_back(cid);
        }
    }
    while (!worklist_.empty()) {
        const int v = worklist_.back();
        worklist_.pop_back();
        for (int p : graph_.parents(v)) {
            if (stamp_anc_[static_cast<std::size_t>(p)] != e) {
                stamp_anc_[static_cast<std::size_t>(p)] = e;
                worklist_.push_back(p);
            }
        }
    }

    std::vector<std::pair<int, bool>> stack;
    stack.emplace_back(xid, true);
    while (!stack.empty()) {
        const auto [v, up] = stack.back();
        stack.pop_back();
        auto& vis = up ? stamp_up_ : stamp_down_;
        if (vis[static_cast<std::size_t>(v)] == e) continue;
        vis[static_cast<std::size_t>(v)] = e;
        if (v == yid) return false;
        const bool conditioned = stamp_cond_[static_cast<std::size_t>(v)] == e;
        if (up) {
            if (!conditioned) {
                for (int p : graph_.parents(v)) stack.emplace_back(p, true);
                for (int c : graph_.children(v)) stack.emplace_back(c, false);
            }
        } else {
            if (!conditioned)
                for (int c : graph_.children(v)) stack.emplace_back(c, false);
            if (stamp_anc_[static_cast<std::size_t>(v)] == e)
                for (int p : graph_.parents(v)) stack.emplace_back(p, true);
        }
    }
    return true;
}

bool UnrolledDag::is_ancestor(TsNode u, TsNode v) const {
    const int uid = anchor_node(u);
    const int vid = anchor_node(v);
    if (uid == vid) return false;
    // Directed paths never move backward in time, so the window horizon is
    // always sufficient for ancestor queries between anchored nodes.
    ++epoch_;
    const int e = epoch_;
    worklist_.clear();
    worklist_.push_back(uid);
    stamp_up_[static_cast<std::size_t>(uid)] = e;
    while (!worklist_.empty()) {
        const int w = worklist_.back();
        worklist_.pop_back();
        for (int c : graph_.children(w)) {
            if (c == vid) return true;
            if (stamp_up_[static_cast<std::size_t>(c)] != e) {
                stamp_up_[static_cast<std::size_t>(c)] = e;
                worklist_.push_back(c);
            }
        }
    }
    return false;
}

namespace {

// Canonical candidate pairs over `m` relabeled variables: auto links, ordered
// lagged cross links, unordered contemporaneous cross links.
std::vector<std::pair<TsNode, TsNode>> candidate_pairs(int m, int tau_max) {
    std::vector<std::pair<TsNode, TsNode>> out;
    for (int j = 0; j < m; ++j)
        for (int tau = 1; tau <= tau_max; ++tau) out.push_back({{j, tau}, {j, 0}});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j)
                for (int tau = 1; tau <= tau_max; ++tau) out.push_back({{i, tau}, {j, 0}});
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) out.push_back({{i, 0}, {j, 0}});
    return out;
}

bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[static_cast<std::size_t>(i)] < n - (k - i)) {
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

TsGraph latent_project(const TsGraph& dag, const std::vector<int>& observed, int padding) {
    if (dag.kind() != GraphKind::DAG) raise(Errc::InvalidArgument, "latent_project expects a DAG");
    for (int v : observed)
        if (v < 0 || v >= dag.n_vars()) raise(Errc::BadLatentIndex, "observed index outside variable range");
    std::vector<int> obs(observed);
    std::sort(obs.begin(), obs.end());
    obs.erase(std::unique(obs.begin(), obs.end()), obs.end());
    const int m = static_cast<int>(obs.size());
    if (m == 0) raise(Errc::InvalidArgument, "no observed variables");

    const int tau_max = dag.tau_max();
    UnrolledDag unrolled(dag, padding);

    // Window nodes in original variable labels.
    auto original = [&](TsNode n) { return TsNode{obs[static_cast<std::size_t>(n.var)], n.lag}; };
    std::vector<TsNode> window;
    for (int lag = 0; lag <= tau_max; ++lag)
        for (int j = 0; j < m; ++j) window.push_back({j, lag});

    std::vector<TsEdge> edges;
    for (const auto& [u, v] : candidate_pairs(m, tau_max)) {
        std::vector<TsNode> others;
        for (const TsNode& w : window)
            if (w != u && w != v) others.push_back(w);

        bool separable = false;
        std::vector<TsNode> cond;
        const int pool = static_cast<int>(others.size());
        for (int size = 0; size <= pool && !separable; ++size) {
            std::vector<int> idx(static_cast<std::size_t>(size));
            for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
            bool more = true;
            while (more && !separable) {
                cond.clear();
                for (int i : idx) cond.push_back(original(others[static_cast<std::size_t>(i)]));
                if (unrolled.d_sep(original(u), original(v), cond)) separable = true;
                more = size > 0 && next_combination(idx, pool);
                if (size == 0) more = false;
            }
        }
        if (separable) continue;

        TsEdge e;
        e.a = u;
        e.b = v;
        e.mark_at_a = unrolled.is_ancestor(original(u), original(v)) ? Edgemark::Tail : Edgemark::Head;
        e.mark_at_b = unrolled.is_ancestor(original(v), original(u)) ? Edgemark::Tail : Edgemark::Head;
        edges.push_back(e);
    }
    return TsGraph(GraphKind::MAG, m, tau_max, std::move(edges));
}

TsGraph oracle_pag(const TsGraph& window_dag, const std::vector<int>& observed, int tau_max, int padding) {
    if (window_dag.kind() != GraphKind::DAG) raise(Errc::InvalidArgument, "oracle_pag expects a DAG");
    OracleCiBackend backend(window_dag, observed, padding);
    DiscoveryConfig cfg;
    cfg.alpha = 0.5;  // exact backend emits p-values of 0 or 1 only
    cfg.tau_max = tau_max;
    cfg.max_cond_size = kUnlimitedCondSize;
    cfg.pds_path_length_max = kUnlimitedCondSize;
    // Preliminary phases only sharpen finite-sample conditioning; with a
    // perfect backend one ancestral pass plus the confounder pass is exact.
    cfg.n_preliminary_phases = 0;
    return lpcmci_discover(backend, cfg).pag;
}

}  // namespace tscausal
