#include "discovery.hpp"

#include <algorithm>
#include <unordered_set>

#include "rng.hpp"

namespace tscausal {

namespace {

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

std::vector<TsNode> window_nodes(int n_vars, int tau_max) {
    std::vector<TsNode> out;
    out.reserve(static_cast<std::size_t>(n_vars) * static_cast<std::size_t>(tau_max + 1));
    for (int lag = 0; lag <= tau_max; ++lag)
        for (int v = 0; v < n_vars; ++v) out.push_back({v, lag});
    return out;
}

}  // namespace

DiscoveryState::DiscoveryState(int n_vars, int tau_max, const BackgroundKnowledge* bk)
    : n_vars_(n_vars), tau_max_(tau_max) {
    if (n_vars <= 0) raise(Errc::InvalidArgument, "n_vars must be positive");
    if (tau_max < 0) raise(Errc::InvalidArgument, "tau_max must be non-negative");

    for (int j = 0; j < n_vars; ++j)
        for (int tau = 1; tau <= tau_max; ++tau) links_.push_back({{j, tau}, {j, 0}});
    for (int i = 0; i < n_vars; ++i)
        for (int j = 0; j < n_vars; ++j)
            if (i != j)
                for (int tau = 1; tau <= tau_max; ++tau) links_.push_back({{i, tau}, {j, 0}});
    for (int i = 0; i < n_vars; ++i)
        for (int j = i + 1; j < n_vars; ++j) links_.push_back({{i, 0}, {j, 0}});
    std::sort(links_.begin(), links_.end(), [](const Link& l, const Link& r) {
        return std::tie(l.a.var, l.a.lag, l.b.var) < std::tie(r.a.var, r.a.lag, r.b.var);
    });
    for (int idx = 0; idx < static_cast<int>(links_.size()); ++idx) {
        const Link& l = links_[static_cast<std::size_t>(idx)];
        index_[{l.a.var, l.a.lag, l.b.var}] = idx;
    }
    sepsets_.resize(links_.size());
    parents_.resize(static_cast<std::size_t>(n_vars));
    non_ancestors_.resize(static_cast<std::size_t>(n_vars));
    carried_parents_.resize(static_cast<std::size_t>(n_vars));
    carried_non_ancestors_.resize(static_cast<std::size_t>(n_vars));

    if (bk) {
        for (const auto& [u, v] : bk->forbidden_adjacencies) {
            const auto r = resolve(u, v);
            if (!r) raise(Errc::InvalidArgument, "forbidden adjacency does not name a candidate link");
            Link& l = links_[static_cast<std::size_t>(r->first)];
            l.present = false;
            l.bk_removed = true;
        }
        for (const BackgroundKnowledge::ForcedMark& fm : bk->forced_marks) {
            if (fm.mark != Edgemark::Tail && fm.mark != Edgemark::Head)
                raise(Errc::IllegalMark, "only tails and heads may be forced");
            const auto r = resolve(fm.a, fm.b);
            if (!r) raise(Errc::InvalidArgument, "forced mark does not name a candidate link");
            Link& l = links_[static_cast<std::size_t>(r->first)];
            if (!l.present) raise(Errc::InvalidArgument, "forced mark on a forbidden adjacency");
            const TsNode target = fm.at_a ? fm.a : fm.b;
            const bool at_canonical_a = TsNode{target.var, target.lag - r->second} == l.a;
            if (at_canonical_a) {
                l.ma = fm.mark;
                l.lock_a = l.bk_lock_a = true;
            } else {
                l.mb = fm.mark;
                l.lock_b = l.bk_lock_b = true;
            }
        }
    }
}

std::optional<std::pair<int, int>> DiscoveryState::resolve(TsNode u, TsNode v) const {
    if (u.var < 0 || u.var >= n_vars_ || v.var < 0 || v.var >= n_vars_) return std::nullopt;
    if (u.lag < 0 || v.lag < 0) return std::nullopt;
    if (u == v) return std::nullopt;
    LinkKey key;
    int shift = 0;
    if (u.lag > v.lag) {
        key = {u.var, u.lag - v.lag, v.var};
        shift = v.lag;
    } else if (v.lag > u.lag) {
        key = {v.var, v.lag - u.lag, u.var};
        shift = u.lag;
    } else {
        if (u.var == v.var) return std::nullopt;
        key = {std::min(u.var, v.var), 0, std::max(u.var, v.var)};
        shift = u.lag;
    }
    const auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return std::make_pair(it->second, shift);
}

bool DiscoveryState::adjacent(TsNode u, TsNode v) const {
    const auto r = resolve(u, v);
    return r && links_[static_cast<std::size_t>(r->first)].present;
}

std::vector<TsNode> DiscoveryState::neighbors(TsNode u) const {
    std::vector<TsNode> out;
    for (const Link& l : links_) {
        if (!l.present) continue;
        if (l.a.var == u.var && u.lag >= l.a.lag) {
            const TsNode partner{l.b.var, u.lag - l.a.lag};
            if (partner.lag <= tau_max_) out.push_back(partner);
        }
        if (l.b.var == u.var) {
            const TsNode partner{l.a.var, l.a.lag + u.lag};
            if (partner.lag <= tau_max_) out.push_back(partner);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), u), out.end());
    return out;
}

Edgemark DiscoveryState::mark_at(TsNode u, TsNode v) const {
    const auto r = resolve(u, v);
    if (!r || !links_[static_cast<std::size_t>(r->first)].present)
        raise(Errc::NodeNotFound, "mark_at on a missing edge");
    const Link& l = links_[static_cast<std::size_t>(r->first)];
    const bool u_is_a = TsNode{u.var, u.lag - r->second} == l.a;
    return u_is_a ? l.ma : l.mb;
}

void DiscoveryState::remove_link(int idx, std::vector<TsNode> sepset) {
    Link& l = links_[static_cast<std::size_t>(idx)];
    if (!l.present) return;
    l.present = false;
    std::sort(sepset.begin(), sepset.end());
    sepsets_[static_cast<std::size_t>(idx)] = std::move(sepset);
}

bool DiscoveryState::has_sepset(int idx) const { return sepsets_[static_cast<std::size_t>(idx)].has_value(); }

const std::vector<TsNode>& DiscoveryState::sepset(int idx) const {
    if (!sepsets_[static_cast<std::size_t>(idx)]) raise(Errc::InvalidArgument, "no sepset recorded");
    return *sepsets_[static_cast<std::size_t>(idx)];
}

bool DiscoveryState::sepset_contains(int idx, int shift, TsNode m) const {
    if (!sepsets_[static_cast<std::size_t>(idx)]) return false;
    const TsNode canonical{m.var, m.lag - shift};
    if (canonical.lag < 0) return false;
    const auto& s = *sepsets_[static_cast<std::size_t>(idx)];
    return std::binary_search(s.begin(), s.end(), canonical);
}

void DiscoveryState::note_surviving_statistic(int idx, double abs_stat) {
    Link& l = links_[static_cast<std::size_t>(idx)];
    l.strength = std::min(l.strength, std::clamp(abs_stat, 0.0, 1.0));
}

void DiscoveryState::set_mark(int idx, bool at_a, Edgemark m) {
    Link& l = links_[static_cast<std::size_t>(idx)];
    if (at_a)
        l.ma = m;
    else
        l.mb = m;
}

bool DiscoveryState::apply_mark_proposals(const std::vector<MarkProposal>& batch) {
    // Gather distinct proposals per end before touching anything so the
    // result does not depend on scan order.
    std::map<std::pair<int, bool>, std::pair<bool, bool>> wants;  // end -> (tail?, head?)
    for (const MarkProposal& p : batch) {
        auto& w = wants[{p.link, p.at_a}];
        if (p.mark == Edgemark::Tail) w.first = true;
        if (p.mark == Edgemark::Head) w.second = true;
    }
    bool changed = false;
    for (const auto& [end, w] : wants) {
        Link& l = links_[static_cast<std::size_t>(end.first)];
        if (!l.present) continue;
        const bool locked = end.second ? l.lock_a : l.lock_b;
        if (locked) continue;
        const Edgemark current = end.second ? l.ma : l.mb;
        if (current == Edgemark::Conflict) continue;
        const bool lagged = l.a.lag > 0;

        Edgemark proposed;
        if (w.first && w.second)
            proposed = lagged ? Edgemark::Head : Edgemark::Conflict;
        else
            proposed = w.first ? Edgemark::Tail : Edgemark::Head;

        Edgemark next = current;
        if (current == Edgemark::Circle) {
            next = proposed;
        } else if (proposed != current) {
            // Disagreement with an earlier orientation: conflicts are only
            // recorded on contemporaneous ends; on lagged links the earlier
            // decision stands.
            next = lagged ? current : Edgemark::Conflict;
        }
        if (next != current) {
            set_mark(end.first, end.second, next);
            changed = true;
        }
    }
    return changed;
}

void DiscoveryState::set_time_lock(int idx) {
    Link& l = links_[static_cast<std::size_t>(idx)];
    if (l.bk_lock_b) return;
    l.mb = Edgemark::Head;
    l.lock_b = true;
}

void DiscoveryState::reset_soft_marks() {
    for (Link& l : links_) {
        if (!l.bk_lock_a) {
            l.ma = Edgemark::Circle;
            l.lock_a = false;
        }
        if (!l.bk_lock_b) {
            l.mb = Edgemark::Circle;
            l.lock_b = false;
        }
    }
}

void DiscoveryState::rebuild_knowledge() {
    for (int j = 0; j < n_vars_; ++j) {
        parents_[static_cast<std::size_t>(j)].clear();
        non_ancestors_[static_cast<std::size_t>(j)].clear();
    }
    for (const Link& l : links_) {
        if (!l.present) continue;
        if (l.ma == Edgemark::Tail && l.mb == Edgemark::Head)
            parents_[static_cast<std::size_t>(l.b.var)].push_back(l.a);
        if (l.ma == Edgemark::Head && l.mb == Edgemark::Tail && l.a.lag == 0)
            parents_[static_cast<std::size_t>(l.a.var)].push_back(l.b);
        if (l.ma == Edgemark::Head) non_ancestors_[static_cast<std::size_t>(l.b.var)].push_back(l.a);
        if (l.mb == Edgemark::Head && l.a.lag == 0)
            non_ancestors_[static_cast<std::size_t>(l.a.var)].push_back(l.b);
    }
    for (int j = 0; j < n_vars_; ++j) {
        auto& pa = parents_[static_cast<std::size_t>(j)];
        for (const TsNode& p : carried_parents_[static_cast<std::size_t>(j)]) {
            const auto r = resolve(p, {j, 0});
            if (r && links_[static_cast<std::size_t>(r->first)].present) pa.push_back(p);
        }
        std::sort(pa.begin(), pa.end());
        pa.erase(std::unique(pa.begin(), pa.end()), pa.end());

        auto& na = non_ancestors_[static_cast<std::size_t>(j)];
        na.insert(na.end(), carried_non_ancestors_[static_cast<std::size_t>(j)].begin(),
                  carried_non_ancestors_[static_cast<std::size_t>(j)].end());
        std::sort(na.begin(), na.end());
        na.erase(std::unique(na.begin(), na.end()), na.end());
        // Fresh parent evidence wins over stale non-ancestor records.
        na.erase(std::remove_if(na.begin(), na.end(),
                                [&](const TsNode& w) { return std::binary_search(pa.begin(), pa.end(), w); }),
                 na.end());
    }
}

void DiscoveryState::carry_over_knowledge() {
    for (int j = 0; j < n_vars_; ++j) {
        carried_parents_[static_cast<std::size_t>(j)] = parents_[static_cast<std::size_t>(j)];
        carried_non_ancestors_[static_cast<std::size_t>(j)] = non_ancestors_[static_cast<std::size_t>(j)];
    }
}

void DiscoveryState::restore_all_links() {
    for (Link& l : links_) {
        if (!l.bk_removed) l.present = true;
    }
    for (auto& s : sepsets_) s.reset();
    reset_soft_marks();
}

const std::vector<TsNode>& DiscoveryState::parents_of_var(int var) const {
    return parents_.at(static_cast<std::size_t>(var));
}

std::vector<TsNode> DiscoveryState::forced_parents(TsNode u, TsNode v) const {
    std::vector<TsNode> out;
    auto add_shifted = [&](const TsNode& target) {
        for (const TsNode& p : parents_[static_cast<std::size_t>(target.var)]) {
            const TsNode shifted{p.var, p.lag + target.lag};
            if (shifted.lag <= tau_max_) out.push_back(shifted);
        }
    };
    add_shifted(u);
    add_shifted(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), u), out.end());
    out.erase(std::remove(out.begin(), out.end(), v), out.end());
    return out;
}

bool DiscoveryState::known_non_ancestor(TsNode w, TsNode target) const {
    if (w.lag < target.lag) return true;  // later in time than the target
    const TsNode shifted{w.var, w.lag - target.lag};
    const auto& na = non_ancestors_[static_cast<std::size_t>(target.var)];
    return std::binary_search(na.begin(), na.end(), shifted);
}

TsGraph DiscoveryState::working_pag() const {
    std::vector<TsEdge> edges;
    for (const Link& l : links_)
        if (l.present) edges.push_back({l.a, l.b, l.ma, l.mb});
    return TsGraph(GraphKind::PAG, n_vars_, tau_max_, std::move(edges));
}

StrengthMap DiscoveryState::strengths() const {
    StrengthMap out;
    for (const Link& l : links_)
        if (l.present) out[{l.a.var, l.a.lag, l.b.var}] = l.strength;
    return out;
}

int DiscoveryState::present_count() const {
    int n = 0;
    for (const Link& l : links_)
        if (l.present) ++n;
    return n;
}

void apply_time_order(DiscoveryState& s) {
    for (int idx = 0; idx < s.link_count(); ++idx) {
        if (!s.link_present(idx)) continue;
        if (s.link_a(idx).lag > 0) s.set_time_lock(idx);
    }
}

void orient_colliders(DiscoveryState& s) {
    std::vector<DiscoveryState::MarkProposal> proposals;
    for (const TsNode& mid : window_nodes(s.n_vars(), s.tau_max())) {
        const std::vector<TsNode> nb = s.neighbors(mid);
        for (std::size_t xi = 0; xi < nb.size(); ++xi) {
            for (std::size_t zi = xi + 1; zi < nb.size(); ++zi) {
                const TsNode x = nb[xi];
                const TsNode z = nb[zi];
                if (s.adjacent(x, z)) continue;
                const auto pair = s.resolve(x, z);
                if (!pair || !s.has_sepset(pair->first)) continue;
                if (s.sepset_contains(pair->first, pair->second, mid)) continue;
                for (const TsNode& wing : {x, z}) {
                    const auto edge = s.resolve(wing, mid);
                    const bool mid_is_a =
                        TsNode{mid.var, mid.lag - edge->second} == s.link_a(edge->first);
                    proposals.push_back({edge->first, mid_is_a, Edgemark::Head});
                }
            }
        }
    }
    s.apply_mark_proposals(proposals);
}

void orientation_rules(DiscoveryState& s) {
    const std::vector<TsNode> nodes = window_nodes(s.n_vars(), s.tau_max());
    auto propose = [&](std::vector<DiscoveryState::MarkProposal>& out, TsNode at, TsNode other, Edgemark m) {
        const auto edge = s.resolve(at, other);
        const bool at_is_a = TsNode{at.var, at.lag - edge->second} == s.link_a(edge->first);
        out.push_back({edge->first, at_is_a, m});
    };

    while (true) {
        std::vector<DiscoveryState::MarkProposal> proposals;
        for (const TsNode& b : nodes) {
            const std::vector<TsNode> nb = s.neighbors(b);
            // Away from collider: a *-> b o-* c with a, c non-adjacent forces
            // b -> c (b would otherwise be a new collider).
            for (const TsNode& a : nb) {
                if (s.mark_at(b, a) != Edgemark::Head) continue;
                for (const TsNode& c : nb) {
                    if (c == a || s.adjacent(a, c)) continue;
                    if (s.mark_at(b, c) != Edgemark::Circle) continue;
                    proposals.reserve(proposals.size() + 2);
                    propose(proposals, b, c, Edgemark::Tail);
                    propose(proposals, c, b, Edgemark::Head);
                }
            }
            // Double triangle: a *-> b <-* c, d circle-adjacent to a, b, c and
            // a, c non-adjacent puts a head at b on d's edge.
            for (std::size_t ai = 0; ai < nb.size(); ++ai) {
                for (std::size_t ci = ai + 1; ci < nb.size(); ++ci) {
                    const TsNode a = nb[ai];
                    const TsNode c = nb[ci];
                    if (s.adjacent(a, c)) continue;
                    if (s.mark_at(b, a) != Edgemark::Head || s.mark_at(b, c) != Edgemark::Head) continue;
                    for (const TsNode& d : nb) {
                        if (d == a || d == c) continue;
                        if (!s.adjacent(d, a) || !s.adjacent(d, c)) continue;
                        if (s.mark_at(d, a) != Edgemark::Circle || s.mark_at(d, c) != Edgemark::Circle) continue;
                        if (s.mark_at(b, d) != Edgemark::Circle) continue;
                        propose(proposals, b, d, Edgemark::Head);
                    }
                }
            }
        }
        // Directed chain: a -> b *-> c (or a *-> b -> c) with a *-o c closes
        // the triangle as a *-> c.
        for (const TsNode& a : nodes) {
            for (const TsNode& c : s.neighbors(a)) {
                if (s.mark_at(c, a) != Edgemark::Circle) continue;
                for (const TsNode& b : s.neighbors(a)) {
                    if (b == c || !s.adjacent(b, c)) continue;
                    const bool chain1 = s.mark_at(a, b) == Edgemark::Tail &&
                                        s.mark_at(b, a) == Edgemark::Head &&
                                        s.mark_at(c, b) == Edgemark::Head;
                    const bool chain2 = s.mark_at(b, a) == Edgemark::Head &&
                                        s.mark_at(b, c) == Edgemark::Tail &&
                                        s.mark_at(c, b) == Edgemark::Head;
                    if (chain1 || chain2) {
                        propose(proposals, c, a, Edgemark::Head);
                        break;
                    }
                }
            }
        }
        if (!s.apply_mark_proposals(proposals)) break;
    }
}

namespace {

void orientation_sweep(DiscoveryState& s) {
    s.reset_soft_marks();
    apply_time_order(s);
    orient_colliders(s);
    orientation_rules(s);
    s.rebuild_knowledge();
}

using CondSet = std::vector<TsNode>;

// Tries to separate the endpoints of link `idx` with conditioning sets of
// exactly `free_size` candidates from `pools` (each unioned with `forced`).
// Returns the separating set on success. Dependent outcomes feed the link's
// strength. `max_pool` reports the largest usable pool.
std::optional<CondSet> try_separate(DiscoveryState& s, int idx, int free_size,
                                    const std::vector<std::vector<TsNode>>& pools, const CondSet& forced,
                                    const CiBackend& backend, double alpha, int* max_pool) {
    const TsNode u = s.link_a(idx);
    const TsNode v = s.link_b(idx);
    std::set<CondSet> tested;
    for (const std::vector<TsNode>& pool : pools) {
        *max_pool = std::max(*max_pool, static_cast<int>(pool.size()));
        if (static_cast<int>(pool.size()) < free_size) continue;
        std::vector<int> pick(static_cast<std::size_t>(free_size));
        for (int i = 0; i < free_size; ++i) pick[static_cast<std::size_t>(i)] = i;
        while (true) {
            CondSet cond(forced);
            for (int i : pick) cond.push_back(pool[static_cast<std::size_t>(i)]);
            std::sort(cond.begin(), cond.end());
            cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
            if (tested.insert(cond).second) {
                const CiOutcome outcome = backend.test({u, v, cond});
                if (ci_decide(outcome, alpha) == CiDecision::Independent) return cond;
                s.note_surviving_statistic(idx, std::abs(outcome.statistic));
            }
            if (free_size == 0 || !next_combination(pick, static_cast<int>(pool.size()))) break;
        }
    }
    return std::nullopt;
}

std::vector<std::vector<TsNode>> adjacency_pools(const DiscoveryState& s, int idx, const CondSet& forced) {
    const TsNode u = s.link_a(idx);
    const TsNode v = s.link_b(idx);
    std::vector<std::vector<TsNode>> pools;
    for (const auto& [self, other] : {std::pair{v, u}, std::pair{u, v}}) {
        std::vector<TsNode> pool = s.neighbors(self);
        pool.erase(std::remove(pool.begin(), pool.end(), other), pool.end());
        pool.erase(std::remove_if(pool.begin(), pool.end(),
                                  [&](const TsNode& w) {
                                      if (std::binary_search(forced.begin(), forced.end(), w)) return true;
                                      return s.known_non_ancestor(w, u) && s.known_non_ancestor(w, v);
                                  }),
                   pool.end());
        pools.push_back(std::move(pool));
    }
    return pools;
}

// Path-connected candidate pool for the confounder phase. Orientation marks
// are deliberately ignored while walking: candidate sets must stay a superset
// of the separating sets that exist, and intermediate marks are not reliable
// enough to prune with.
std::vector<TsNode> path_pool(const DiscoveryState& s, TsNode from, TsNode other, int depth_bound) {
    std::vector<TsNode> frontier{from};
    std::set<TsNode> seen{from};
    int depth = 0;
    while (!frontier.empty() && depth < depth_bound) {
        std::vector<TsNode> next;
        for (const TsNode& n : frontier) {
            for (const TsNode& w : s.neighbors(n)) {
                if (seen.insert(w).second) next.push_back(w);
            }
        }
        frontier = std::move(next);
        ++depth;
    }
    std::vector<TsNode> out(seen.begin(), seen.end());
    out.erase(std::remove(out.begin(), out.end(), from), out.end());
    out.erase(std::remove(out.begin(), out.end(), other), out.end());
    return out;
}

struct Removal {
    int idx;
    CondSet sepset;
};

// One edge-elimination sweep protocol shared by both phases: per conditioning
// size, removals are committed only at sweep boundaries, so results do not
// depend on the order links are visited in.
void elimination_sweeps(DiscoveryState& s, const CiBackend& backend, const DiscoveryConfig& cfg,
                        bool adjacency_mode, bool orient_between_sweeps) {
    int size = 0;
    while (true) {
        int max_pool = 0;
        std::vector<Removal> removals;
        for (int idx = 0; idx < s.link_count(); ++idx) {
            if (!s.link_present(idx)) continue;
            const TsNode u = s.link_a(idx);
            const TsNode v = s.link_b(idx);
            CondSet forced;
            std::vector<std::vector<TsNode>> pools;
            if (adjacency_mode) {
                forced = s.forced_parents(u, v);
                pools = adjacency_pools(s, idx, forced);
            } else {
                pools.push_back(path_pool(s, v, u, cfg.pds_path_length_max));
                pools.push_back(path_pool(s, u, v, cfg.pds_path_length_max));
            }
            auto sep = try_separate(s, idx, size, pools, forced, backend, cfg.alpha, &max_pool);
            if (sep) removals.push_back({idx, std::move(*sep)});
        }
        for (Removal& r : removals) s.remove_link(r.idx, std::move(r.sepset));
        if (orient_between_sweeps) orientation_sweep(s);
        ++size;
        if (cfg.max_cond_size != kUnlimitedCondSize && size > cfg.max_cond_size) break;
        if (size > max_pool) break;
    }
}

void validate_config(const DiscoveryConfig& cfg) {
    if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) raise(Errc::InvalidArgument, "alpha must lie in (0, 1)");
    if (cfg.tau_max < 0) raise(Errc::InvalidArgument, "tau_max must be non-negative");
    if (cfg.max_cond_size < 0) raise(Errc::InvalidArgument, "max_cond_size must be non-negative");
    if (cfg.n_preliminary_phases < 0) raise(Errc::InvalidArgument, "n_preliminary_phases must be non-negative");
    if (cfg.pds_path_length_max < 0) raise(Errc::InvalidArgument, "pds_path_length_max must be non-negative");
}

}  // namespace

void ancestral_phase(DiscoveryState& s, const CiBackend& backend, const DiscoveryConfig& cfg) {
    validate_config(cfg);
    orientation_sweep(s);
    elimination_sweeps(s, backend, cfg, /*adjacency_mode=*/true, /*orient_between_sweeps=*/true);
}

void reinitialize_keep_parents(DiscoveryState& s) {
    s.rebuild_knowledge();
    s.carry_over_knowledge();
    s.restore_all_links();
    s.rebuild_knowledge();
}

void confounder_phase(DiscoveryState& s, const CiBackend& backend, const DiscoveryConfig& cfg) {
    validate_config(cfg);
    elimination_sweeps(s, backend, cfg, /*adjacency_mode=*/false, /*orient_between_sweeps=*/false);
    orientation_sweep(s);
}

DiscoveryResult lpcmci_discover(const CiBackend& backend, const DiscoveryConfig& cfg,
                                const BackgroundKnowledge* bk) {
    validate_config(cfg);
    if (backend.max_lag() < cfg.tau_max)
        raise(Errc::InvalidArgument, "backend window smaller than requested tau_max");
    DiscoveryState s(backend.n_vars(), cfg.tau_max, bk);
    for (int phase = 0; phase < cfg.n_preliminary_phases; ++phase) {
        ancestral_phase(s, backend, cfg);
        reinitialize_keep_parents(s);
    }
    ancestral_phase(s, backend, cfg);
    confounder_phase(s, backend, cfg);
    return {s.working_pag(), s.strengths()};
}

TsGraph random_baseline(int n_vars, int tau_max, std::uint64_t seed,
                        const std::optional<std::vector<int>>& auto_vars) {
    if (n_vars <= 0) raise(Errc::InvalidArgument, "n_vars must be positive");
    if (tau_max < 0) raise(Errc::InvalidArgument, "tau_max must be non-negative");
    std::vector<char> auto_ok(static_cast<std::size_t>(n_vars), 1);
    if (auto_vars) {
        std::fill(auto_ok.begin(), auto_ok.end(), 0);
        for (int v : *auto_vars) {
            if (v < 0 || v >= n_vars) raise(Errc::InvalidArgument, "auto variable out of range");
            auto_ok[static_cast<std::size_t>(v)] = 1;
        }
    }

    static constexpr std::pair<Edgemark, Edgemark> kClasses[5] = {
        {Edgemark::Tail, Edgemark::Head},    // -->
        {Edgemark::Head, Edgemark::Tail},    // <--
        {Edgemark::Head, Edgemark::Head},    // <->
        {Edgemark::Circle, Edgemark::Head},  // o->
        {Edgemark::Head, Edgemark::Circle},  // <-o
    };

    RngStream rng(seed);
    std::vector<TsEdge> edges;
    auto consider = [&](TsNode a, TsNode b) {
        if (rng.uniform01() >= 0.5) return;
        const auto& cls = kClasses[rng.uniform_int(5)];
        edges.push_back({a, b, cls.first, cls.second});
    };
    for (int j = 0; j < n_vars; ++j)
        if (auto_ok[static_cast<std::size_t>(j)])
            for (int tau = 1; tau <= tau_max; ++tau) consider({j, tau}, {j, 0});
    for (int i = 0; i < n_vars; ++i)
        for (int j = 0; j < n_vars; ++j)
            if (i != j)
                for (int tau = 1; tau <= tau_max; ++tau) consider({i, tau}, {j, 0});
    for (int i = 0; i < n_vars; ++i)
        for (int j = i + 1; j < n_vars; ++j) consider({i, 0}, {j, 0});
    return TsGraph(GraphKind::PAG, n_vars, tau_max, std::move(edges));
}

TsGraph prune_weak_links(const TsGraph& pag, const StrengthMap& strengths, double threshold) {
    if (!(threshold >= 0.0) || !(threshold <= 1.0)) raise(Errc::InvalidArgument, "threshold must lie in [0, 1]");
    std::vector<TsEdge> kept;
    for (const TsEdge& e : pag.edges()) {
        const auto it = strengths.find({e.a.var, e.a.lag, e.b.var});
        if (it == strengths.end())
            raise(Errc::InvalidArgument, "edge without a recorded strength");
        if (it->second >= threshold) kept.push_back(e);
    }
    return TsGraph(pag.kind(), pag.n_vars(), pag.tau_max(), std::move(kept));
}

}  // namespace tscausal
