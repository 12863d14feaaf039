#ifndef TSCAUSAL_CORE_DISCOVERY_HPP
#define TSCAUSAL_CORE_DISCOVERY_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ci.hpp"
#include "graph.hpp"

namespace tscausal {

inline constexpr int kUnlimitedCondSize = std::numeric_limits<int>::max();

struct DiscoveryConfig {
    double alpha = 0.26;
    int tau_max = 1;
    // Cap on free conditioning candidates per test, beyond the forced
    // parents. kUnlimitedCondSize exhausts the pools (used by the oracle).
    int max_cond_size = 3;
    // Ancestral phases run before the final one; each is followed by a
    // re-initialization that keeps the identified parentships.
    int n_preliminary_phases = 1;
    // Path-length bound when collecting path-based conditioning candidates in
    // the confounder phase.
    int pds_path_length_max = kUnlimitedCondSize;
};

struct BackgroundKnowledge {
    std::vector<std::pair<TsNode, TsNode>> forbidden_adjacencies;
    struct ForcedMark {
        TsNode a;
        TsNode b;
        bool at_a = true;
        Edgemark mark = Edgemark::Tail;  // only Tail or Head may be forced
    };
    std::vector<ForcedMark> forced_marks;
};

// Canonical identity of one stationary link: later end at lag 0.
struct LinkKey {
    int var_a = 0;
    int lag_a = 0;
    int var_b = 0;
    friend auto operator<=>(const LinkKey&, const LinkKey&) = default;
};

using StrengthMap = std::map<LinkKey, double>;

struct DiscoveryResult {
    TsGraph pag;
    StrengthMap strengths;
};

// Working state of one discovery run: the complete-with-circles link universe
// over the window, recorded separating sets, accumulated parent and
// non-ancestor knowledge, and per-link strengths.
class DiscoveryState {
public:
    DiscoveryState(int n_vars, int tau_max, const BackgroundKnowledge* bk = nullptr);

    int n_vars() const { return n_vars_; }
    int tau_max() const { return tau_max_; }

    int link_count() const { return static_cast<int>(links_.size()); }
    bool link_present(int idx) const { return links_[static_cast<std::size_t>(idx)].present; }
    TsNode link_a(int idx) const { return links_[static_cast<std::size_t>(idx)].a; }
    TsNode link_b(int idx) const { return links_[static_cast<std::size_t>(idx)].b; }
    Edgemark mark_a(int idx) const { return links_[static_cast<std::size_t>(idx)].ma; }
    Edgemark mark_b(int idx) const { return links_[static_cast<std::size_t>(idx)].mb; }

    // Maps an instance pair onto its canonical link; second element is the
    // time shift. Nodes may sit beyond the window as long as the lag
    // difference fits.
    std::optional<std::pair<int, int>> resolve(TsNode u, TsNode v) const;
    bool adjacent(TsNode u, TsNode v) const;

    // Window neighbors of an instance node under stationarity.
    std::vector<TsNode> neighbors(TsNode u) const;

    // Mark at the u end of the instance edge u-v; edge must be present.
    Edgemark mark_at(TsNode u, TsNode v) const;

    void remove_link(int idx, std::vector<TsNode> sepset);
    bool has_sepset(int idx) const;
    const std::vector<TsNode>& sepset(int idx) const;
    // Membership of an instance node in the sepset of a link instance
    // shifted by `shift`.
    bool sepset_contains(int idx, int shift, TsNode m) const;

    void note_surviving_statistic(int idx, double abs_stat);

    // Orientation plumbing -------------------------------------------------
    struct MarkProposal {
        int link = -1;
        bool at_a = true;
        Edgemark mark = Edgemark::Head;  // Tail or Head
    };
    // Applies a batch of proposals: disagreements become Conflict on
    // contemporaneous ends and resolve toward Head on lagged ends, where time
    // order already pins the lag-0 side. Locked and Conflict marks never
    // change. Returns whether anything changed.
    bool apply_mark_proposals(const std::vector<MarkProposal>& batch);
    void set_time_lock(int idx);  // Head + lock at the lag-0 end

    // Clears every non-background mark back to Circle.
    void reset_soft_marks();
    // Recomputes parents / non-ancestors from current marks plus carried
    // knowledge; parents whose adjacency disappeared are dropped.
    void rebuild_knowledge();
    // Freezes current knowledge so later phases keep it (re-initialization).
    void carry_over_knowledge();
    // Restores the complete graph, keeping knowledge and strengths, clearing
    // sepsets and soft marks.
    void restore_all_links();

    const std::vector<TsNode>& parents_of_var(int var) const;
    std::vector<TsNode> forced_parents(TsNode u, TsNode v) const;
    bool known_non_ancestor(TsNode w, TsNode target) const;

    TsGraph working_pag() const;
    StrengthMap strengths() const;
    int present_count() const;

private:
    struct Link {
        TsNode a;
        TsNode b;
        bool present = true;
        bool bk_removed = false;
        Edgemark ma = Edgemark::Circle;
        Edgemark mb = Edgemark::Circle;
        bool lock_a = false;
        bool lock_b = false;
        bool bk_lock_a = false;
        bool bk_lock_b = false;
        double strength = 1.0;
    };

    int n_vars_;
    int tau_max_;
    std::vector<Link> links_;
    std::map<LinkKey, int> index_;
    std::vector<std::optional<std::vector<TsNode>>> sepsets_;
    std::vector<std::vector<TsNode>> parents_;        // per variable, targets (var, 0)
    std::vector<std::vector<TsNode>> non_ancestors_;  // per variable, targets (var, 0)
    std::vector<std::vector<TsNode>> carried_parents_;
    std::vector<std::vector<TsNode>> carried_non_ancestors_;

    void set_mark(int idx, bool at_a, Edgemark m);
};

// Orientation passes ---------------------------------------------------------

// Lag-0 ends of lagged links become heads: a later node is never an ancestor
// of an earlier one.
void apply_time_order(DiscoveryState& s);
// Unshielded triples whose middle is outside the recorded separating set
// become colliders.
void orient_colliders(DiscoveryState& s);
// Away-from-collider, directed-chain, and double-triangle completion rules,
// iterated to a fixpoint.
void orientation_rules(DiscoveryState& s);

// Phases ---------------------------------------------------------------------

void ancestral_phase(DiscoveryState& s, const CiBackend& backend, const DiscoveryConfig& cfg);
void reinitialize_keep_parents(DiscoveryState& s);
void confounder_phase(DiscoveryState& s, const CiBackend& backend, const DiscoveryConfig& cfg);

DiscoveryResult lpcmci_discover(const CiBackend& backend, const DiscoveryConfig& cfg,
                                const BackgroundKnowledge* bk = nullptr);

// Uninformed reference predictor: each candidate adjacency appears with
// probability 1/2 and draws its edge type uniformly from
// {-->, <--, <->, o->, <-o}. `auto_vars` optionally restricts which variables
// contribute auto candidates (default: all).
TsGraph random_baseline(int n_vars, int tau_max, std::uint64_t seed,
                        const std::optional<std::vector<int>>& auto_vars = std::nullopt);

TsGraph prune_weak_links(const TsGraph& pag, const StrengthMap& strengths, double threshold);

}  // namespace tscausal

#endif
