#ifndef TSCAUSAL_CORE_ORACLE_HPP
#define TSCAUSAL_CORE_ORACLE_HPP

#include <unordered_map>
#include <vector>

#include "graph.hpp"

namespace tscausal {

inline constexpr int kDefaultSeparationPadding = 10;

struct SeparationQuery {
    TsNode x;
    TsNode y;
    std::vector<TsNode> cond;
};

// Blocked-path criterion on an unrolled graph, answered by reachability
// (Bayes-ball style) rather than path enumeration.
bool d_separated(const StaticGraph& g, int x, int y, const std::vector<int>& cond);

// Separation between window nodes of a stationary DAG, evaluated on a finite
// unrolling with `padding` extra slices beyond tau_max + 1 and the query
// anchored at the latest time index. Every variable of the DAG participates
// as a path node, observed or not.
bool ts_d_separated(const TsGraph& window_dag, const SeparationQuery& q, int padding = kDefaultSeparationPadding);

// Reusable unrolling with preallocated scratch. One instance serves many
// queries on the same DAG; not safe for concurrent use.
class UnrolledDag {
public:
    UnrolledDag(const TsGraph& window_dag, int padding);

    int steps() const { return graph_.steps(); }
    int anchor_node(TsNode n) const;  // window node -> unrolled id at the latest anchor

    bool d_sep(TsNode x, TsNode y, const std::vector<TsNode>& cond) const;
    bool is_ancestor(TsNode u, TsNode v) const;  // u in an(v), both window-anchored

private:
    StaticGraph graph_;
    int tau_max_;
    // epoch-stamped scratch buffers, reused across queries
    mutable std::vector<int> stamp_anc_, stamp_cond_, stamp_up_, stamp_down_;
    mutable int epoch_ = 0;
    mutable std::vector<int> worklist_;
};

// Projects a DAG with hidden variables onto the observed subset: an edge is
// kept between two window nodes exactly when no subset of the other observed
// window nodes separates them, and its ends record ancestorship (tail) or
// non-ancestorship (head) in the unrolled DAG. Variables are relabeled to
// observed positions 0..N-1.
TsGraph latent_project(const TsGraph& dag, const std::vector<int>& observed,
                       int padding = kDefaultSeparationPadding);

// Ground-truth PAG over the observed variables: the discovery algorithm run
// against the perfect separation backend with exhaustive conditioning-set
// search plus time-order orientation. Variables are relabeled to observed
// positions 0..N-1.
TsGraph oracle_pag(const TsGraph& window_dag, const std::vector<int>& observed, int tau_max,
                   int padding = kDefaultSeparationPadding);

}  // namespace tscausal

#endif
