#ifndef TSCAUSAL_CORE_GRAPH_HPP
#define TSCAUSAL_CORE_GRAPH_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"

namespace tscausal {

// Mark at one end of an edge. Tail at X on X-Y claims X is an ancestor of Y,
// Head claims it is not, Circle leaves it open. Conflict records that
// orientation rules disagreed; it only occurs in predicted PAGs.
enum class Edgemark : std::uint8_t { Tail, Head, Circle, Conflict };

enum class GraphKind : std::uint8_t { DAG, MAG, PAG };

const char* graph_kind_name(GraphKind k);

// A variable at a time lag. lag 0 is the present (latest) slice.
struct TsNode {
    int var = 0;
    int lag = 0;
    friend auto operator<=>(const TsNode&, const TsNode&) = default;
};

struct TsEdge {
    TsNode a;
    TsNode b;
    Edgemark mark_at_a = Edgemark::Circle;
    Edgemark mark_at_b = Edgemark::Circle;
    friend bool operator==(const TsEdge&, const TsEdge&) = default;
};

// Finite unrolling of a window graph: one node per (variable, absolute time),
// directed edges only. Used for separation and ancestor queries.
class StaticGraph {
public:
    StaticGraph(int n_vars, int steps);

    int n_vars() const { return n_vars_; }
    int steps() const { return steps_; }
    int node_count() const { return n_vars_ * steps_; }
    int node_id(int var, int time) const;

    void add_edge(int from, int to);
    const std::vector<int>& parents(int node) const { return parents_.at(static_cast<std::size_t>(node)); }
    const std::vector<int>& children(int node) const { return children_.at(static_cast<std::size_t>(node)); }

    bool has_directed_cycle() const;

private:
    int n_vars_;
    int steps_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

// Lag-windowed graph under causal stationarity: every edge is stored once in
// canonical form (the later end at lag 0; contemporaneous ends ordered by
// variable) and implicitly repeats at every time shift. Immutable after
// construction.
class TsGraph {
public:
    TsGraph(GraphKind kind, int n_vars, int tau_max, std::vector<TsEdge> edges = {});

    GraphKind kind() const { return kind_; }
    int n_vars() const { return n_vars_; }
    int tau_max() const { return tau_max_; }
    const std::vector<TsEdge>& edges() const { return edges_; }

    // Stationarity-aware lookup: returns the stored edge aligned to (u, v)
    // if some time shift matches, with marks presented in query order.
    // Lags beyond tau_max are legal here; only the lag difference matters.
    std::optional<TsEdge> edge_between(TsNode u, TsNode v) const;
    bool adjacent(TsNode u, TsNode v) const { return edge_between(u, v).has_value(); }

    bool same_skeleton(const TsGraph& other) const;

    friend bool operator==(const TsGraph&, const TsGraph&) = default;

private:
    GraphKind kind_;
    int n_vars_;
    int tau_max_;
    std::vector<TsEdge> edges_;                      // canonical, sorted
    std::unordered_map<std::uint64_t, std::size_t> index_;  // key -> edge position

    static std::uint64_t key(int var_a, int lag_a, int var_b);
    void validate_and_canonicalize(std::vector<TsEdge> edges);
};

TsGraph build_graph(GraphKind kind, int n_vars, int tau_max, std::vector<TsEdge> edges);

// Replicates every stored edge at every time shift inside [0, steps).
// Requires a DAG-kind graph and steps >= tau_max + 1.
StaticGraph unroll(const TsGraph& g, int steps);

// Summary-graph DOT rendering: one node per variable, arrow ends encode the
// edgemarks (tail=none, head=normal, circle=odot, conflict=box), nonzero lags
// appear as integer edge labels. Output is byte-stable.
std::string to_dot(const TsGraph& g);

// Line-oriented text serialization.
std::string to_text(const TsGraph& g);
TsGraph graph_from_text(std::string_view text);

}  // namespace tscausal

#endif
