#include "graph.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace tscausal {

const char* graph_kind_name(GraphKind k) {
    switch (k) {
        case GraphKind::DAG: return "DAG";
        case GraphKind::MAG: return "MAG";
        case GraphKind::PAG: return "PAG";
    }
    return "?";
}

namespace {

char mark_char(Edgemark m, bool at_first_end) {
    switch (m) {
        case Edgemark::Tail: return '-';
        case Edgemark::Head: return at_first_end ? '<' : '>';
        case Edgemark::Circle: return 'o';
        case Edgemark::Conflict: return 'x';
    }
    return '?';
}

Edgemark mark_from_char(char c, bool at_first_end) {
    switch (c) {
        case '-': return Edgemark::Tail;
        case '<':
            if (!at_first_end) raise(Errc::ParseError, "'<' only valid at the first end");
            return Edgemark::Head;
        case '>':
            if (at_first_end) raise(Errc::ParseError, "'>' only valid at the second end");
            return Edgemark::Head;
        case 'o': return Edgemark::Circle;
        case 'x': return Edgemark::Conflict;
        default: raise(Errc::ParseError, std::string("unknown edgemark char '") + c + "'");
    }
}

const char* dot_arrow_style(Edgemark m) {
    switch (m) {
        case Edgemark::Tail: return "none";
        case Edgemark::Head: return "normal";
        case Edgemark::Circle: return "odot";
        case Edgemark::Conflict: return "box";
    }
    return "none";
}

bool mark_allowed(GraphKind kind, Edgemark m) {
    switch (kind) {
        case GraphKind::DAG:
        case GraphKind::MAG:
            return m == Edgemark::Tail || m == Edgemark::Head;
        case GraphKind::PAG:
            return true;
    }
    return false;
}

}  // namespace

StaticGraph::StaticGraph(int n_vars, int steps) : n_vars_(n_vars), steps_(steps) {
    if (n_vars <= 0 || steps <= 0) raise(Errc::InvalidArgument, "StaticGraph dimensions must be positive");
    parents_.resize(static_cast<std::size_t>(n_vars) * static_cast<std::size_t>(steps));
    children_.resize(parents_.size());
}

int StaticGraph::node_id(int var, int time) const {
    if (var < 0 || var >= n_vars_ || time < 0 || time >= steps_)
        raise(Errc::NodeNotFound, "node (" + std::to_string(var) + ", t=" + std::to_string(time) + ") outside graph");
    return time * n_vars_ + var;
}

void StaticGraph::add_edge(int from, int to) {
    if (from < 0 || to < 0 || from >= node_count() || to >= node_count())
        raise(Errc::NodeNotFound, "edge endpoint outside graph");
    children_[static_cast<std::size_t>(from)].push_back(to);
    parents_[static_cast<std::size_t>(to)].push_back(from);
}

bool StaticGraph::has_directed_cycle() const {
    std::vector<int> indegree(static_cast<std::size_t>(node_count()), 0);
    for (int v = 0; v < node_count(); ++v)
        indegree[static_cast<std::size_t>(v)] = static_cast<int>(parents_[static_cast<std::size_t>(v)].size());
    std::vector<int> queue;
    for (int v = 0; v < node_count(); ++v)
        if (indegree[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
    int seen = 0;
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        ++seen;
        for (int c : children_[static_cast<std::size_t>(v)])
            if (--indegree[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
    }
    return seen != node_count();
}

std::uint64_t TsGraph::key(int var_a, int lag_a, int var_b) {
    return (static_cast<std::uint64_t>(var_a) << 40) | (static_cast<std::uint64_t>(lag_a) << 20) |
           static_cast<std::uint64_t>(var_b);
}

TsGraph::TsGraph(GraphKind kind, int n_vars, int tau_max, std::vector<TsEdge> edges)
    : kind_(kind), n_vars_(n_vars), tau_max_(tau_max) {
    if (n_vars <= 0) raise(Errc::InvalidArgument, "n_vars must be positive");
    if (tau_max < 0) raise(Errc::InvalidArgument, "tau_max must be non-negative");
    validate_and_canonicalize(std::move(edges));
}

void TsGraph::validate_and_canonicalize(std::vector<TsEdge> edges) {
    std::vector<TsEdge> canon;
    canon.reserve(edges.size());
    for (TsEdge e : edges) {
        for (const TsNode& n : {e.a, e.b}) {
            if (n.var < 0 || n.var >= n_vars_)
                raise(Errc::NodeNotFound, "edge references variable " + std::to_string(n.var));
            if (n.lag < 0 || n.lag > tau_max_)
                raise(Errc::LagOutOfRange,
                      "edge lag " + std::to_string(n.lag) + " outside [0, " + std::to_string(tau_max_) + "]");
        }
        // Shift to the canonical window instance, later end at lag 0.
        const int shift = std::min(e.a.lag, e.b.lag);
        e.a.lag -= shift;
        e.b.lag -= shift;
        if (e.a.lag == 0 && e.b.lag > 0) {
            std::swap(e.a, e.b);
            std::swap(e.mark_at_a, e.mark_at_b);
        }
        if (e.a.var == e.b.var && e.a.lag == e.b.lag)
            raise(Errc::InvalidArgument, "self edge at lag 0 on variable " + std::to_string(e.a.var));
        if (e.a.lag == 0 && e.a.var > e.b.var) {
            std::swap(e.a, e.b);
            std::swap(e.mark_at_a, e.mark_at_b);
        }

        if (!mark_allowed(kind_, e.mark_at_a) || !mark_allowed(kind_, e.mark_at_b))
            raise(Errc::IllegalMark, std::string("mark not allowed in a ") + graph_kind_name(kind_));
        if (kind_ == GraphKind::DAG) {
            const bool directed = (e.mark_at_a == Edgemark::Tail && e.mark_at_b == Edgemark::Head) ||
                                  (e.mark_at_a == Edgemark::Head && e.mark_at_b == Edgemark::Tail);
            if (!directed) raise(Errc::IllegalMark, "DAG edges need one tail and one head");
        }
        if (kind_ != GraphKind::PAG && e.a.lag > 0) {
            // The lag-0 end is later in time and cannot be an ancestor of the
            // earlier end, so a tail there is inconsistent for DAG/MAG kinds.
            if (e.mark_at_b == Edgemark::Tail)
                raise(Errc::IllegalMark, "tail at the later end of a lagged edge");
        }
        if (kind_ == GraphKind::MAG && e.mark_at_a == Edgemark::Tail && e.mark_at_b == Edgemark::Tail)
            raise(Errc::IllegalMark, "undirected edge not representable without selection bias");
        canon.push_back(e);
    }

    std::sort(canon.begin(), canon.end(), [](const TsEdge& l, const TsEdge& r) {
        return std::tie(l.a.var, l.a.lag, l.b.var) < std::tie(r.a.var, r.a.lag, r.b.var);
    });
    for (std::size_t i = 0; i < canon.size(); ++i) {
        const auto k = key(canon[i].a.var, canon[i].a.lag, canon[i].b.var);
        if (!index_.emplace(k, i).second)
            raise(Errc::DuplicateEdge, "duplicate edge between (" + std::to_string(canon[i].a.var) + "," +
                                           std::to_string(canon[i].a.lag) + ") and (" +
                                           std::to_string(canon[i].b.var) + ",0)");
    }
    edges_ = std::move(canon);

    if (kind_ == GraphKind::DAG) {
        // Lagged edges always point forward in time, so any directed cycle
        // must live entirely in the contemporaneous slice.
        std::vector<std::vector<int>> children(static_cast<std::size_t>(n_vars_));
        std::vector<int> indeg(static_cast<std::size_t>(n_vars_), 0);
        for (const TsEdge& e : edges_) {
            if (e.a.lag != 0) continue;
            const int from = e.mark_at_a == Edgemark::Tail ? e.a.var : e.b.var;
            const int to = e.mark_at_a == Edgemark::Tail ? e.b.var : e.a.var;
            children[static_cast<std::size_t>(from)].push_back(to);
            ++indeg[static_cast<std::size_t>(to)];
        }
        std::vector<int> queue;
        for (int v = 0; v < n_vars_; ++v)
            if (indeg[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
        int seen = 0;
        while (!queue.empty()) {
            const int v = queue.back();
            queue.pop_back();
            ++seen;
            for (int c : children[static_cast<std::size_t>(v)])
                if (--indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
        }
        if (seen != n_vars_) raise(Errc::InvalidArgument, "contemporaneous edges form a directed cycle");
    }
}

std::optional<TsEdge> TsGraph::edge_between(TsNode u, TsNode v) const {
    if (u.var < 0 || u.var >= n_vars_ || v.var < 0 || v.var >= n_vars_) return std::nullopt;
    if (u.lag < 0 || v.lag < 0) return std::nullopt;
    if (u == v) return std::nullopt;
    const int delta = u.lag - v.lag;
    if (delta > 0) {
        auto it = index_.find(key(u.var, delta, v.var));
        if (it == index_.end()) return std::nullopt;
        const TsEdge& s = edges_[it->second];
        return TsEdge{u, v, s.mark_at_a, s.mark_at_b};
    }
    if (delta < 0) {
        auto it = index_.find(key(v.var, -delta, u.var));
        if (it == index_.end()) return std::nullopt;
        const TsEdge& s = edges_[it->second];
        return TsEdge{u, v, s.mark_at_b, s.mark_at_a};
    }
    if (u.var == v.var) return std::nullopt;
    const bool swapped = u.var > v.var;
    auto it = index_.find(key(std::min(u.var, v.var), 0, std::max(u.var, v.var)));
    if (it == index_.end()) return std::nullopt;
    const TsEdge& s = edges_[it->second];
    if (swapped) return TsEdge{u, v, s.mark_at_b, s.mark_at_a};
    return TsEdge{u, v, s.mark_at_a, s.mark_at_b};
}

bool TsGraph::same_skeleton(const TsGraph& other) const {
    if (n_vars_ != other.n_vars_ || edges_.size() != other.edges_.size()) return false;
    for (const TsEdge& e : edges_)
        if (!other.index_.count(key(e.a.var, e.a.lag, e.b.var))) return false;
    return true;
}

TsGraph build_graph(GraphKind kind, int n_vars, int tau_max, std::vector<TsEdge> edges) {
    return TsGraph(kind, n_vars, tau_max, std::move(edges));
}

StaticGraph unroll(const TsGraph& g, int steps) {
    if (g.kind() != GraphKind::DAG) raise(Errc::InvalidArgument, "only DAG-kind graphs unroll");
    if (steps < g.tau_max() + 1)
        raise(Errc::HorizonTooShort,
              "need at least " + std::to_string(g.tau_max() + 1) + " steps, got " + std::to_string(steps));
    StaticGraph out(g.n_vars(), steps);
    for (const TsEdge& e : g.edges()) {
        const int tau = e.a.lag;
        const bool a_is_cause = e.mark_at_a == Edgemark::Tail;
        for (int t = tau; t < steps; ++t) {
            const int a_id = out.node_id(e.a.var, t - tau);
            const int b_id = out.node_id(e.b.var, t);
            if (a_is_cause)
                out.add_edge(a_id, b_id);
            else
                out.add_edge(b_id, a_id);
        }
    }
    return out;
}

std::string to_dot(const TsGraph& g) {
    std::ostringstream out;
    out << "digraph tsgraph {\n";
    out << "  rankdir=LR;\n";
    for (int v = 0; v < g.n_vars(); ++v) out << "  v" << v << " [label=\"V" << v << "\"];\n";
    for (const TsEdge& e : g.edges()) {
        out << "  v" << e.a.var << " -> v" << e.b.var << " [dir=both arrowtail=" << dot_arrow_style(e.mark_at_a)
            << " arrowhead=" << dot_arrow_style(e.mark_at_b);
        if (e.a.lag > 0) out << " label=\"" << e.a.lag << "\"";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_text(const TsGraph& g) {
    std::ostringstream out;
    out << "tsgraph v1 kind=" << graph_kind_name(g.kind()) << " n=" << g.n_vars() << " taumax=" << g.tau_max()
        << "\n";
    for (const TsEdge& e : g.edges()) {
        out << e.a.var << ' ' << e.a.lag << ' ' << mark_char(e.mark_at_a, true) << ' ' << e.b.var << ' ' << e.b.lag
            << ' ' << mark_char(e.mark_at_b, false) << "\n";
    }
    return out.str();
}

TsGraph graph_from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) raise(Errc::ParseError, "empty graph file");

    std::istringstream header(line);
    std::string magic, version, kind_field, n_field, tau_field;
    header >> magic >> version >> kind_field >> n_field >> tau_field;
    if (magic != "tsgraph" || version != "v1") raise(Errc::ParseError, "not a tsgraph v1 file");
    auto field_value = [](const std::string& field, std::string_view name) -> std::string {
        const auto prefix = std::string(name) + "=";
        if (field.rfind(prefix, 0) != 0) raise(Errc::ParseError, "expected " + prefix + "... in header");
        return field.substr(prefix.size());
    };
    const std::string kind_str = field_value(kind_field, "kind");
    GraphKind kind;
    if (kind_str == "DAG")
        kind = GraphKind::DAG;
    else if (kind_str == "MAG")
        kind = GraphKind::MAG;
    else if (kind_str == "PAG")
        kind = GraphKind::PAG;
    else
        raise(Errc::ParseError, "unknown graph kind '" + kind_str + "'");
    int n_vars = 0;
    int tau_max = 0;
    try {
        n_vars = std::stoi(field_value(n_field, "n"));
        tau_max = std::stoi(field_value(tau_field, "taumax"));
    } catch (const std::exception&) {
        raise(Errc::ParseError, "bad header numbers");
    }

    std::vector<TsEdge> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream es(line);
        TsEdge e;
        std::string ma, mb;
        if (!(es >> e.a.var >> e.a.lag >> ma >> e.b.var >> e.b.lag >> mb) || ma.size() != 1 || mb.size() != 1)
            raise(Errc::ParseError, "bad edge line: " + line);
        e.mark_at_a = mark_from_char(ma[0], true);
        e.mark_at_b = mark_from_char(mb[0], false);
        edges.push_back(e);
    }
    return TsGraph(kind, n_vars, tau_max, std::move(edges));
}

}  // namespace tscausal
