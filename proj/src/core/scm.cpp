#include "scm.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "rng.hpp"

namespace tscausal {

namespace {

constexpr int kBurnInSteps = 200;
constexpr double kDivergenceBound = 1e6;

void validate_spec(const ScmSpec& spec) {
    const int n = spec.n_vars_total;
    if (n <= 0) raise(Errc::InvalidArgument, "spec has no variables");
    if (static_cast<int>(spec.auto_coeffs.size()) != n || static_cast<int>(spec.noise_scales.size()) != n)
        raise(Errc::InvalidArgument, "coefficient vectors must have one entry per variable");
    if (spec.p_ts < 1) raise(Errc::InvalidArgument, "p_ts must be at least 1");
    for (const CrossLink& l : spec.cross_links) {
        if (l.cause < 0 || l.cause >= n || l.effect < 0 || l.effect >= n)
            raise(Errc::InvalidArgument, "cross link references unknown variable");
        if (l.cause == l.effect) raise(Errc::InvalidArgument, "cross link needs distinct variables");
        if (l.lag < 0 || l.lag > spec.p_ts) raise(Errc::LagOutOfRange, "cross link lag outside [0, p_ts]");
    }
    for (int v : spec.latent_set)
        if (v < 0 || v >= n) raise(Errc::BadLatentIndex, "latent index " + std::to_string(v));
    for (double s : spec.noise_scales)
        if (!(s > 0.0)) raise(Errc::InvalidArgument, "noise scales must be positive");
}

// Topological order of the contemporaneous links (Kahn, smallest index
// first). Raises if they form a cycle.
std::vector<int> contemporaneous_order(const ScmSpec& spec) {
    const int n = spec.n_vars_total;
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (const CrossLink& l : spec.cross_links) {
        if (l.lag != 0) continue;
        children[static_cast<std::size_t>(l.cause)].push_back(l.effect);
        ++indeg[static_cast<std::size_t>(l.effect)];
    }
    std::vector<int> order;
    std::vector<int> ready;
    for (int v = n - 1; v >= 0; --v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    while (!ready.empty()) {
        std::sort(ready.begin(), ready.end(), std::greater<>());
        const int v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (int c : children[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    if (static_cast<int>(order.size()) != n)
        raise(Errc::InvalidArgument, "contemporaneous links form a directed cycle");
    return order;
}

ScmSpec draw_spec(const GenConfig& cfg, RngStream& rng) {
    const int n = cfg.n_vars_total;
    ScmSpec spec;
    spec.n_vars_total = n;
    spec.p_ts = 1;
    spec.auto_coeffs.resize(static_cast<std::size_t>(n));
    spec.noise_scales.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        spec.auto_coeffs[static_cast<std::size_t>(j)] = rng.uniform(cfg.auto_min, cfg.auto_max);
    for (int j = 0; j < n; ++j) {
        const double raw = rng.uniform(cfg.noise_min, cfg.noise_max);
        spec.noise_scales[static_cast<std::size_t>(j)] = cfg.noise_as_variance ? std::sqrt(raw) : raw;
    }

    // Order used to keep contemporaneous links acyclic.
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j;
    rng.shuffle(perm);
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) rank[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = pos;

    // Distinct unordered variable pairs, one link each.
    const int total_pairs = n * (n - 1) / 2;
    if (cfg.cross_link_count > total_pairs)
        raise(Errc::InvalidArgument, "more cross links requested than variable pairs");
    const std::vector<int> chosen = rng.sample_without_replacement(total_pairs, cfg.cross_link_count);
    for (int flat : chosen) {
        int i = 0;
        int rest = flat;
        while (rest >= n - 1 - i) {
            rest -= n - 1 - i;
            ++i;
        }
        const int j = i + 1 + rest;
        CrossLink link;
        link.lag = rng.uniform01() < cfg.contemporaneous_fraction ? 0 : 1;
        if (link.lag == 0) {
            const bool i_first = rank[static_cast<std::size_t>(i)] < rank[static_cast<std::size_t>(j)];
            link.cause = i_first ? i : j;
            link.effect = i_first ? j : i;
        } else {
            const bool i_causes = rng.uniform01() < 0.5;
            link.cause = i_causes ? i : j;
            link.effect = i_causes ? j : i;
        }
        link.coeff = rng.sign() * rng.uniform(cfg.cross_min, cfg.cross_max);
        spec.cross_links.push_back(link);
    }

    if (cfg.fixed_latent_set) {
        spec.latent_set = *cfg.fixed_latent_set;
    } else {
        if (cfg.latent_count >= n) raise(Errc::InvalidArgument, "latent_count must leave observed variables");
        spec.latent_set = rng.sample_without_replacement(n, cfg.latent_count);
    }
    std::sort(spec.latent_set.begin(), spec.latent_set.end());
    validate_spec(spec);
    return spec;
}

}  // namespace

bool is_stationary(const ScmSpec& spec) {
    validate_spec(spec);
    const std::vector<int> order = contemporaneous_order(spec);  // also rejects cycles
    (void)order;
    const int n = spec.n_vars_total;
    const int p = spec.p_ts;

    Eigen::MatrixXd b0 = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::MatrixXd> lagged(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(n, n));
    for (int j = 0; j < n; ++j) lagged[0](j, j) = spec.auto_coeffs[static_cast<std::size_t>(j)];
    for (const CrossLink& l : spec.cross_links) {
        if (l.lag == 0)
            b0(l.effect, l.cause) += l.coeff;
        else
            lagged[static_cast<std::size_t>(l.lag - 1)](l.effect, l.cause) += l.coeff;
    }

    // Reduced form: solve the contemporaneous system, then check the
    // companion matrix of the resulting VAR(p).
    const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(n, n) - b0).partialPivLu().solve(
        Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n * p, n * p);
    for (int tau = 1; tau <= p; ++tau)
        companion.block(0, (tau - 1) * n, n, n) = inv * lagged[static_cast<std::size_t>(tau - 1)];
    for (int tau = 1; tau < p; ++tau)
        companion.block(tau * n, (tau - 1) * n, n, n) = Eigen::MatrixXd::Identity(n, n);

    const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
    double radius = 0.0;
    for (int i = 0; i < eigs.size(); ++i) radius = std::max(radius, std::abs(eigs[i]));
    return radius < 1.0;
}

ScmSpec sample_scm(const GenConfig& cfg, std::uint64_t seed) {
    if (cfg.n_vars_total <= 0) raise(Errc::InvalidArgument, "n_vars_total must be positive");
    if (cfg.fixed_latent_set) {
        for (int v : *cfg.fixed_latent_set)
            if (v < 0 || v >= cfg.n_vars_total) raise(Errc::BadLatentIndex, "fixed latent index out of range");
    }
    RngStream rng(seed);
    for (int attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
        ScmSpec spec = draw_spec(cfg, rng);
        if (is_stationary(spec)) return spec;
    }
    raise(Errc::RetriesExhausted,
          "no stationary spec within " + std::to_string(cfg.max_redraws) + " redraws");
}

TimeSeriesDataset simulate(const ScmSpec& spec, int t_len, std::uint64_t seed) {
    validate_spec(spec);
    if (t_len < 1) raise(Errc::InvalidArgument, "t_len must be at least 1");
    const int n = spec.n_vars_total;
    const std::vector<int> order = contemporaneous_order(spec);

    // Incoming links per effect, split by lag.
    std::vector<std::vector<CrossLink>> incoming(static_cast<std::size_t>(n));
    for (const CrossLink& l : spec.cross_links) incoming[static_cast<std::size_t>(l.effect)].push_back(l);

    TimeSeriesDataset out;
    out.t_len = t_len;
    out.n_vars = n;
    out.values.resize(static_cast<std::size_t>(t_len) * static_cast<std::size_t>(n));
    out.var_names.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out.var_names.push_back("V" + std::to_string(j));

    RngStream rng(seed);
    std::vector<std::vector<double>> history(static_cast<std::size_t>(spec.p_ts),
                                             std::vector<double>(static_cast<std::size_t>(n), 0.0));
    std::vector<double> current(static_cast<std::size_t>(n), 0.0);
    std::vector<double> noise(static_cast<std::size_t>(n), 0.0);

    const int total = kBurnInSteps + t_len;
    for (int t = 0; t < total; ++t) {
        // Noise drawn in variable order before evaluation, so the stream does
        // not depend on the contemporaneous topological order.
        for (int j = 0; j < n; ++j)
            noise[static_cast<std::size_t>(j)] = rng.normal() * spec.noise_scales[static_cast<std::size_t>(j)];
        for (int j : order) {
            double v = spec.auto_coeffs[static_cast<std::size_t>(j)] * history[0][static_cast<std::size_t>(j)] +
                       noise[static_cast<std::size_t>(j)];
            for (const CrossLink& l : incoming[static_cast<std::size_t>(j)]) {
                const double x = l.lag == 0 ? current[static_cast<std::size_t>(l.cause)]
                                            : history[static_cast<std::size_t>(l.lag - 1)][static_cast<std::size_t>(l.cause)];
                v += l.coeff * x;
            }
            if (!(std::abs(v) <= kDivergenceBound))
                raise(Errc::Diverged, "simulation exceeded divergence bound at step " + std::to_string(t));
            current[static_cast<std::size_t>(j)] = v;
        }
        if (t >= kBurnInSteps) {
            const int row = t - kBurnInSteps;
            for (int j = 0; j < n; ++j)
                out.values[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
                    current[static_cast<std::size_t>(j)];
        }
        for (int tau = spec.p_ts - 1; tau >= 1; --tau) history[static_cast<std::size_t>(tau)] = history[static_cast<std::size_t>(tau - 1)];
        history[0] = current;
    }
    return out;
}

ObservedDataset observe(const TimeSeriesDataset& data, const std::vector<int>& latent_set) {
    std::vector<int> latent(latent_set);
    std::sort(latent.begin(), latent.end());
    latent.erase(std::unique(latent.begin(), latent.end()), latent.end());
    for (int v : latent)
        if (v < 0 || v >= data.n_vars) raise(Errc::BadLatentIndex, "latent index " + std::to_string(v));

    ObservedDataset out;
    out.t_len = data.t_len;
    for (int j = 0; j < data.n_vars; ++j) {
        if (std::binary_search(latent.begin(), latent.end(), j)) continue;
        out.observed_index_map.push_back(j);
        out.var_names.push_back(data.var_names.empty() ? "V" + std::to_string(j)
                                                       : data.var_names[static_cast<std::size_t>(j)]);
    }
    out.n_observed = static_cast<int>(out.observed_index_map.size());
    if (out.n_observed == 0) raise(Errc::InvalidArgument, "all variables latent");
    out.values.resize(static_cast<std::size_t>(out.t_len) * static_cast<std::size_t>(out.n_observed));
    for (int t = 0; t < out.t_len; ++t)
        for (int c = 0; c < out.n_observed; ++c)
            out.values[static_cast<std::size_t>(t) * static_cast<std::size_t>(out.n_observed) + static_cast<std::size_t>(c)] =
                data.at(t, out.observed_index_map[static_cast<std::size_t>(c)]);
    return out;
}

TsGraph true_window_dag(const ScmSpec& spec, int tau_max) {
    validate_spec(spec);
    if (tau_max < spec.p_ts)
        raise(Errc::LagOutOfRange, "window must cover the structural lag p_ts=" + std::to_string(spec.p_ts));
    std::vector<TsEdge> edges;
    for (int j = 0; j < spec.n_vars_total; ++j) {
        if (spec.auto_coeffs[static_cast<std::size_t>(j)] == 0.0) continue;
        edges.push_back({{j, 1}, {j, 0}, Edgemark::Tail, Edgemark::Head});
    }
    for (const CrossLink& l : spec.cross_links)
        edges.push_back({{l.cause, l.lag}, {l.effect, 0}, Edgemark::Tail, Edgemark::Head});
    return TsGraph(GraphKind::DAG, spec.n_vars_total, tau_max, std::move(edges));
}

std::string scm_to_json(const ScmSpec& spec, std::optional<std::uint64_t> seed) {
    nlohmann::json j;
    j["n_vars_total"] = spec.n_vars_total;
    j["p_ts"] = spec.p_ts;
    j["auto_coeffs"] = spec.auto_coeffs;
    j["noise_scales"] = spec.noise_scales;
    j["latent_set"] = spec.latent_set;
    j["cross_links"] = nlohmann::json::array();
    for (const CrossLink& l : spec.cross_links)
        j["cross_links"].push_back({{"cause", l.cause}, {"effect", l.effect}, {"lag", l.lag}, {"coeff", l.coeff}});
    if (seed) j["seed"] = *seed;
    return j.dump(2) + "\n";
}

ScmSpec scm_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad spec JSON: ") + e.what());
    }
    ScmSpec spec;
    try {
        spec.n_vars_total = j.at("n_vars_total").get<int>();
        spec.p_ts = j.value("p_ts", 1);
        spec.auto_coeffs = j.at("auto_coeffs").get<std::vector<double>>();
        spec.noise_scales = j.at("noise_scales").get<std::vector<double>>();
        spec.latent_set = j.value("latent_set", std::vector<int>{});
        for (const auto& l : j.at("cross_links")) {
            spec.cross_links.push_back({l.at("cause").get<int>(), l.at("effect").get<int>(), l.at("lag").get<int>(),
                                        l.at("coeff").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad spec JSON: ") + e.what());
    }
    std::sort(spec.latent_set.begin(), spec.latent_set.end());
    validate_spec(spec);
    return spec;
}

std::string dataset_to_csv(const ObservedDataset& data) {
    std::ostringstream out;
    for (int c = 0; c < data.n_observed; ++c) {
        if (c) out << ',';
        out << data.var_names[static_cast<std::size_t>(c)];
    }
    out << '\n';
    char buf[40];
    for (int t = 0; t < data.t_len; ++t) {
        for (int c = 0; c < data.n_observed; ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", data.at(t, c));
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

ObservedDataset dataset_from_csv(const std::string& text) {
    ObservedDataset out;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) raise(Errc::ParseError, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream hdr(line);
    std::string cell;
    while (std::getline(hdr, cell, ',')) out.var_names.push_back(cell);
    out.n_observed = static_cast<int>(out.var_names.size());
    if (out.n_observed == 0) raise(Errc::ParseError, "CSV has no columns");
    for (int c = 0; c < out.n_observed; ++c) out.observed_index_map.push_back(c);

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        int c = 0;
        while (std::getline(row, cell, ',')) {
            try {
                out.values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                raise(Errc::ParseError, "bad CSV number '" + cell + "'");
            }
            ++c;
        }
        if (c != out.n_observed) raise(Errc::ParseError, "CSV row width mismatch");
        ++out.t_len;
    }
    if (out.t_len == 0) raise(Errc::ParseError, "CSV has no data rows");
    return out;
}

}  // namespace tscausal
