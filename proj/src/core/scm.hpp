#ifndef TSCAUSAL_CORE_SCM_HPP
#define TSCAUSAL_CORE_SCM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graph.hpp"

namespace tscausal {

struct CrossLink {
    int cause = 0;
    int effect = 0;
    int lag = 0;  // 0 or 1 from the default generator
    double coeff = 0.0;
    friend bool operator==(const CrossLink&, const CrossLink&) = default;
};

// Full parameterization of one linear data-generating process: per-variable
// autoregressive coefficients, signed cross-dependencies at lag 0 or 1,
// Gaussian noise scales, and the subset of variables hidden from the
// discovery side.
struct ScmSpec {
    int n_vars_total = 0;
    std::vector<double> auto_coeffs;
    std::vector<CrossLink> cross_links;
    std::vector<double> noise_scales;  // standard deviations
    std::vector<int> latent_set;       // sorted, distinct
    int p_ts = 1;
    friend bool operator==(const ScmSpec&, const ScmSpec&) = default;
};

struct GenConfig {
    int n_vars_total = 11;
    int cross_link_count = 11;
    int latent_count = 3;
    double contemporaneous_fraction = 0.6;
    double auto_min = 0.3;
    double auto_max = 0.6;
    double cross_min = 0.2;
    double cross_max = 0.5;
    double noise_min = 0.5;
    double noise_max = 2.0;
    // The noise parameter range is read as a standard deviation by default;
    // set this to draw variances instead.
    bool noise_as_variance = false;
    int max_redraws = 100;
    std::optional<std::vector<int>> fixed_latent_set;
};

struct TimeSeriesDataset {
    std::vector<double> values;  // row-major, t_len x n_vars
    int t_len = 0;
    int n_vars = 0;
    std::vector<std::string> var_names;

    double at(int t, int var) const { return values[static_cast<std::size_t>(t) * n_vars + var]; }
};

struct ObservedDataset {
    std::vector<double> values;  // row-major, t_len x n_observed
    int t_len = 0;
    int n_observed = 0;
    std::vector<std::string> var_names;
    std::vector<int> observed_index_map;  // observed column -> original variable index

    double at(int t, int var) const { return values[static_cast<std::size_t>(t) * n_observed + var]; }
};

// Draws specs until one has a stable linear dynamics matrix (spectral radius
// of the reduced-form companion matrix < 1), up to cfg.max_redraws attempts.
ScmSpec sample_scm(const GenConfig& cfg, std::uint64_t seed);

bool is_stationary(const ScmSpec& spec);

// Simulates t_len steps after a discarded burn-in. Throws Diverged if any
// value exceeds the divergence bound.
TimeSeriesDataset simulate(const ScmSpec& spec, int t_len, std::uint64_t seed);

ObservedDataset observe(const TimeSeriesDataset& data, const std::vector<int>& latent_set);

// DAG view of the spec's structural links over a window of at least p_ts.
TsGraph true_window_dag(const ScmSpec& spec, int tau_max);

std::string scm_to_json(const ScmSpec& spec, std::optional<std::uint64_t> seed = std::nullopt);
ScmSpec scm_from_json(const std::string& text);

std::string dataset_to_csv(const ObservedDataset& data);
ObservedDataset dataset_from_csv(const std::string& text);

}  // namespace tscausal

#endif
