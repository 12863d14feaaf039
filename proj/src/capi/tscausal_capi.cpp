#include "tscausal/tscausal.h"

#include <cstring>
#include <string>

#include "core/bench.hpp"
#include "core/ci.hpp"
#include "core/discovery.hpp"
#include "core/eval.hpp"
#include "core/oracle.hpp"
#include "core/scm.hpp"
#include "json.hpp"

using namespace tscausal;

// Handle definitions. The public names are opaque; each wraps one core value.
struct tsc_scm {
    ScmSpec spec;
};
struct tsc_dataset {
    ObservedDataset data;
};
struct tsc_graph {
    TsGraph graph;
    explicit tsc_graph(TsGraph g) : graph(std::move(g)) {}
};
struct tsc_report {
    EvalReport report;
};

namespace {

thread_local std::string g_last_error;

tsc_status status_of(Errc code) {
    switch (code) {
        case Errc::InvalidArgument: return TSC_ERROR_INVALID_ARGUMENT;
        case Errc::IllegalMark: return TSC_ERROR_ILLEGAL_MARK;
        case Errc::DuplicateEdge: return TSC_ERROR_DUPLICATE_EDGE;
        case Errc::LagOutOfRange: return TSC_ERROR_LAG_OUT_OF_RANGE;
        case Errc::HorizonTooShort: return TSC_ERROR_HORIZON_TOO_SHORT;
        case Errc::NodeNotFound: return TSC_ERROR_NODE_NOT_FOUND;
        case Errc::RetriesExhausted: return TSC_ERROR_RETRIES_EXHAUSTED;
        case Errc::Diverged: return TSC_ERROR_DIVERGED;
        case Errc::BadLatentIndex: return TSC_ERROR_BAD_LATENT_INDEX;
        case Errc::InsufficientSamples: return TSC_ERROR_INSUFFICIENT_SAMPLES;
        case Errc::SingularRegression: return TSC_ERROR_SINGULAR_REGRESSION;
        case Errc::ShapeMismatch: return TSC_ERROR_SHAPE_MISMATCH;
        case Errc::EmptyInput: return TSC_ERROR_EMPTY_INPUT;
        case Errc::UnknownFixture: return TSC_ERROR_UNKNOWN_FIXTURE;
        case Errc::ParseError: return TSC_ERROR_PARSE;
        case Errc::IoError: return TSC_ERROR_IO;
    }
    return TSC_ERROR_UNKNOWN;
}

template <typename Fn>
tsc_status guarded(Fn&& fn) {
    try {
        fn();
        return TSC_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TSC_ERROR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown failure";
        return TSC_ERROR_UNKNOWN;
    }
}

tsc_status fail_argument(const char* msg) {
    g_last_error = msg;
    return TSC_ERROR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

BenchConfig parse_config(const char* config_json) {
    if (!config_json || !*config_json) return BenchConfig{};
    return bench_config_from_json(config_json);
}

DiscoveryConfig parse_options(const char* options_json, double* prune_below) {
    DiscoveryConfig cfg;
    *prune_below = 0.0;
    if (!options_json || !*options_json) return cfg;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(options_json);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad options JSON: ") + e.what());
    }
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.tau_max = j.value("tau_max", cfg.tau_max);
    cfg.max_cond_size = j.value("max_cond_size", cfg.max_cond_size);
    cfg.n_preliminary_phases = j.value("n_preliminary_phases", cfg.n_preliminary_phases);
    cfg.pds_path_length_max = j.value("pds_path_length_max", cfg.pds_path_length_max);
    *prune_below = j.value("prune_below", 0.0);
    return cfg;
}

TsNode parse_node(const nlohmann::json& j) {
    return TsNode{j.at("var").get<int>(), j.at("lag").get<int>()};
}

BackgroundKnowledge parse_background(const char* background_json) {
    BackgroundKnowledge bk;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(background_json);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad background JSON: ") + e.what());
    }
    try {
        for (const auto& entry : j.value("forbidden_adjacencies", nlohmann::json::array()))
            bk.forbidden_adjacencies.emplace_back(parse_node(entry.at("a")), parse_node(entry.at("b")));
        for (const auto& entry : j.value("forced_marks", nlohmann::json::array())) {
            BackgroundKnowledge::ForcedMark fm;
            fm.a = parse_node(entry.at("a"));
            fm.b = parse_node(entry.at("b"));
            fm.at_a = entry.value("at", "a") == std::string("a");
            const std::string mark = entry.value("mark", "tail");
            if (mark == "tail")
                fm.mark = Edgemark::Tail;
            else if (mark == "head")
                fm.mark = Edgemark::Head;
            else
                raise(Errc::IllegalMark, "background marks must be 'tail' or 'head'");
            bk.forced_marks.push_back(fm);
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad background JSON: ") + e.what());
    }
    return bk;
}

StrengthMap parse_strengths(const char* strengths_json) {
    StrengthMap out;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(strengths_json);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad strengths JSON: ") + e.what());
    }
    try {
        for (const auto& entry : j.at("strengths"))
            out[{entry.at("var_a").get<int>(), entry.at("lag_a").get<int>(), entry.at("var_b").get<int>()}] =
                entry.at("strength").get<double>();
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad strengths JSON: ") + e.what());
    }
    return out;
}

std::string strengths_json_of(const StrengthMap& strengths) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [key, value] : strengths)
        arr.push_back({{"var_a", key.var_a}, {"lag_a", key.lag_a}, {"var_b", key.var_b}, {"lag_b", 0},
                       {"strength", value}});
    return nlohmann::json{{"strengths", arr}}.dump(2) + "\n";
}

}  // namespace

extern "C" {

const char* tsc_version(void) { return kToolVersion; }

const char* tsc_last_error(void) { return g_last_error.c_str(); }

void tsc_string_free(char* s) { std::free(s); }

tsc_status tsc_scm_sample(const char* config_json, uint64_t seed, tsc_scm** out) {
    if (!out) return fail_argument("out is NULL");
    return guarded([&] {
        const BenchConfig cfg = parse_config(config_json);
        *out = new tsc_scm{sample_scm(cfg.gen, seed)};
    });
}

tsc_status tsc_scm_from_json(const char* json, tsc_scm** out) {
    if (!json || !out) return fail_argument("json/out is NULL");
    return guarded([&] { *out = new tsc_scm{scm_from_json(json)}; });
}

tsc_status tsc_scm_to_json(const tsc_scm* scm, char** out_json) {
    if (!scm || !out_json) return fail_argument("scm/out_json is NULL");
    return guarded([&] { *out_json = dup_string(scm_to_json(scm->spec)); });
}

tsc_status tsc_scm_is_stationary(const tsc_scm* scm, int* out_flag) {
    if (!scm || !out_flag) return fail_argument("scm/out_flag is NULL");
    return guarded([&] { *out_flag = is_stationary(scm->spec) ? 1 : 0; });
}

tsc_status tsc_scm_true_dag(const tsc_scm* scm, int tau_max, tsc_graph** out) {
    if (!scm || !out) return fail_argument("scm/out is NULL");
    return guarded([&] { *out = new tsc_graph(true_window_dag(scm->spec, tau_max)); });
}

tsc_status tsc_scm_oracle_pag(const tsc_scm* scm, int tau_max, int padding, tsc_graph** out) {
    if (!scm || !out) return fail_argument("scm/out is NULL");
    return guarded([&] {
        const TsGraph truth = true_window_dag(scm->spec, tau_max);
        *out = new tsc_graph(oracle_pag(truth, observed_variables(scm->spec), tau_max, padding));
    });
}

void tsc_scm_free(tsc_scm* scm) { delete scm; }

tsc_status tsc_scm_simulate(const tsc_scm* scm, int t_len, uint64_t seed, tsc_dataset** out) {
    if (!scm || !out) return fail_argument("scm/out is NULL");
    return guarded([&] {
        const TimeSeriesDataset full = simulate(scm->spec, t_len, seed);
        *out = new tsc_dataset{observe(full, {})};
    });
}

tsc_status tsc_scm_observe(const tsc_scm* scm, const tsc_dataset* full, tsc_dataset** out) {
    if (!scm || !full || !out) return fail_argument("scm/full/out is NULL");
    return guarded([&] {
        TimeSeriesDataset data;
        data.values = full->data.values;
        data.t_len = full->data.t_len;
        data.n_vars = full->data.n_observed;
        data.var_names = full->data.var_names;
        *out = new tsc_dataset{observe(data, scm->spec.latent_set)};
    });
}

tsc_status tsc_dataset_from_csv(const char* csv_text, tsc_dataset** out) {
    if (!csv_text || !out) return fail_argument("csv_text/out is NULL");
    return guarded([&] { *out = new tsc_dataset{dataset_from_csv(csv_text)}; });
}

tsc_status tsc_dataset_to_csv(const tsc_dataset* ds, char** out_csv) {
    if (!ds || !out_csv) return fail_argument("ds/out_csv is NULL");
    return guarded([&] { *out_csv = dup_string(dataset_to_csv(ds->data)); });
}

tsc_status tsc_dataset_dims(const tsc_dataset* ds, int* out_t_len, int* out_n_vars) {
    if (!ds || !out_t_len || !out_n_vars) return fail_argument("ds/out pointers are NULL");
    *out_t_len = ds->data.t_len;
    *out_n_vars = ds->data.n_observed;
    return TSC_OK;
}

tsc_status tsc_dataset_mask(const tsc_dataset* ds, const int* latent, int n_latent, tsc_dataset** out) {
    if (!ds || !out || (n_latent > 0 && !latent)) return fail_argument("ds/latent/out is NULL");
    return guarded([&] {
        TimeSeriesDataset data;
        data.values = ds->data.values;
        data.t_len = ds->data.t_len;
        data.n_vars = ds->data.n_observed;
        data.var_names = ds->data.var_names;
        *out = new tsc_dataset{observe(data, std::vector<int>(latent, latent + n_latent))};
    });
}

void tsc_dataset_free(tsc_dataset* ds) { delete ds; }

tsc_status tsc_graph_from_text(const char* text, tsc_graph** out) {
    if (!text || !out) return fail_argument("text/out is NULL");
    return guarded([&] { *out = new tsc_graph(graph_from_text(text)); });
}

tsc_status tsc_graph_to_text(const tsc_graph* g, char** out_text) {
    if (!g || !out_text) return fail_argument("g/out_text is NULL");
    return guarded([&] { *out_text = dup_string(to_text(g->graph)); });
}

tsc_status tsc_graph_to_dot(const tsc_graph* g, char** out_dot) {
    if (!g || !out_dot) return fail_argument("g/out_dot is NULL");
    return guarded([&] { *out_dot = dup_string(to_dot(g->graph)); });
}

tsc_status tsc_graph_info(const tsc_graph* g, int* out_n_vars, int* out_tau_max, int* out_edge_count) {
    if (!g || !out_n_vars || !out_tau_max || !out_edge_count) return fail_argument("g/out pointers are NULL");
    *out_n_vars = g->graph.n_vars();
    *out_tau_max = g->graph.tau_max();
    *out_edge_count = static_cast<int>(g->graph.edges().size());
    return TSC_OK;
}

void tsc_graph_free(tsc_graph* g) { delete g; }

tsc_status tsc_citest(const tsc_dataset* ds, int i_var, int i_lag, int j_var, int j_lag, const int* cond_pairs,
                      int n_cond, double* out_statistic, double* out_pvalue, int* out_effective_n) {
    if (!ds || !out_statistic || !out_pvalue || !out_effective_n) return fail_argument("ds/out pointers are NULL");
    if (n_cond > 0 && !cond_pairs) return fail_argument("cond_pairs is NULL");
    return guarded([&] {
        CiQuery q;
        q.i = {i_var, i_lag};
        q.j = {j_var, j_lag};
        for (int k = 0; k < n_cond; ++k) q.cond.push_back({cond_pairs[2 * k], cond_pairs[2 * k + 1]});
        const CiOutcome outcome = partial_correlation(ds->data, q);
        *out_statistic = outcome.statistic;
        *out_pvalue = outcome.pvalue;
        *out_effective_n = outcome.effective_n;
    });
}

tsc_status tsc_discover(const tsc_dataset* ds, const char* options_json, const char* background_json,
                        tsc_graph** out_pag, char** out_strengths_json) {
    if (!ds || !out_pag) return fail_argument("ds/out_pag is NULL");
    return guarded([&] {
        double prune_below = 0.0;
        const DiscoveryConfig cfg = parse_options(options_json, &prune_below);
        std::optional<BackgroundKnowledge> bk;
        if (background_json && *background_json) bk = parse_background(background_json);
        ParCorrBackend backend(ds->data, cfg.tau_max);
        DiscoveryResult result = lpcmci_discover(backend, cfg, bk ? &*bk : nullptr);
        TsGraph pag = result.pag;
        if (prune_below > 0.0) pag = prune_weak_links(pag, result.strengths, prune_below);
        *out_pag = new tsc_graph(std::move(pag));
        if (out_strengths_json) *out_strengths_json = dup_string(strengths_json_of(result.strengths));
    });
}

tsc_status tsc_random_baseline(int n_vars, int tau_max, uint64_t seed, tsc_graph** out) {
    if (!out) return fail_argument("out is NULL");
    return guarded([&] { *out = new tsc_graph(random_baseline(n_vars, tau_max, seed)); });
}

tsc_status tsc_prune_weak_links(const tsc_graph* pag, const char* strengths_json, double threshold,
                                tsc_graph** out) {
    if (!pag || !strengths_json || !out) return fail_argument("pag/strengths_json/out is NULL");
    return guarded([&] {
        *out = new tsc_graph(prune_weak_links(pag->graph, parse_strengths(strengths_json), threshold));
    });
}

tsc_status tsc_evaluate(const tsc_graph* predicted, const tsc_graph* oracle, tsc_report** out) {
    if (!predicted || !oracle || !out) return fail_argument("predicted/oracle/out is NULL");
    return guarded([&] { *out = new tsc_report{compare(predicted->graph, oracle->graph)}; });
}

tsc_status tsc_report_to_json(const tsc_report* report, char** out_json) {
    if (!report || !out_json) return fail_argument("report/out_json is NULL");
    return guarded([&] { *out_json = dup_string(report_to_json(report->report)); });
}

tsc_status tsc_report_harmonic(const tsc_report* report, double* out_score) {
    if (!report || !out_score) return fail_argument("report/out_score is NULL");
    *out_score = report->report.harmonic;
    return TSC_OK;
}

void tsc_report_free(tsc_report* report) { delete report; }

namespace {

tsc_status bench_common(const BenchConfig& cfg, const char* out_dir, char** out_aggregate_json,
                        int* out_within_budget) {
    return guarded([&] {
        std::optional<std::filesystem::path> dir;
        if (out_dir && *out_dir) dir = std::filesystem::path(out_dir);
        const BenchResult result = run_benchmark(cfg, dir);
        if (out_within_budget) *out_within_budget = result.within_failure_budget ? 1 : 0;
        if (out_aggregate_json) {
            nlohmann::json agg;
            agg["lpcmci"] = nlohmann::json::parse(report_to_json(result.lpcmci_aggregate));
            agg["baseline"] = nlohmann::json::parse(report_to_json(result.baseline_aggregate));
            agg["failed"] = result.failed;
            agg["within_failure_budget"] = result.within_failure_budget;
            *out_aggregate_json = dup_string(agg.dump(2) + "\n");
        }
    });
}

}  // namespace

tsc_status tsc_bench_run(const char* config_json, const char* out_dir, char** out_aggregate_json,
                         int* out_within_budget) {
    tsc_status rc = TSC_OK;
    const tsc_status parse_rc = guarded([&] {
        const BenchConfig cfg = parse_config(config_json);
        rc = bench_common(cfg, out_dir, out_aggregate_json, out_within_budget);
    });
    return parse_rc != TSC_OK ? parse_rc : rc;
}

tsc_status tsc_bench_rerun(const char* manifest_path, const char* out_dir, char** out_aggregate_json,
                           int* out_within_budget) {
    if (!manifest_path) return fail_argument("manifest_path is NULL");
    tsc_status rc = TSC_OK;
    const tsc_status parse_rc = guarded([&] {
        const BenchConfig cfg = bench_config_from_manifest(manifest_path);
        rc = bench_common(cfg, out_dir, out_aggregate_json, out_within_budget);
    });
    return parse_rc != TSC_OK ? parse_rc : rc;
}

tsc_status tsc_tune_alpha(const char* config_json, const double* alpha_grid, int n_grid, int tune_replicates,
                          const char* out_dir, double* out_best_alpha, char** out_curve_csv) {
    if (!alpha_grid || n_grid <= 0 || !out_best_alpha) return fail_argument("grid/out_best_alpha invalid");
    return guarded([&] {
        const BenchConfig cfg = parse_config(config_json);
        std::optional<std::filesystem::path> dir;
        if (out_dir && *out_dir) dir = std::filesystem::path(out_dir);
        const TuneResult result =
            tune_alpha(cfg, std::vector<double>(alpha_grid, alpha_grid + n_grid), tune_replicates, dir);
        *out_best_alpha = result.best_alpha;
        if (out_curve_csv) {
            std::string csv = "alpha,harmonic_score,adjacency_f1,edgemark_f1\n";
            char buf[96];
            for (const AlphaCurvePoint& p : result.curve) {
                std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", p.alpha, p.harmonic, p.adjacency_f1,
                              p.edgemark_f1);
                csv += buf;
            }
            *out_curve_csv = dup_string(csv);
        }
    });
}

tsc_status tsc_export_example(const char* fixture, const char* out_dir) {
    if (!fixture || !out_dir) return fail_argument("fixture/out_dir is NULL");
    return guarded([&] { export_example(fixture, out_dir); });
}

}  // extern "C"
