// Exercises the shared-library surface end to end through the C header only.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "tscausal/tscausal.h"

static int failures = 0;

#define REQUIRE(cond)                                                                   \
    do {                                                                                \
        if (!(cond)) {                                                                  \
            std::fprintf(stderr, "[FAIL] %s:%d: %s (last error: %s)\n", __FILE__,       \
                         __LINE__, #cond, tsc_last_error());                            \
            ++failures;                                                                 \
        }                                                                               \
    } while (0)

static std::string take(char* s) {
    std::string out = s ? s : "";
    tsc_string_free(s);
    return out;
}

int main() {
    REQUIRE(tsc_version() != nullptr);
    REQUIRE(std::strlen(tsc_version()) > 0);

    // Null-argument hygiene.
    REQUIRE(tsc_scm_sample("{}", 1, nullptr) == TSC_ERROR_INVALID_ARGUMENT);
    REQUIRE(tsc_graph_from_text(nullptr, nullptr) == TSC_ERROR_INVALID_ARGUMENT);

    // Sample a small model.
    const char* config =
        "{\"n_vars_total\":5,\"cross_links\":4,\"latent_count\":1,\"t_len\":300,\"replicates\":2,"
        "\"master_seed\":7,\"jobs\":1}";
    tsc_scm* scm = nullptr;
    REQUIRE(tsc_scm_sample(config, 11, &scm) == TSC_OK);

    int stationary = 0;
    REQUIRE(tsc_scm_is_stationary(scm, &stationary) == TSC_OK);
    REQUIRE(stationary == 1);

    // Spec JSON round trip.
    char* spec_json = nullptr;
    REQUIRE(tsc_scm_to_json(scm, &spec_json) == TSC_OK);
    const std::string spec_text = take(spec_json);
    tsc_scm* scm2 = nullptr;
    REQUIRE(tsc_scm_from_json(spec_text.c_str(), &scm2) == TSC_OK);
    char* spec_json2 = nullptr;
    REQUIRE(tsc_scm_to_json(scm2, &spec_json2) == TSC_OK);
    REQUIRE(take(spec_json2) == spec_text);
    tsc_scm_free(scm2);

    // Bad JSON is a parse error.
    tsc_scm* bad = nullptr;
    REQUIRE(tsc_scm_from_json("{", &bad) == TSC_ERROR_PARSE);

    // Simulate, mask, round-trip CSV.
    tsc_dataset* full = nullptr;
    REQUIRE(tsc_scm_simulate(scm, 300, 12, &full) == TSC_OK);
    int t_len = 0, width = 0;
    REQUIRE(tsc_dataset_dims(full, &t_len, &width) == TSC_OK);
    REQUIRE(t_len == 300);
    REQUIRE(width == 5);

    tsc_dataset* observed = nullptr;
    REQUIRE(tsc_scm_observe(scm, full, &observed) == TSC_OK);
    REQUIRE(tsc_dataset_dims(observed, &t_len, &width) == TSC_OK);
    REQUIRE(width == 4);

    char* csv = nullptr;
    REQUIRE(tsc_dataset_to_csv(observed, &csv) == TSC_OK);
    const std::string csv_text = take(csv);
    tsc_dataset* reread = nullptr;
    REQUIRE(tsc_dataset_from_csv(csv_text.c_str(), &reread) == TSC_OK);
    char* csv2 = nullptr;
    REQUIRE(tsc_dataset_to_csv(reread, &csv2) == TSC_OK);
    REQUIRE(take(csv2) == csv_text);

    const int bad_latent[] = {9, 0};
    tsc_dataset* masked = nullptr;
    REQUIRE(tsc_dataset_mask(observed, bad_latent, 2, &masked) == TSC_ERROR_BAD_LATENT_INDEX);

    // Truth, oracle, graph formats.
    tsc_graph* truth = nullptr;
    REQUIRE(tsc_scm_true_dag(scm, 1, &truth) == TSC_OK);
    int n_vars = 0, tau_max = 0, edge_count = 0;
    REQUIRE(tsc_graph_info(truth, &n_vars, &tau_max, &edge_count) == TSC_OK);
    REQUIRE(n_vars == 5);
    REQUIRE(tau_max == 1);
    REQUIRE(edge_count == 9);  // 5 auto + 4 cross

    tsc_graph* oracle = nullptr;
    REQUIRE(tsc_scm_oracle_pag(scm, 1, 10, &oracle) == TSC_OK);
    REQUIRE(tsc_graph_info(oracle, &n_vars, &tau_max, &edge_count) == TSC_OK);
    REQUIRE(n_vars == 4);  // observed relabeling

    char* text = nullptr;
    REQUIRE(tsc_graph_to_text(oracle, &text) == TSC_OK);
    const std::string graph_text = take(text);
    tsc_graph* parsed = nullptr;
    REQUIRE(tsc_graph_from_text(graph_text.c_str(), &parsed) == TSC_OK);
    char* text2 = nullptr;
    REQUIRE(tsc_graph_to_text(parsed, &text2) == TSC_OK);
    REQUIRE(take(text2) == graph_text);
    char* dot = nullptr;
    REQUIRE(tsc_graph_to_dot(oracle, &dot) == TSC_OK);
    REQUIRE(take(dot).find("digraph") == 0);

    // One CI probe.
    double stat = 0.0, pvalue = 0.0;
    int eff_n = 0;
    REQUIRE(tsc_citest(observed, 0, 1, 0, 0, nullptr, 0, &stat, &pvalue, &eff_n) == TSC_OK);
    REQUIRE(pvalue >= 0.0 && pvalue <= 1.0);
    REQUIRE(eff_n == 299);
    REQUIRE(tsc_citest(observed, 0, 0, 0, 0, nullptr, 0, &stat, &pvalue, &eff_n) ==
            TSC_ERROR_INVALID_ARGUMENT);

    // Discovery plus evaluation.
    tsc_graph* pag = nullptr;
    char* strengths = nullptr;
    REQUIRE(tsc_discover(observed, "{\"alpha\":0.26,\"tau_max\":1}", nullptr, &pag, &strengths) == TSC_OK);
    const std::string strengths_json = take(strengths);
    REQUIRE(strengths_json.find("\"strengths\"") != std::string::npos);

    tsc_report* report = nullptr;
    REQUIRE(tsc_evaluate(pag, oracle, &report) == TSC_OK);
    double harmonic = -1.0;
    REQUIRE(tsc_report_harmonic(report, &harmonic) == TSC_OK);
    REQUIRE(harmonic >= 0.0 && harmonic <= 1.0);
    char* report_json = nullptr;
    REQUIRE(tsc_report_to_json(report, &report_json) == TSC_OK);
    REQUIRE(take(report_json).find("harmonic_score") != std::string::npos);

    // Shape mismatch surfaces as a status code.
    tsc_report* mismatch = nullptr;
    REQUIRE(tsc_evaluate(truth, oracle, &mismatch) == TSC_ERROR_SHAPE_MISMATCH);

    // Pruning through the JSON strength table.
    tsc_graph* pruned = nullptr;
    REQUIRE(tsc_prune_weak_links(pag, strengths_json.c_str(), 0.10, &pruned) == TSC_OK);
    int pruned_edges = 0;
    REQUIRE(tsc_graph_info(pruned, &n_vars, &tau_max, &pruned_edges) == TSC_OK);
    REQUIRE(pruned_edges <= edge_count + 100);  // sanity: callable and consistent

    // Baseline.
    tsc_graph* baseline = nullptr;
    REQUIRE(tsc_random_baseline(4, 1, 3, &baseline) == TSC_OK);

    // Tiny benchmark end to end, files included.
    const char* out_dir = "capi_bench_out";
    char* aggregate = nullptr;
    int within_budget = 0;
    REQUIRE(tsc_bench_run(config, out_dir, &aggregate, &within_budget) == TSC_OK);
    REQUIRE(take(aggregate).find("lpcmci") != std::string::npos);
    REQUIRE(within_budget == 1);

    char* aggregate2 = nullptr;
    const std::string manifest = std::string(out_dir) + "/manifest.json";
    REQUIRE(tsc_bench_rerun(manifest.c_str(), "capi_bench_out2", &aggregate2, &within_budget) == TSC_OK);
    take(aggregate2);

    // Alpha tuning on a single grid point.
    const double grid[] = {0.26};
    double best = 0.0;
    char* curve = nullptr;
    REQUIRE(tsc_tune_alpha(config, grid, 1, 2, nullptr, &best, &curve) == TSC_OK);
    REQUIRE(best == 0.26);
    REQUIRE(take(curve).find("alpha,") == 0);

    // Fixture errors.
    REQUIRE(tsc_export_example("nope", "capi_example_out") == TSC_ERROR_UNKNOWN_FIXTURE);
    REQUIRE(std::strlen(tsc_last_error()) > 0);

    tsc_graph_free(baseline);
    tsc_graph_free(pruned);
    tsc_report_free(report);
    tsc_graph_free(pag);
    tsc_graph_free(parsed);
    tsc_graph_free(oracle);
    tsc_graph_free(truth);
    tsc_dataset_free(reread);
    tsc_dataset_free(observed);
    tsc_dataset_free(full);
    tsc_scm_free(scm);

    if (failures) {
        std::fprintf(stderr, "%d C API checks failed\n", failures);
        return 1;
    }
    std::puts("C API checks passed");
    return 0;
}
