/*
 * tscausal C API
 *
 * Time-series causal discovery toolkit: synthetic SCM generation, separation
 * oracles, constraint-based PAG discovery and benchmark scoring behind a flat
 * extern "C" surface of opaque handles and status codes.
 *
 * Conventions:
 *   - Every function returns tsc_status; outputs are written through pointer
 *     arguments only on TSC_OK.
 *   - tsc_last_error() describes the most recent failure on this thread.
 *   - char** outputs are heap strings owned by the caller; release them with
 *     tsc_string_free(). Handles are released with their matching _free().
 */

#ifndef TSCAUSAL_H
#define TSCAUSAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define TSC_API __declspec(dllexport)
#else
#  define TSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsc_status {
    TSC_OK = 0,
    TSC_ERROR_INVALID_ARGUMENT = 1,
    TSC_ERROR_ILLEGAL_MARK = 2,
    TSC_ERROR_DUPLICATE_EDGE = 3,
    TSC_ERROR_LAG_OUT_OF_RANGE = 4,
    TSC_ERROR_HORIZON_TOO_SHORT = 5,
    TSC_ERROR_NODE_NOT_FOUND = 6,
    TSC_ERROR_RETRIES_EXHAUSTED = 7,
    TSC_ERROR_DIVERGED = 8,
    TSC_ERROR_BAD_LATENT_INDEX = 9,
    TSC_ERROR_INSUFFICIENT_SAMPLES = 10,
    TSC_ERROR_SINGULAR_REGRESSION = 11,
    TSC_ERROR_SHAPE_MISMATCH = 12,
    TSC_ERROR_EMPTY_INPUT = 13,
    TSC_ERROR_UNKNOWN_FIXTURE = 14,
    TSC_ERROR_PARSE = 15,
    TSC_ERROR_IO = 16,
    TSC_ERROR_UNKNOWN = 17
} tsc_status;

typedef struct tsc_scm tsc_scm;
typedef struct tsc_dataset tsc_dataset;
typedef struct tsc_graph tsc_graph;
typedef struct tsc_report tsc_report;

/* ------------------------------------------------------------------ misc */

TSC_API const char* tsc_version(void);
/* Message for the last failing call on the calling thread. */
TSC_API const char* tsc_last_error(void);
TSC_API void tsc_string_free(char* s);

/* ------------------------------------------------------ generating models */

/*
 * config_json uses the benchmark config schema (pass NULL for defaults):
 * n_vars_total, cross_links, latent_count, contemporaneous_fraction,
 * auto_range, cross_range, noise_range, noise_as_variance, t_len, tau_max,
 * alpha, replicates, master_seed, ...
 */
TSC_API tsc_status tsc_scm_sample(const char* config_json, uint64_t seed, tsc_scm** out);
TSC_API tsc_status tsc_scm_from_json(const char* json, tsc_scm** out);
TSC_API tsc_status tsc_scm_to_json(const tsc_scm* scm, char** out_json);
TSC_API tsc_status tsc_scm_is_stationary(const tsc_scm* scm, int* out_flag);
/* DAG over (variable, lag) nodes for a window of tau_max >= 1. */
TSC_API tsc_status tsc_scm_true_dag(const tsc_scm* scm, int tau_max, tsc_graph** out);
/* Ground-truth PAG over the spec's observed variables (relabeled 0..N-1). */
TSC_API tsc_status tsc_scm_oracle_pag(const tsc_scm* scm, int tau_max, int padding, tsc_graph** out);
TSC_API void tsc_scm_free(tsc_scm* scm);

TSC_API tsc_status tsc_scm_simulate(const tsc_scm* scm, int t_len, uint64_t seed, tsc_dataset** out);
/* Drops the spec's latent columns from a full simulation. */
TSC_API tsc_status tsc_scm_observe(const tsc_scm* scm, const tsc_dataset* full, tsc_dataset** out);

/* ---------------------------------------------------------------- datasets */

TSC_API tsc_status tsc_dataset_from_csv(const char* csv_text, tsc_dataset** out);
TSC_API tsc_status tsc_dataset_to_csv(const tsc_dataset* ds, char** out_csv);
TSC_API tsc_status tsc_dataset_dims(const tsc_dataset* ds, int* out_t_len, int* out_n_vars);
TSC_API tsc_status tsc_dataset_mask(const tsc_dataset* ds, const int* latent, int n_latent, tsc_dataset** out);
TSC_API void tsc_dataset_free(tsc_dataset* ds);

/* ------------------------------------------------------------------ graphs */

TSC_API tsc_status tsc_graph_from_text(const char* text, tsc_graph** out);
TSC_API tsc_status tsc_graph_to_text(const tsc_graph* g, char** out_text);
TSC_API tsc_status tsc_graph_to_dot(const tsc_graph* g, char** out_dot);
TSC_API tsc_status tsc_graph_info(const tsc_graph* g, int* out_n_vars, int* out_tau_max, int* out_edge_count);
TSC_API void tsc_graph_free(tsc_graph* g);

/* -------------------------------------------------- tests and discovery */

/*
 * Conditional-independence probe: cond_pairs is n_cond (variable, lag) pairs
 * laid out flat. Outputs the signed partial correlation, its p-value and the
 * effective sample count.
 */
TSC_API tsc_status tsc_citest(const tsc_dataset* ds, int i_var, int i_lag, int j_var, int j_lag,
                              const int* cond_pairs, int n_cond, double* out_statistic, double* out_pvalue,
                              int* out_effective_n);

/*
 * options_json (all optional): {"alpha":0.26,"tau_max":1,"max_cond_size":3,
 * "n_preliminary_phases":1,"prune_below":0.0}.
 * background_json (optional): {"forbidden_adjacencies":[{"a":{"var":..,"lag":..},
 * "b":{...}}],"forced_marks":[{"a":{...},"b":{...},"at":"a","mark":"tail"}]}.
 * out_strengths_json receives the per-link absolute strengths.
 */
TSC_API tsc_status tsc_discover(const tsc_dataset* ds, const char* options_json, const char* background_json,
                                tsc_graph** out_pag, char** out_strengths_json);

TSC_API tsc_status tsc_random_baseline(int n_vars, int tau_max, uint64_t seed, tsc_graph** out);

TSC_API tsc_status tsc_prune_weak_links(const tsc_graph* pag, const char* strengths_json, double threshold,
                                        tsc_graph** out);

/* -------------------------------------------------------------- evaluation */

TSC_API tsc_status tsc_evaluate(const tsc_graph* predicted, const tsc_graph* oracle, tsc_report** out);
TSC_API tsc_status tsc_report_to_json(const tsc_report* report, char** out_json);
TSC_API tsc_status tsc_report_harmonic(const tsc_report* report, double* out_score);
TSC_API void tsc_report_free(tsc_report* report);

/* --------------------------------------------------------------- benchmark */

/*
 * Full benchmark: per replicate sample/simulate/observe, oracle PAG,
 * discovery and random baseline, both scored against the same oracle.
 * Writes manifest.json, replicates.csv, aggregate.json and table.txt when
 * out_dir is non-NULL. out_within_budget reports the <=1% replicate-failure
 * gate.
 */
TSC_API tsc_status tsc_bench_run(const char* config_json, const char* out_dir, char** out_aggregate_json,
                                 int* out_within_budget);
/* Re-runs a benchmark from its manifest (bit-identical replicates.csv). */
TSC_API tsc_status tsc_bench_rerun(const char* manifest_path, const char* out_dir, char** out_aggregate_json,
                                   int* out_within_budget);

TSC_API tsc_status tsc_tune_alpha(const char* config_json, const double* alpha_grid, int n_grid,
                                  int tune_replicates, const char* out_dir, double* out_best_alpha,
                                  char** out_curve_csv);

/* Writes the seeded walkthrough fixtures ("fig2", "fig3-pruned"). */
TSC_API tsc_status tsc_export_example(const char* fixture, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* TSCAUSAL_H */
