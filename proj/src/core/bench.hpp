#ifndef TSCAUSAL_CORE_BENCH_HPP
#define TSCAUSAL_CORE_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "discovery.hpp"
#include "eval.hpp"
#include "scm.hpp"

namespace tscausal {

inline constexpr const char* kToolVersion = "0.1.0";

struct BenchConfig {
    GenConfig gen;
    int t_len = 500;
    int replicates = 200;
    int tau_max = 1;
    double alpha = 0.26;
    int max_cond_size = 3;
    int n_preliminary_phases = 1;
    double prune_below = 0.0;  // 0 disables pruning of the predicted PAG
    std::uint64_t master_seed = 1;
    int jobs = 0;  // 0 = hardware concurrency
    bool macro_average = false;
    int oracle_padding = 10;
};

std::string bench_config_to_json(const BenchConfig& cfg);
BenchConfig bench_config_from_json(const std::string& text);

struct ReplicateRecord {
    int index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string reason;
    EvalReport lpcmci;
    EvalReport baseline;
};

struct BenchResult {
    std::vector<ReplicateRecord> records;
    EvalReport lpcmci_aggregate;
    EvalReport baseline_aggregate;
    int failed = 0;
    // False when more than 1% of the replicates errored out.
    bool within_failure_budget = true;
    double wall_seconds = 0.0;
};

// Runs sample -> simulate -> observe -> oracle -> discover -> score per
// replicate, plus the random baseline against the same oracle PAG, and
// aggregates both. With an output directory it writes manifest.json,
// replicates.csv, aggregate.json and table.txt.
BenchResult run_benchmark(const BenchConfig& cfg,
                          const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// Reads the config back out of a manifest so a run can be reproduced
// byte-for-byte.
BenchConfig bench_config_from_manifest(const std::filesystem::path& manifest_path);

struct AlphaCurvePoint {
    double alpha = 0.0;
    double harmonic = 0.0;
    double adjacency_f1 = 0.0;
    double edgemark_f1 = 0.0;
};

struct TuneResult {
    double best_alpha = 0.0;
    double best_harmonic = 0.0;
    std::vector<AlphaCurvePoint> curve;
};

TuneResult tune_alpha(const BenchConfig& cfg, const std::vector<double>& alpha_grid, int tune_replicates,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// Writes the shipped seeded walkthrough: the generating DAG, its oracle PAG,
// the predicted PAG (and, for "fig3-pruned", the weak-link-pruned variant)
// as graph/DOT files plus the dataset and spec.
void export_example(const std::string& fixture, const std::filesystem::path& out_dir);

// Helper shared with the CLI: observed variable list of a spec.
std::vector<int> observed_variables(const ScmSpec& spec);

}  // namespace tscausal

#endif
