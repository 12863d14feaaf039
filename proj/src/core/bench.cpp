#include "bench.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "ci.hpp"
#include "json.hpp"
#include "oracle.hpp"
#include "rng.hpp"

namespace tscausal {

namespace {

// Sub-stream indices hung off each replicate seed.
constexpr std::uint64_t kStreamScm = 1;
constexpr std::uint64_t kStreamSimulate = 2;
constexpr std::uint64_t kStreamBaseline = 3;

// Seed for the shipped example fixtures.
constexpr std::uint64_t kExampleSeed = 7;

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot open " + path.string() + " for writing");
    out << content;
    if (!out) raise(Errc::IoError, "failed writing " + path.string());
}

std::string strengths_to_json(const StrengthMap& strengths) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [key, value] : strengths) {
        arr.push_back({{"var_a", key.var_a}, {"lag_a", key.lag_a}, {"var_b", key.var_b}, {"lag_b", 0},
                       {"strength", value}});
    }
    return nlohmann::json{{"strengths", arr}}.dump(2) + "\n";
}

}  // namespace

std::vector<int> observed_variables(const ScmSpec& spec) {
    std::vector<int> out;
    for (int v = 0; v < spec.n_vars_total; ++v)
        if (!std::binary_search(spec.latent_set.begin(), spec.latent_set.end(), v)) out.push_back(v);
    return out;
}

std::string bench_config_to_json(const BenchConfig& cfg) {
    nlohmann::json j;
    j["n_vars_total"] = cfg.gen.n_vars_total;
    j["cross_links"] = cfg.gen.cross_link_count;
    j["latent_count"] = cfg.gen.latent_count;
    j["contemporaneous_fraction"] = cfg.gen.contemporaneous_fraction;
    j["auto_range"] = {cfg.gen.auto_min, cfg.gen.auto_max};
    j["cross_range"] = {cfg.gen.cross_min, cfg.gen.cross_max};
    j["noise_range"] = {cfg.gen.noise_min, cfg.gen.noise_max};
    j["noise_as_variance"] = cfg.gen.noise_as_variance;
    j["max_redraws"] = cfg.gen.max_redraws;
    if (cfg.gen.fixed_latent_set) j["fixed_latent_set"] = *cfg.gen.fixed_latent_set;
    j["t_len"] = cfg.t_len;
    j["replicates"] = cfg.replicates;
    j["tau_max"] = cfg.tau_max;
    j["alpha"] = cfg.alpha;
    j["max_cond_size"] = cfg.max_cond_size;
    j["n_preliminary_phases"] = cfg.n_preliminary_phases;
    j["prune_below"] = cfg.prune_below;
    j["master_seed"] = cfg.master_seed;
    j["jobs"] = cfg.jobs;
    j["macro_average"] = cfg.macro_average;
    j["oracle_padding"] = cfg.oracle_padding;
    return j.dump(2) + "\n";
}

namespace {

BenchConfig bench_config_from_jobj(const nlohmann::json& j) {
    BenchConfig cfg;
    try {
        cfg.gen.n_vars_total = j.value("n_vars_total", cfg.gen.n_vars_total);
        cfg.gen.cross_link_count = j.value("cross_links", cfg.gen.cross_link_count);
        cfg.gen.latent_count = j.value("latent_count", cfg.gen.latent_count);
        cfg.gen.contemporaneous_fraction = j.value("contemporaneous_fraction", cfg.gen.contemporaneous_fraction);
        if (j.contains("auto_range")) {
            cfg.gen.auto_min = j["auto_range"].at(0).get<double>();
            cfg.gen.auto_max = j["auto_range"].at(1).get<double>();
        }
        if (j.contains("cross_range")) {
            cfg.gen.cross_min = j["cross_range"].at(0).get<double>();
            cfg.gen.cross_max = j["cross_range"].at(1).get<double>();
        }
        if (j.contains("noise_range")) {
            cfg.gen.noise_min = j["noise_range"].at(0).get<double>();
            cfg.gen.noise_max = j["noise_range"].at(1).get<double>();
        }
        cfg.gen.noise_as_variance = j.value("noise_as_variance", cfg.gen.noise_as_variance);
        cfg.gen.max_redraws = j.value("max_redraws", cfg.gen.max_redraws);
        if (j.contains("fixed_latent_set")) cfg.gen.fixed_latent_set = j["fixed_latent_set"].get<std::vector<int>>();
        cfg.t_len = j.value("t_len", cfg.t_len);
        cfg.replicates = j.value("replicates", cfg.replicates);
        cfg.tau_max = j.value("tau_max", cfg.tau_max);
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.max_cond_size = j.value("max_cond_size", cfg.max_cond_size);
        cfg.n_preliminary_phases = j.value("n_preliminary_phases", cfg.n_preliminary_phases);
        cfg.prune_below = j.value("prune_below", cfg.prune_below);
        cfg.master_seed = j.value("master_seed", cfg.master_seed);
        cfg.jobs = j.value("jobs", cfg.jobs);
        cfg.macro_average = j.value("macro_average", cfg.macro_average);
        cfg.oracle_padding = j.value("oracle_padding", cfg.oracle_padding);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad bench config: ") + e.what());
    }
    if (cfg.replicates < 1) raise(Errc::InvalidArgument, "replicates must be at least 1");
    if (cfg.gen.auto_min > cfg.gen.auto_max || cfg.gen.cross_min > cfg.gen.cross_max ||
        cfg.gen.noise_min > cfg.gen.noise_max)
        raise(Errc::InvalidArgument, "config ranges must be ordered");
    return cfg;
}

}  // namespace

BenchConfig bench_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad config JSON: ") + e.what());
    }
    return bench_config_from_jobj(j);
}

BenchConfig bench_config_from_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot read " + manifest_path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, std::string("bad manifest: ") + e.what());
    }
    if (!j.contains("config")) raise(Errc::ParseError, "manifest has no config block");
    return bench_config_from_jobj(j["config"]);
}

namespace {

ReplicateRecord run_replicate(const BenchConfig& cfg, int index) {
    ReplicateRecord rec;
    rec.index = index;
    rec.seed = RngStream::derive(cfg.master_seed, static_cast<std::uint64_t>(index));
    try {
        const ScmSpec spec = sample_scm(cfg.gen, RngStream::derive(rec.seed, kStreamScm));
        const TimeSeriesDataset data = simulate(spec, cfg.t_len, RngStream::derive(rec.seed, kStreamSimulate));
        const ObservedDataset obs = observe(data, spec.latent_set);
        const TsGraph truth = true_window_dag(spec, cfg.tau_max);
        const std::vector<int> observed = observed_variables(spec);
        const TsGraph oracle = oracle_pag(truth, observed, cfg.tau_max, cfg.oracle_padding);

        ParCorrBackend backend(obs, cfg.tau_max);
        DiscoveryConfig dc;
        dc.alpha = cfg.alpha;
        dc.tau_max = cfg.tau_max;
        dc.max_cond_size = cfg.max_cond_size;
        dc.n_preliminary_phases = cfg.n_preliminary_phases;
        DiscoveryResult result = lpcmci_discover(backend, dc);
        TsGraph predicted = result.pag;
        if (cfg.prune_below > 0.0) predicted = prune_weak_links(predicted, result.strengths, cfg.prune_below);

        const TsGraph baseline =
            random_baseline(obs.n_observed, cfg.tau_max, RngStream::derive(rec.seed, kStreamBaseline));

        rec.lpcmci = compare(predicted, oracle);
        rec.baseline = compare(baseline, oracle);
        rec.ok = true;
    } catch (const Error& e) {
        rec.ok = false;
        rec.reason = errc_name(e.code());
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.reason = e.what();
    }
    return rec;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
    if (cfg.replicates < 1) raise(Errc::InvalidArgument, "replicates must be at least 1");
    const auto start = std::chrono::steady_clock::now();

    BenchResult result;
    result.records.resize(static_cast<std::size_t>(cfg.replicates));
    int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    jobs = std::min(jobs, cfg.replicates);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < cfg.replicates; i = next.fetch_add(1))
            result.records[static_cast<std::size_t>(i)] = run_replicate(cfg, i);
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    std::vector<EvalReport> lp, bl;
    for (const ReplicateRecord& r : result.records) {
        if (!r.ok) {
            ++result.failed;
            continue;
        }
        lp.push_back(r.lpcmci);
        bl.push_back(r.baseline);
    }
    if (lp.empty()) raise(Errc::EmptyInput, "every replicate failed");
    result.lpcmci_aggregate = cfg.macro_average ? aggregate_reports_macro(lp) : aggregate_reports(lp);
    result.baseline_aggregate = cfg.macro_average ? aggregate_reports_macro(bl) : aggregate_reports(bl);
    result.within_failure_budget =
        static_cast<double>(result.failed) <= 0.01 * static_cast<double>(cfg.replicates);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);

        std::ostringstream csv;
        csv << "replicate,seed,status,reason" << report_csv_header("lpcmci") << report_csv_header("baseline")
            << "\n";
        for (const ReplicateRecord& r : result.records) {
            csv << r.index << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ',' << r.reason;
            csv << report_csv_row(r.lpcmci) << report_csv_row(r.baseline) << "\n";
        }
        write_file(*out_dir / "replicates.csv", csv.str());

        nlohmann::json agg;
        agg["lpcmci"] = nlohmann::json::parse(report_to_json(result.lpcmci_aggregate));
        agg["baseline"] = nlohmann::json::parse(report_to_json(result.baseline_aggregate));
        agg["replicates"] = cfg.replicates;
        agg["failed"] = result.failed;
        agg["within_failure_budget"] = result.within_failure_budget;
        write_file(*out_dir / "aggregate.json", agg.dump(2) + "\n");

        write_file(*out_dir / "table.txt", format_table(result.lpcmci_aggregate, result.baseline_aggregate));

        nlohmann::json manifest;
        manifest["tool"] = "tscausal";
        manifest["version"] = kToolVersion;
        manifest["config"] = nlohmann::json::parse(bench_config_to_json(cfg));
        manifest["replicate_seeds"] = nlohmann::json::array();
        for (const ReplicateRecord& r : result.records)
            manifest["replicate_seeds"].push_back({{"index", r.index},
                                                   {"seed", r.seed},
                                                   {"status", r.ok ? "ok" : "failed"},
                                                   {"reason", r.reason}});
        manifest["artifacts"] = {{"replicates_csv", "replicates.csv"},
                                 {"aggregate_json", "aggregate.json"},
                                 {"table_txt", "table.txt"}};
        manifest["wall_seconds"] = result.wall_seconds;
        write_file(*out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return result;
}

TuneResult tune_alpha(const BenchConfig& cfg, const std::vector<double>& alpha_grid, int tune_replicates,
                      const std::optional<std::filesystem::path>& out_dir) {
    if (alpha_grid.empty()) raise(Errc::EmptyInput, "alpha grid is empty");
    if (tune_replicates < 1) raise(Errc::InvalidArgument, "tune_replicates must be at least 1");

    TuneResult result;
    for (double alpha : alpha_grid) {
        BenchConfig sub = cfg;
        sub.alpha = alpha;
        sub.replicates = tune_replicates;
        const BenchResult bench = run_benchmark(sub);
        AlphaCurvePoint point;
        point.alpha = alpha;
        point.harmonic = bench.lpcmci_aggregate.harmonic;
        point.adjacency_f1 = bench.lpcmci_aggregate.adjacency[kTotalCell].f1;
        point.edgemark_f1 = bench.lpcmci_aggregate.edgemark[kTotalCell].f1;
        result.curve.push_back(point);
    }
    result.best_alpha = result.curve.front().alpha;
    result.best_harmonic = result.curve.front().harmonic;
    for (const AlphaCurvePoint& p : result.curve) {
        if (p.harmonic > result.best_harmonic) {
            result.best_harmonic = p.harmonic;
            result.best_alpha = p.alpha;
        }
    }

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        std::ostringstream csv;
        csv << "alpha,harmonic_score,adjacency_f1,edgemark_f1\n";
        char buf[96];
        for (const AlphaCurvePoint& p : result.curve) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", p.alpha, p.harmonic, p.adjacency_f1,
                          p.edgemark_f1);
            csv << buf;
        }
        write_file(*out_dir / "alpha_curve.csv", csv.str());
    }
    return result;
}

void export_example(const std::string& fixture, const std::filesystem::path& out_dir) {
    if (fixture != "fig2" && fixture != "fig3-pruned")
        raise(Errc::UnknownFixture, "unknown fixture '" + fixture + "'");

    BenchConfig cfg;
    cfg.gen.fixed_latent_set = std::vector<int>{0, 3, 5};
    const std::uint64_t seed = RngStream::derive(cfg.master_seed, kExampleSeed);

    const ScmSpec spec = sample_scm(cfg.gen, RngStream::derive(seed, kStreamScm));
    const TimeSeriesDataset data = simulate(spec, cfg.t_len, RngStream::derive(seed, kStreamSimulate));
    const ObservedDataset obs = observe(data, spec.latent_set);
    const TsGraph truth = true_window_dag(spec, cfg.tau_max);
    const TsGraph oracle = oracle_pag(truth, observed_variables(spec), cfg.tau_max, cfg.oracle_padding);

    ParCorrBackend backend(obs, cfg.tau_max);
    DiscoveryConfig dc;
    dc.alpha = cfg.alpha;
    dc.tau_max = cfg.tau_max;
    dc.max_cond_size = cfg.max_cond_size;
    dc.n_preliminary_phases = cfg.n_preliminary_phases;
    const DiscoveryResult result = lpcmci_discover(backend, dc);

    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "spec.json", scm_to_json(spec, seed));
    write_file(out_dir / "dataset.csv", dataset_to_csv(obs));
    write_file(out_dir / "true_dag.txt", to_text(truth));
    write_file(out_dir / "true_dag.dot", to_dot(truth));
    write_file(out_dir / "oracle_pag.txt", to_text(oracle));
    write_file(out_dir / "oracle_pag.dot", to_dot(oracle));
    write_file(out_dir / "predicted_pag.txt", to_text(result.pag));
    write_file(out_dir / "predicted_pag.dot", to_dot(result.pag));
    write_file(out_dir / "strengths.json", strengths_to_json(result.strengths));
    if (fixture == "fig3-pruned") {
        const TsGraph pruned = prune_weak_links(result.pag, result.strengths, 0.10);
        write_file(out_dir / "pruned_pag.txt", to_text(pruned));
        write_file(out_dir / "pruned_pag.dot", to_dot(pruned));
    }
}

}  // namespace tscausal
