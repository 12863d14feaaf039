// Command-line front end for the tscausal shared library. Everything here
// goes through the C API in tscausal/tscausal.h.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tscausal/tscausal.h"

namespace {

namespace fs = std::filesystem;

struct CApiFailure {
    tsc_status status;
    std::string message;
};

void check(tsc_status status) {
    if (status != TSC_OK) throw CApiFailure{status, tsc_last_error()};
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    tsc_string_free(s);
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CApiFailure{TSC_ERROR_IO, "cannot read " + path.string()};
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CApiFailure{TSC_ERROR_IO, "cannot write " + path.string()};
    out << content;
}

std::string config_or_empty(const std::string& config_path) {
    return config_path.empty() ? std::string() : read_file(config_path);
}

// RAII wrappers around the opaque handles.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    explicit Handle(T* p) : ptr(p) {}
    ~Handle() { Free(ptr); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};
using ScmHandle = Handle<tsc_scm, tsc_scm_free>;
using DatasetHandle = Handle<tsc_dataset, tsc_dataset_free>;
using GraphHandle = Handle<tsc_graph, tsc_graph_free>;
using ReportHandle = Handle<tsc_report, tsc_report_free>;

void write_graph_files(const tsc_graph* g, const fs::path& dir, const std::string& stem) {
    char* text = nullptr;
    check(tsc_graph_to_text(g, &text));
    write_file(dir / (stem + ".txt"), take_string(text));
    char* dot = nullptr;
    check(tsc_graph_to_dot(g, &dot));
    write_file(dir / (stem + ".dot"), take_string(dot));
}

// "var" or "var:lag"
std::pair<int, int> parse_node(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) return {std::stoi(s), 0};
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

std::vector<int> parse_cond(const std::string& s) {
    std::vector<int> flat;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto [var, lag] = parse_node(item);
        flat.push_back(var);
        flat.push_back(lag);
    }
    return flat;
}

int run(int argc, char** argv) {
    CLI::App app{"time-series causal discovery benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int jobs = 0;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--jobs", jobs, "worker threads (0 = hardware)");

    // generate: sample one model and simulate a dataset
    auto* generate = app.add_subcommand("generate", "sample an SCM and write spec + observed dataset");
    int gen_t_len = 500;
    generate->add_option("--t-len", gen_t_len, "time series length");

    // oracle: ground-truth PAG for a spec
    auto* oracle = app.add_subcommand("oracle", "oracle PAG for a spec JSON");
    std::string oracle_spec;
    int oracle_tau_max = 1;
    int oracle_padding = 10;
    oracle->add_option("--spec", oracle_spec, "spec JSON file")->required()->check(CLI::ExistingFile);
    oracle->add_option("--tau-max", oracle_tau_max, "window size");
    oracle->add_option("--padding", oracle_padding, "extra unrolling slices");

    // discover: run the algorithm on a dataset
    auto* discover = app.add_subcommand("discover", "constraint-based discovery on a dataset CSV");
    std::string discover_data;
    double alpha = 0.26;
    int tau_max = 1;
    int max_cond_size = 3;
    int phases = 1;
    double prune_below = 0.0;
    std::string background_path;
    discover->add_option("--data", discover_data, "dataset CSV")->required()->check(CLI::ExistingFile);
    discover->add_option("--alpha", alpha, "significance level");
    discover->add_option("--tau-max", tau_max, "window size");
    discover->add_option("--max-cond-size", max_cond_size, "conditioning set cap");
    discover->add_option("--phases", phases, "preliminary ancestral phases");
    discover->add_option("--prune-below", prune_below, "drop links weaker than this (0 = off)");
    discover->add_option("--background", background_path, "background knowledge JSON")->check(CLI::ExistingFile);

    // citest: one conditional-independence probe
    auto* citest = app.add_subcommand("citest", "partial-correlation test on a dataset CSV");
    std::string ci_data, ci_i, ci_j, ci_cond;
    citest->add_option("--data", ci_data, "dataset CSV")->required()->check(CLI::ExistingFile);
    citest->add_option("--i", ci_i, "first node var[:lag]")->required();
    citest->add_option("--j", ci_j, "second node var[:lag]")->required();
    citest->add_option("--cond", ci_cond, "conditioning nodes var:lag,var:lag,...");

    // evaluate: score one PAG against another
    auto* evaluate = app.add_subcommand("evaluate", "score a predicted PAG against an oracle PAG");
    std::string eval_pred, eval_oracle;
    evaluate->add_option("--pred", eval_pred, "predicted graph file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--oracle", eval_oracle, "oracle graph file")->required()->check(CLI::ExistingFile);

    // bench: the full loop
    auto* bench = app.add_subcommand("bench", "replicated benchmark with baseline");
    std::string from_manifest;
    bench->add_option("--from-manifest", from_manifest, "re-run a previous benchmark from its manifest")
        ->check(CLI::ExistingFile);

    // tune-alpha
    auto* tune = app.add_subcommand("tune-alpha", "grid search for the best significance level");
    std::string grid_str = "0.01,0.05,0.1,0.2,0.26,0.4";
    int tune_replicates = 50;
    tune->add_option("--grid", grid_str, "comma-separated alpha grid");
    tune->add_option("--tune-replicates", tune_replicates, "replicates per grid point");

    // example fixtures
    auto* example = app.add_subcommand("example", "write a seeded walkthrough fixture");
    std::string fixture = "fig2";
    example->add_option("--fixture", fixture, "fig2 or fig3-pruned");

    CLI11_PARSE(app, argc, argv);
    const fs::path out(out_dir);

    auto apply_globals = [&](std::string config_json) {
        // --seed / --jobs override the config file.
        std::string json = config_json.empty() ? "{}" : std::move(config_json);
        std::ostringstream patched;
        patched << json.substr(0, json.rfind('}')) << (json.find(':') == std::string::npos ? "" : ",")
                << "\"master_seed\":" << seed << ",\"jobs\":" << jobs << "}";
        return patched.str();
    };

    if (*generate) {
        ScmHandle scm;
        check(tsc_scm_sample(config_or_empty(config_path).c_str(), seed, scm.out()));
        char* spec_json = nullptr;
        check(tsc_scm_to_json(scm.get(), &spec_json));
        write_file(out / "spec.json", take_string(spec_json));
        DatasetHandle full;
        check(tsc_scm_simulate(scm.get(), gen_t_len, seed + 1, full.out()));
        DatasetHandle observed;
        check(tsc_scm_observe(scm.get(), full.get(), observed.out()));
        char* csv = nullptr;
        check(tsc_dataset_to_csv(observed.get(), &csv));
        write_file(out / "dataset.csv", take_string(csv));
        std::cout << "wrote " << (out / "spec.json").string() << " and " << (out / "dataset.csv").string()
                  << "\n";
        return 0;
    }
    if (*oracle) {
        ScmHandle scm;
        check(tsc_scm_from_json(read_file(oracle_spec).c_str(), scm.out()));
        GraphHandle pag;
        check(tsc_scm_oracle_pag(scm.get(), oracle_tau_max, oracle_padding, pag.out()));
        write_graph_files(pag.get(), out, "oracle_pag");
        std::cout << "wrote " << (out / "oracle_pag.txt").string() << "\n";
        return 0;
    }
    if (*discover) {
        DatasetHandle data;
        check(tsc_dataset_from_csv(read_file(discover_data).c_str(), data.out()));
        std::ostringstream options;
        options << "{\"alpha\":" << alpha << ",\"tau_max\":" << tau_max << ",\"max_cond_size\":" << max_cond_size
                << ",\"n_preliminary_phases\":" << phases << ",\"prune_below\":" << prune_below << "}";
        const std::string background = background_path.empty() ? "" : read_file(background_path);
        GraphHandle pag;
        char* strengths = nullptr;
        check(tsc_discover(data.get(), options.str().c_str(), background.empty() ? nullptr : background.c_str(),
                           pag.out(), &strengths));
        write_file(out / "strengths.json", take_string(strengths));
        write_graph_files(pag.get(), out, "pag");
        std::cout << "wrote " << (out / "pag.txt").string() << "\n";
        return 0;
    }
    if (*citest) {
        DatasetHandle data;
        check(tsc_dataset_from_csv(read_file(ci_data).c_str(), data.out()));
        const auto [ivar, ilag] = parse_node(ci_i);
        const auto [jvar, jlag] = parse_node(ci_j);
        const std::vector<int> cond = parse_cond(ci_cond);
        double stat = 0.0, pvalue = 0.0;
        int eff_n = 0;
        check(tsc_citest(data.get(), ivar, ilag, jvar, jlag, cond.data(), static_cast<int>(cond.size()) / 2,
                         &stat, &pvalue, &eff_n));
        std::printf("{\"statistic\": %.10g, \"pvalue\": %.10g, \"effective_n\": %d}\n", stat, pvalue, eff_n);
        return 0;
    }
    if (*evaluate) {
        GraphHandle pred, orac;
        check(tsc_graph_from_text(read_file(eval_pred).c_str(), pred.out()));
        check(tsc_graph_from_text(read_file(eval_oracle).c_str(), orac.out()));
        ReportHandle report;
        check(tsc_evaluate(pred.get(), orac.get(), report.out()));
        char* json = nullptr;
        check(tsc_report_to_json(report.get(), &json));
        std::cout << take_string(json);
        return 0;
    }
    if (*bench) {
        char* aggregate = nullptr;
        int within_budget = 1;
        if (!from_manifest.empty()) {
            check(tsc_bench_rerun(from_manifest.c_str(), out.string().c_str(), &aggregate, &within_budget));
        } else {
            check(tsc_bench_run(apply_globals(config_or_empty(config_path)).c_str(), out.string().c_str(),
                                &aggregate, &within_budget));
        }
        take_string(aggregate);
        std::cout << read_file(out / "table.txt");
        if (!within_budget) {
            std::cerr << "error: more than 1% of replicates failed\n";
            return 2;
        }
        return 0;
    }
    if (*tune) {
        std::vector<double> grid;
        std::stringstream ss(grid_str);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) grid.push_back(std::stod(item));
        double best = 0.0;
        char* curve = nullptr;
        check(tsc_tune_alpha(apply_globals(config_or_empty(config_path)).c_str(), grid.data(),
                             static_cast<int>(grid.size()), tune_replicates, out.string().c_str(), &best,
                             &curve));
        std::cout << take_string(curve);
        std::printf("best_alpha %.10g\n", best);
        return 0;
    }
    if (*example) {
        check(tsc_export_example(fixture.c_str(), out.string().c_str()));
        std::cout << "wrote fixture '" << fixture << "' to " << out.string() << "\n";
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CApiFailure& e) {
        std::cerr << "error: " << e.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
