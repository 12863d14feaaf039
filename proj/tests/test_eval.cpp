#include <cmath>

#include "core/discovery.hpp"
#include "core/eval.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace tscausal;
using namespace tscausal::testsupport;

namespace {

TsGraph pag_of(int n_vars, int tau_max, std::vector<TsEdge> edges) {
    return TsGraph(GraphKind::PAG, n_vars, tau_max, std::move(edges));
}

TsEdge oriented(TsNode a, TsNode b) { return {a, b, Edgemark::Tail, Edgemark::Head}; }

}  // namespace

TEST_CASE("f1 follows the harmonic-mean formula") {
    CHECK(f1(1.0, 0.0) == 0.0);
    CHECK(f1(1.0, 1.0) == 1.0);
    CHECK(f1(1.0, 0.5) == doctest::Approx(2.0 / 3.0));
    CHECK(f1(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(f1(1.2, 0.5), Error);
}

TEST_CASE("f1 sits between its arguments and fixes equal inputs") {
    RngStream rng(1);
    for (int rep = 0; rep < 200; ++rep) {
        const double p = rng.uniform01();
        const double r = rng.uniform01();
        const double v = f1(p, r);
        CHECK(v >= std::min(p, r) - 1e-12);
        CHECK(v <= std::max(p, r) + 1e-12);
        CHECK(f1(p, p) == doctest::Approx(p));
    }
}

TEST_CASE("the harmonic score aggregates four rates") {
    CHECK(harmonic_score(1, 1, 1, 1) == 1.0);
    CHECK(harmonic_score(0.5, 0.5, 0.5, 0.5) == doctest::Approx(0.5));
    CHECK(harmonic_score(0.3, 1, 1, 1) == doctest::Approx(4.0 / (1.0 / 0.3 + 3.0)));
    CHECK(harmonic_score(0.0, 1, 1, 1) == 0.0);
    // Reported totals of the reference experiment land near 0.53.
    CHECK(harmonic_score(0.67, 0.62, 0.46, 0.42) == doctest::Approx(0.53).epsilon(0.02));
    CHECK(std::abs(harmonic_score(0.67, 0.62, 0.46, 0.42) - 0.53) < 0.01);
}

TEST_CASE("the harmonic score is permutation invariant") {
    RngStream rng(2);
    for (int rep = 0; rep < 100; ++rep) {
        double v[4];
        for (double& x : v) x = 0.05 + 0.95 * rng.uniform01();
        const double base = harmonic_score(v[0], v[1], v[2], v[3]);
        CHECK(harmonic_score(v[3], v[2], v[1], v[0]) == doctest::Approx(base));
        CHECK(harmonic_score(v[1], v[0], v[3], v[2]) == doctest::Approx(base));
        const double c = 0.05 + 0.95 * rng.uniform01();
        CHECK(harmonic_score(c, c, c, c) == doctest::Approx(c));
    }
}

TEST_CASE("a perfect prediction scores one everywhere") {
    const TsGraph oracle = pag_of(3, 1,
                                  {{{0, 1}, {0, 0}, Edgemark::Circle, Edgemark::Head},
                                   {{1, 0}, {2, 0}, Edgemark::Head, Edgemark::Head}});
    const EvalReport r = compare(oracle, oracle);
    CHECK(r.adjacency[kTotalCell].precision == 1.0);
    CHECK(r.adjacency[kTotalCell].recall == 1.0);
    CHECK(r.edgemark[kTotalCell].f1 == 1.0);
    CHECK(r.harmonic == 1.0);
    CHECK(r.conflict_rate == 0.0);
}

TEST_CASE("an empty prediction has perfect precision and zero recall") {
    const TsGraph oracle = pag_of(3, 1,
                                  {{{0, 1}, {0, 0}, Edgemark::Circle, Edgemark::Head},
                                   {{1, 0}, {2, 0}, Edgemark::Head, Edgemark::Head}});
    const TsGraph empty = pag_of(3, 1, {});
    const EvalReport r = compare(empty, oracle);
    CHECK(r.adjacency[kTotalCell].precision == 1.0);
    CHECK(r.adjacency[kTotalCell].recall == 0.0);
    CHECK(r.adjacency[kTotalCell].f1 == 0.0);
    CHECK(r.edgemark[kTotalCell].precision == 1.0);
    CHECK(r.edgemark[kTotalCell].recall == 0.0);
    CHECK(r.harmonic == 0.0);
}

TEST_CASE("a missed adjacency costs two edgemark false negatives") {
    const TsGraph oracle = pag_of(3, 0,
                                  {{{0, 0}, {1, 0}, Edgemark::Circle, Edgemark::Head},
                                   {{1, 0}, {2, 0}, Edgemark::Head, Edgemark::Head}});
    const TsGraph pred = pag_of(3, 0, {{{0, 0}, {1, 0}, Edgemark::Circle, Edgemark::Head}});
    const EvalReport r = compare(pred, oracle);
    CHECK(r.adjacency[kTotalCell].counts.fn == 1);
    CHECK(r.adjacency[kTotalCell].counts.tp == 1);
    CHECK(r.edgemark[kTotalCell].counts.fn == 2);
    CHECK(r.edgemark[kTotalCell].counts.tp == 2);
    CHECK(r.edgemark[kTotalCell].counts.fp == 0);
}

TEST_CASE("a spurious adjacency costs two edgemark false positives") {
    const TsGraph oracle = pag_of(3, 0, {});
    const TsGraph pred = pag_of(3, 0, {{{0, 0}, {1, 0}, Edgemark::Circle, Edgemark::Head}});
    const EvalReport r = compare(pred, oracle);
    CHECK(r.adjacency[kTotalCell].counts.fp == 1);
    CHECK(r.edgemark[kTotalCell].counts.fp == 2);
    CHECK(r.edgemark[kTotalCell].counts.fn == 0);
}

TEST_CASE("mark mismatches count one false positive plus one false negative") {
    const TsGraph oracle = pag_of(2, 0, {{{0, 0}, {1, 0}, Edgemark::Tail, Edgemark::Head}});
    const TsGraph pred = pag_of(2, 0, {{{0, 0}, {1, 0}, Edgemark::Head, Edgemark::Head}});
    const EvalReport r = compare(pred, oracle);
    CHECK(r.adjacency[kTotalCell].counts.tp == 1);
    CHECK(r.edgemark[kTotalCell].counts.tp == 1);
    CHECK(r.edgemark[kTotalCell].counts.fp == 1);
    CHECK(r.edgemark[kTotalCell].counts.fn == 1);
}

TEST_CASE("conflicts are always false positives, never matches") {
    const TsGraph oracle = pag_of(2, 0, {{{0, 0}, {1, 0}, Edgemark::Tail, Edgemark::Head}});
    const TsGraph pred = pag_of(2, 0, {{{0, 0}, {1, 0}, Edgemark::Conflict, Edgemark::Head}});
    const EvalReport r = compare(pred, oracle);
    CHECK(r.edgemark[kTotalCell].counts.tp == 1);   // the head end still matches
    CHECK(r.edgemark[kTotalCell].counts.fp == 1);
    CHECK(r.edgemark[kTotalCell].counts.fn == 1);
    CHECK(r.conflict_marks[kTotalCell] == 1);
    CHECK(r.predicted_marks[kTotalCell] == 2);
    CHECK(r.conflict_rate == doctest::Approx(0.5));
}

TEST_CASE("categories split auto, contemporaneous and lagged links") {
    CHECK(link_category({0, 1}, {0, 0}) == LinkCategory::Auto);
    CHECK(link_category({0, 0}, {1, 0}) == LinkCategory::Contemporaneous);
    CHECK(link_category({0, 1}, {1, 0}) == LinkCategory::Lagged);

    const TsGraph oracle = pag_of(3, 1,
                                  {oriented({0, 1}, {0, 0}),      // auto
                                   oriented({0, 0}, {1, 0}),      // contemporaneous
                                   oriented({0, 1}, {2, 0})});    // lagged
    const EvalReport r = compare(pag_of(3, 1, {}), oracle);
    CHECK(r.adjacency[static_cast<int>(LinkCategory::Auto)].counts.fn == 1);
    CHECK(r.adjacency[static_cast<int>(LinkCategory::Contemporaneous)].counts.fn == 1);
    CHECK(r.adjacency[static_cast<int>(LinkCategory::Lagged)].counts.fn == 1);
}

TEST_CASE("swapping prediction and oracle swaps fp and fn exactly") {
    RngStream rng(33);
    for (int rep = 0; rep < 30; ++rep) {
        const TsGraph a = random_baseline(5, 1, rng.next_u64());
        const TsGraph b = random_baseline(5, 1, rng.next_u64());
        const EvalReport ab = compare(a, b);
        const EvalReport ba = compare(b, a);
        for (int cell = 0; cell < 4; ++cell) {
            CHECK(ab.adjacency[static_cast<std::size_t>(cell)].counts.tp ==
                  ba.adjacency[static_cast<std::size_t>(cell)].counts.tp);
            CHECK(ab.adjacency[static_cast<std::size_t>(cell)].counts.fp ==
                  ba.adjacency[static_cast<std::size_t>(cell)].counts.fn);
            CHECK(ab.adjacency[static_cast<std::size_t>(cell)].counts.fn ==
                  ba.adjacency[static_cast<std::size_t>(cell)].counts.fp);
            CHECK(ab.edgemark[static_cast<std::size_t>(cell)].counts.fp ==
                  ba.edgemark[static_cast<std::size_t>(cell)].counts.fn);
            CHECK(ab.edgemark[static_cast<std::size_t>(cell)].counts.fn ==
                  ba.edgemark[static_cast<std::size_t>(cell)].counts.fp);
        }
    }
}

TEST_CASE("edgemark errors always dominate adjacency errors twofold") {
    RngStream rng(44);
    for (int rep = 0; rep < 30; ++rep) {
        const TsGraph a = random_baseline(5, 1, rng.next_u64());
        const TsGraph b = random_baseline(5, 1, rng.next_u64());
        const EvalReport r = compare(a, b);
        for (int cell = 0; cell < 4; ++cell) {
            CHECK(r.edgemark[static_cast<std::size_t>(cell)].counts.fn >=
                  2 * r.adjacency[static_cast<std::size_t>(cell)].counts.fn);
            CHECK(r.edgemark[static_cast<std::size_t>(cell)].counts.fp >=
                  2 * r.adjacency[static_cast<std::size_t>(cell)].counts.fp);
        }
    }
}

TEST_CASE("compare rejects shape mismatches") {
    CHECK_THROWS_AS(compare(pag_of(3, 1, {}), pag_of(4, 1, {})), Error);
    CHECK_THROWS_AS(compare(pag_of(3, 1, {}), pag_of(3, 2, {})), Error);
}

TEST_CASE("pooled conflict rate counts marks over all predictions") {
    std::vector<TsGraph> preds;
    preds.push_back(pag_of(2, 0, {{{0, 0}, {1, 0}, Edgemark::Conflict, Edgemark::Head}}));
    preds.push_back(pag_of(2, 0, {}));
    preds.push_back(pag_of(2, 1,
                           {{{0, 0}, {1, 0}, Edgemark::Circle, Edgemark::Circle},
                            {{0, 1}, {1, 0}, Edgemark::Circle, Edgemark::Head},
                            {{1, 1}, {0, 0}, Edgemark::Circle, Edgemark::Head},
                            {{0, 1}, {0, 0}, Edgemark::Circle, Edgemark::Head}}));
    CHECK(conflict_rate(preds) == doctest::Approx(0.1));  // 1 conflict over 10 marks
    CHECK(conflict_rate(std::vector<TsGraph>{pag_of(2, 0, {})}) == 0.0);
    CHECK_THROWS_AS(conflict_rate(std::vector<TsGraph>{}), Error);
}

TEST_CASE("aggregation sums counts before computing rates") {
    const TsGraph oracle = pag_of(2, 0, {{{0, 0}, {1, 0}, Edgemark::Tail, Edgemark::Head}});
    const EvalReport hit = compare(oracle, oracle);
    const EvalReport miss = compare(pag_of(2, 0, {}), oracle);
    const EvalReport agg = aggregate_reports(std::vector<EvalReport>{hit, miss});
    CHECK(agg.adjacency[kTotalCell].counts.tp == 1);
    CHECK(agg.adjacency[kTotalCell].counts.fn == 1);
    CHECK(agg.adjacency[kTotalCell].recall == doctest::Approx(0.5));
    CHECK(agg.adjacency[kTotalCell].precision == 1.0);
}

TEST_CASE("reports serialize to JSON and CSV with matching shapes") {
    const TsGraph oracle = pag_of(2, 0, {{{0, 0}, {1, 0}, Edgemark::Tail, Edgemark::Head}});
    const EvalReport r = compare(oracle, oracle);
    const std::string json = report_to_json(r);
    CHECK(json.find("\"harmonic_score\"") != std::string::npos);
    CHECK(json.find("\"contemporaneous\"") != std::string::npos);

    const std::string header = report_csv_header("lpcmci");
    const std::string row = report_csv_row(r);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));

    const std::string table = format_table(r, r);
    CHECK(table.find("adjacency") != std::string::npos);
    CHECK(table.find("edgemark") != std::string::npos);
    CHECK(table.find("harmonic_score") != std::string::npos);
}
