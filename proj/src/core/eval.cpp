#include "eval.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

namespace tscausal {

LinkCategory link_category(const TsNode& a, const TsNode& b) {
    if (a.var == b.var) return LinkCategory::Auto;
    return std::max(a.lag, b.lag) == 0 ? LinkCategory::Contemporaneous : LinkCategory::Lagged;
}

const char* link_category_name(int cell) {
    switch (cell) {
        case 0: return "auto";
        case 1: return "contemporaneous";
        case 2: return "lagged";
        case 3: return "total";
    }
    return "?";
}

double f1(double precision, double recall) {
    if (!(precision >= 0.0 && precision <= 1.0 && recall >= 0.0 && recall <= 1.0))
        raise(Errc::InvalidArgument, "precision and recall must lie in [0, 1]");
    const double denom = precision + recall;
    if (denom == 0.0) return 0.0;
    return 2.0 * precision * recall / denom;
}

double harmonic_score(double recall_adj, double precision_adj, double recall_edgemark,
                      double precision_edgemark) {
    for (double v : {recall_adj, precision_adj, recall_edgemark, precision_edgemark}) {
        if (!(v >= 0.0 && v <= 1.0)) raise(Errc::InvalidArgument, "rates must lie in [0, 1]");
        if (v == 0.0) return 0.0;
    }
    return 4.0 / (1.0 / recall_adj + 1.0 / precision_adj + 1.0 / recall_edgemark + 1.0 / precision_edgemark);
}

namespace {

void finish_cell(CellScores& cell) {
    const auto& c = cell.counts;
    cell.precision = (c.tp + c.fp) == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    cell.recall = (c.tp + c.fn) == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    cell.f1 = f1(cell.precision, cell.recall);
}

void finish_report(EvalReport& r) {
    for (int cell = 0; cell < 3; ++cell) {
        r.adjacency[kTotalCell].counts.tp += r.adjacency[static_cast<std::size_t>(cell)].counts.tp;
        r.adjacency[kTotalCell].counts.fp += r.adjacency[static_cast<std::size_t>(cell)].counts.fp;
        r.adjacency[kTotalCell].counts.fn += r.adjacency[static_cast<std::size_t>(cell)].counts.fn;
        r.edgemark[kTotalCell].counts.tp += r.edgemark[static_cast<std::size_t>(cell)].counts.tp;
        r.edgemark[kTotalCell].counts.fp += r.edgemark[static_cast<std::size_t>(cell)].counts.fp;
        r.edgemark[kTotalCell].counts.fn += r.edgemark[static_cast<std::size_t>(cell)].counts.fn;
        r.conflict_marks[kTotalCell] += r.conflict_marks[static_cast<std::size_t>(cell)];
        r.predicted_marks[kTotalCell] += r.predicted_marks[static_cast<std::size_t>(cell)];
    }
    for (auto& cell : r.adjacency) finish_cell(cell);
    for (auto& cell : r.edgemark) finish_cell(cell);
    r.harmonic = harmonic_score(r.adjacency[kTotalCell].recall, r.adjacency[kTotalCell].precision,
                                r.edgemark[kTotalCell].recall, r.edgemark[kTotalCell].precision);
    r.conflict_rate = r.predicted_marks[kTotalCell] == 0
                          ? 0.0
                          : static_cast<double>(r.conflict_marks[kTotalCell]) /
                                static_cast<double>(r.predicted_marks[kTotalCell]);
}

}  // namespace

EvalReport compare(const TsGraph& pred, const TsGraph& oracle) {
    if (pred.n_vars() != oracle.n_vars() || pred.tau_max() != oracle.tau_max())
        raise(Errc::ShapeMismatch, "graphs cover different variables or windows");

    EvalReport r{};
    // Count marks of the prediction (for the conflict rate).
    for (const TsEdge& e : pred.edges()) {
        const int cat = static_cast<int>(link_category(e.a, e.b));
        r.predicted_marks[static_cast<std::size_t>(cat)] += 2;
        if (e.mark_at_a == Edgemark::Conflict) ++r.conflict_marks[static_cast<std::size_t>(cat)];
        if (e.mark_at_b == Edgemark::Conflict) ++r.conflict_marks[static_cast<std::size_t>(cat)];
    }

    // Adjacency cells plus coupled edgemark counting: a shared adjacency
    // compares its two ends mark by mark (a mismatch is one false positive
    // plus one false negative, and a conflict never matches); a missing or
    // spurious adjacency moves both of its edgemarks with it.
    for (const TsEdge& e : pred.edges()) {
        const int cat = static_cast<int>(link_category(e.a, e.b));
        const auto other = oracle.edge_between(e.a, e.b);
        if (!other) {
            ++r.adjacency[static_cast<std::size_t>(cat)].counts.fp;
            r.edgemark[static_cast<std::size_t>(cat)].counts.fp += 2;
            continue;
        }
        ++r.adjacency[static_cast<std::size_t>(cat)].counts.tp;
        const Edgemark pred_marks[2] = {e.mark_at_a, e.mark_at_b};
        const Edgemark oracle_marks[2] = {other->mark_at_a, other->mark_at_b};
        for (int end = 0; end < 2; ++end) {
            const bool match = pred_marks[end] == oracle_marks[end] && pred_marks[end] != Edgemark::Conflict;
            if (match) {
                ++r.edgemark[static_cast<std::size_t>(cat)].counts.tp;
            } else {
                ++r.edgemark[static_cast<std::size_t>(cat)].counts.fp;
                ++r.edgemark[static_cast<std::size_t>(cat)].counts.fn;
            }
        }
    }
    for (const TsEdge& e : oracle.edges()) {
        if (pred.edge_between(e.a, e.b)) continue;
        const int cat = static_cast<int>(link_category(e.a, e.b));
        ++r.adjacency[static_cast<std::size_t>(cat)].counts.fn;
        r.edgemark[static_cast<std::size_t>(cat)].counts.fn += 2;
    }

    finish_report(r);
    return r;
}

double conflict_rate(std::span<const TsGraph> predictions) {
    if (predictions.empty()) raise(Errc::EmptyInput, "no predictions to pool");
    long conflicts = 0;
    long marks = 0;
    for (const TsGraph& g : predictions) {
        for (const TsEdge& e : g.edges()) {
            marks += 2;
            if (e.mark_at_a == Edgemark::Conflict) ++conflicts;
            if (e.mark_at_b == Edgemark::Conflict) ++conflicts;
        }
    }
    return marks == 0 ? 0.0 : static_cast<double>(conflicts) / static_cast<double>(marks);
}

EvalReport aggregate_reports(std::span<const EvalReport> reports) {
    if (reports.empty()) raise(Errc::EmptyInput, "no reports to aggregate");
    EvalReport out{};
    for (const EvalReport& r : reports) {
        for (int cell = 0; cell < 3; ++cell) {
            out.adjacency[static_cast<std::size_t>(cell)].counts.tp += r.adjacency[static_cast<std::size_t>(cell)].counts.tp;
            out.adjacency[static_cast<std::size_t>(cell)].counts.fp += r.adjacency[static_cast<std::size_t>(cell)].counts.fp;
            out.adjacency[static_cast<std::size_t>(cell)].counts.fn += r.adjacency[static_cast<std::size_t>(cell)].counts.fn;
            out.edgemark[static_cast<std::size_t>(cell)].counts.tp += r.edgemark[static_cast<std::size_t>(cell)].counts.tp;
            out.edgemark[static_cast<std::size_t>(cell)].counts.fp += r.edgemark[static_cast<std::size_t>(cell)].counts.fp;
            out.edgemark[static_cast<std::size_t>(cell)].counts.fn += r.edgemark[static_cast<std::size_t>(cell)].counts.fn;
            out.conflict_marks[static_cast<std::size_t>(cell)] += r.conflict_marks[static_cast<std::size_t>(cell)];
            out.predicted_marks[static_cast<std::size_t>(cell)] += r.predicted_marks[static_cast<std::size_t>(cell)];
        }
    }
    finish_report(out);
    return out;
}

EvalReport aggregate_reports_macro(std::span<const EvalReport> reports) {
    EvalReport out = aggregate_reports(reports);
    const double n = static_cast<double>(reports.size());
    for (int cell = 0; cell < 4; ++cell) {
        double ap = 0, ar = 0, ep = 0, er = 0;
        for (const EvalReport& r : reports) {
            ap += r.adjacency[static_cast<std::size_t>(cell)].precision;
            ar += r.adjacency[static_cast<std::size_t>(cell)].recall;
            ep += r.edgemark[static_cast<std::size_t>(cell)].precision;
            er += r.edgemark[static_cast<std::size_t>(cell)].recall;
        }
        out.adjacency[static_cast<std::size_t>(cell)].precision = ap / n;
        out.adjacency[static_cast<std::size_t>(cell)].recall = ar / n;
        out.adjacency[static_cast<std::size_t>(cell)].f1 =
            f1(out.adjacency[static_cast<std::size_t>(cell)].precision, out.adjacency[static_cast<std::size_t>(cell)].recall);
        out.edgemark[static_cast<std::size_t>(cell)].precision = ep / n;
        out.edgemark[static_cast<std::size_t>(cell)].recall = er / n;
        out.edgemark[static_cast<std::size_t>(cell)].f1 =
            f1(out.edgemark[static_cast<std::size_t>(cell)].precision, out.edgemark[static_cast<std::size_t>(cell)].recall);
    }
    out.harmonic = harmonic_score(out.adjacency[kTotalCell].recall, out.adjacency[kTotalCell].precision,
                                  out.edgemark[kTotalCell].recall, out.edgemark[kTotalCell].precision);
    return out;
}

namespace {

nlohmann::json cell_json(const CellScores& c) {
    return {{"tp", c.counts.tp}, {"fp", c.counts.fp}, {"fn", c.counts.fn},
            {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    for (int cell = 0; cell < 4; ++cell) {
        const char* name = link_category_name(cell);
        j["adjacency"][name] = cell_json(report.adjacency[static_cast<std::size_t>(cell)]);
        j["edgemark"][name] = cell_json(report.edgemark[static_cast<std::size_t>(cell)]);
        j["conflicts"][name] = report.conflict_marks[static_cast<std::size_t>(cell)];
    }
    j["harmonic_score"] = report.harmonic;
    j["conflict_rate"] = report.conflict_rate;
    return j.dump(2) + "\n";
}

std::string report_csv_header(const std::string& prefix) {
    std::ostringstream out;
    for (const char* kind : {"adj", "em"}) {
        for (int cell = 0; cell < 4; ++cell) {
            for (const char* field : {"tp", "fp", "fn", "precision", "recall", "f1"}) {
                out << ',' << prefix << '_' << kind << '_' << link_category_name(cell) << '_' << field;
            }
        }
    }
    out << ',' << prefix << "_harmonic_score," << prefix << "_conflict_rate";
    return out.str();
}

std::string report_csv_row(const EvalReport& report) {
    std::ostringstream out;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        out << ',' << buf;
    };
    for (const auto* cells : {&report.adjacency, &report.edgemark}) {
        for (int cell = 0; cell < 4; ++cell) {
            const CellScores& c = (*cells)[static_cast<std::size_t>(cell)];
            out << ',' << c.counts.tp << ',' << c.counts.fp << ',' << c.counts.fn;
            num(c.precision);
            num(c.recall);
            num(c.f1);
        }
    }
    num(report.harmonic);
    num(report.conflict_rate);
    return out.str();
}

std::string format_table(const EvalReport& predicted, const EvalReport& baseline) {
    std::ostringstream out;
    char buf[192];
    out << "                              precision   recall   F1-score   F1-baseline\n";
    const std::array<const std::array<CellScores, 4>*, 2> kinds = {&predicted.adjacency, &predicted.edgemark};
    const std::array<const std::array<CellScores, 4>*, 2> base = {&baseline.adjacency, &baseline.edgemark};
    const char* kind_names[2] = {"adjacency", "edgemark"};
    for (int k = 0; k < 2; ++k) {
        for (int cell = 0; cell < 4; ++cell) {
            const CellScores& c = (*kinds[static_cast<std::size_t>(k)])[static_cast<std::size_t>(cell)];
            const CellScores& b = (*base[static_cast<std::size_t>(k)])[static_cast<std::size_t>(cell)];
            std::snprintf(buf, sizeof buf, "%-9s  %-16s  %6.2f    %6.2f     %6.2f        %6.2f\n",
                          cell == 0 ? kind_names[k] : "", link_category_name(cell), c.precision, c.recall, c.f1,
                          b.f1);
            out << buf;
        }
    }
    std::snprintf(buf, sizeof buf, "harmonic_score %.2f   baseline %.2f   conflict_rate %.3f\n",
                  predicted.harmonic, baseline.harmonic, predicted.conflict_rate);
    out << buf;
    return out.str();
}

}  // namespace tscausal
