#ifndef TSCAUSAL_CORE_EVAL_HPP
#define TSCAUSAL_CORE_EVAL_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "graph.hpp"

namespace tscausal {

enum class LinkCategory : int { Auto = 0, Contemporaneous = 1, Lagged = 2 };
inline constexpr int kCategoryCount = 3;
inline constexpr int kTotalCell = 3;

LinkCategory link_category(const TsNode& a, const TsNode& b);
const char* link_category_name(int cell);  // 0..2 categories, 3 = total

struct CategoryCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

struct CellScores {
    CategoryCounts counts;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
};

// Scores per {category, total} x {adjacency, edgemark}, harmonic aggregate of
// the four total rates, plus the conflict bookkeeping of the prediction.
struct EvalReport {
    std::array<CellScores, 4> adjacency;
    std::array<CellScores, 4> edgemark;
    double harmonic = 0.0;
    double conflict_rate = 0.0;
    std::array<long, 4> conflict_marks{0, 0, 0, 0};
    std::array<long, 4> predicted_marks{0, 0, 0, 0};  // 2 per predicted edge
};

double f1(double precision, double recall);
double harmonic_score(double recall_adj, double precision_adj, double recall_edgemark,
                      double precision_edgemark);

EvalReport compare(const TsGraph& pred, const TsGraph& oracle);

// Pooled fraction of conflict marks over all predicted edgemarks.
double conflict_rate(std::span<const TsGraph> predictions);

// Micro-average: sums counts across reports, then recomputes the rates.
EvalReport aggregate_reports(std::span<const EvalReport> reports);
// Macro-average: means of the per-report rates (counts are still summed).
EvalReport aggregate_reports_macro(std::span<const EvalReport> reports);

std::string report_to_json(const EvalReport& report);
std::string report_csv_header(const std::string& prefix);
std::string report_csv_row(const EvalReport& report);

// Text grid with one row per category: precision / recall / F1 of the
// prediction next to the baseline's F1.
std::string format_table(const EvalReport& predicted, const EvalReport& baseline);

}  // namespace tscausal

#endif
