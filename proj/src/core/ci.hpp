#ifndef TSCAUSAL_CORE_CI_HPP
#define TSCAUSAL_CORE_CI_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "graph.hpp"
#include "oracle.hpp"
#include "scm.hpp"

namespace tscausal {

struct CiQuery {
    TsNode i;
    TsNode j;
    std::vector<TsNode> cond;
};

struct CiOutcome {
    double statistic = 0.0;  // signed partial correlation, in [-1, 1]
    double pvalue = 1.0;
    int effective_n = 0;  // samples available after lag alignment
};

enum class CiDecision { Independent, Dependent };

// p-values exactly at alpha keep the edge (count as dependent).
CiDecision ci_decide(const CiOutcome& outcome, double alpha);

class CiBackend {
public:
    virtual ~CiBackend() = default;
    virtual CiOutcome test(const CiQuery& q) const = 0;
    virtual int n_vars() const = 0;
    virtual int max_lag() const = 0;
};

// Linear partial correlation with a Fisher-z p-value. Lagged covariances are
// precomputed once per trim level (trim = largest lag in the query), so a
// single test is a small dense solve; instances are immutable after
// construction and safe to query concurrently.
class ParCorrBackend final : public CiBackend {
public:
    ParCorrBackend(const ObservedDataset& data, int tau_max);

    CiOutcome test(const CiQuery& q) const override;
    int n_vars() const override { return n_vars_; }
    int max_lag() const override { return tau_max_; }

private:
    struct TrimStats {
        Eigen::MatrixXd cov;  // lagged-series covariance, index = lag * n_vars + var
        int rows = 0;
    };

    int n_vars_;
    int tau_max_;
    int t_len_;
    std::vector<TrimStats> trims_;
};

// One-off partial correlation on a dataset; same math as ParCorrBackend.
CiOutcome partial_correlation(const ObservedDataset& data, const CiQuery& q);

// Perfect backend: answers from separation in the true DAG. Query nodes are
// observed-column indices, mapped back to original variables internally.
// Queries are memoized, so one instance should serve one thread.
class OracleCiBackend final : public CiBackend {
public:
    OracleCiBackend(const TsGraph& true_window_dag, std::vector<int> observed,
                    int padding = kDefaultSeparationPadding);

    CiOutcome test(const CiQuery& q) const override;
    int n_vars() const override { return static_cast<int>(observed_.size()); }
    int max_lag() const override { return tau_max_; }

private:
    UnrolledDag unrolled_;
    std::vector<int> observed_;
    int tau_max_;
    mutable std::unordered_map<std::uint64_t, std::vector<std::pair<std::vector<std::uint32_t>, bool>>> cache_;
};

CiOutcome oracle_ci(const TsGraph& true_window_dag, const CiQuery& q,
                    int padding = kDefaultSeparationPadding);

}  // namespace tscausal

#endif
