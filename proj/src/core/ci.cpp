#include "ci.hpp"

#include <algorithm>
#include <cmath>

namespace tscausal {

namespace {

constexpr double kRidgeRelative = 1e-10;
constexpr double kConditionFloor = 1e-12;
// Residual variance below this fraction of the marginal variance means an
// endpoint is (numerically) a deterministic function of the conditioning set.
constexpr double kResidualFloorRelative = 1e-9;

void check_ci_query(const CiQuery& q) {
    if (q.i == q.j) raise(Errc::InvalidArgument, "CI query needs distinct endpoints");
    for (const TsNode& c : q.cond)
        if (c == q.i || c == q.j) raise(Errc::InvalidArgument, "endpoints may not appear in the conditioning set");
    for (const TsNode& c : q.cond)
        for (const TsNode& d : q.cond)
            if (&c != &d && c == d) raise(Errc::InvalidArgument, "duplicate conditioning node");
}

int query_max_lag(const CiQuery& q) {
    int m = std::max(q.i.lag, q.j.lag);
    for (const TsNode& c : q.cond) m = std::max(m, c.lag);
    return m;
}

// Partial correlation of x and y given Z from a joint covariance matrix laid
// out as [x, y, Z...], plus the Fisher-z p-value.
CiOutcome parcorr_from_cov(const Eigen::MatrixXd& cov, int n_eff) {
    const int k = static_cast<int>(cov.rows()) - 2;
    if (n_eff <= k + 3)
        raise(Errc::InsufficientSamples,
              "need more than |cond|+3 samples, have " + std::to_string(n_eff) + " for |cond|=" + std::to_string(k));

    double sxx = cov(0, 0), syy = cov(1, 1), sxy = cov(0, 1);
    double rxx = sxx, ryy = syy, rxy = sxy;
    if (k > 0) {
        Eigen::MatrixXd szz = cov.block(2, 2, k, k);
        const double ridge = kRidgeRelative * (szz.trace() / k);
        szz.diagonal().array() += ridge > 0 ? ridge : kRidgeRelative;
        Eigen::LLT<Eigen::MatrixXd> llt(szz);
        if (llt.info() != Eigen::Success) raise(Errc::SingularRegression, "conditioning covariance not PD");
        const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
        const double dmin = diag.minCoeff();
        const double dmax = diag.maxCoeff();
        if (!(dmin > 0.0) || (dmin / dmax) * (dmin / dmax) < kConditionFloor)
            raise(Errc::SingularRegression, "conditioning covariance is rank deficient");
        const Eigen::VectorXd szx = cov.block(2, 0, k, 1);
        const Eigen::VectorXd szy = cov.block(2, 1, k, 1);
        const Eigen::VectorXd bx = llt.solve(szx);
        const Eigen::VectorXd by = llt.solve(szy);
        rxx = sxx - szx.dot(bx);
        ryy = syy - szy.dot(by);
        rxy = sxy - szx.dot(by);
    }
    if (!(rxx > kResidualFloorRelative * sxx) || !(ryy > kResidualFloorRelative * syy))
        raise(Errc::SingularRegression, "residual variance vanished under conditioning");

    double r = rxy / std::sqrt(rxx * ryy);
    r = std::clamp(r, -1.0, 1.0);

    const int df = n_eff - k - 3;
    const double bounded = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
    const double z = std::atanh(bounded) * std::sqrt(static_cast<double>(df));
    const double pvalue = std::erfc(std::abs(z) / std::sqrt(2.0));
    return CiOutcome{r, pvalue, n_eff};
}

}  // namespace

CiDecision ci_decide(const CiOutcome& outcome, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) raise(Errc::InvalidArgument, "alpha must lie in (0, 1)");
    return outcome.pvalue > alpha ? CiDecision::Independent : CiDecision::Dependent;
}

ParCorrBackend::ParCorrBackend(const ObservedDataset& data, int tau_max)
    : n_vars_(data.n_observed), t_len_(data.t_len) {
    if (tau_max < 0) raise(Errc::InvalidArgument, "tau_max must be non-negative");
    tau_max_ = tau_max;
    const int k = n_vars_ * (tau_max + 1);

    // One covariance per trim level so every query sees series aligned over a
    // common index range.
    trims_.resize(static_cast<std::size_t>(tau_max + 1));
    for (int trim = 0; trim <= tau_max; ++trim) {
        const int rows = t_len_ - trim;
        TrimStats& stats = trims_[static_cast<std::size_t>(trim)];
        stats.rows = rows;
        if (rows < 2) continue;  // queries at this trim will fail the sample guard
        Eigen::MatrixXd mat(rows, k);
        for (int lag = 0; lag <= tau_max; ++lag)
            for (int v = 0; v < n_vars_; ++v)
                for (int t = 0; t < rows; ++t) mat(t, lag * n_vars_ + v) = data.at(t + trim - lag, v);
        const Eigen::RowVectorXd mean = mat.colwise().mean();
        mat.rowwise() -= mean;
        stats.cov = (mat.transpose() * mat) / static_cast<double>(rows - 1);
    }
}

CiOutcome ParCorrBackend::test(const CiQuery& q) const {
    check_ci_query(q);
    for (const TsNode& node : {q.i, q.j}) {
        if (node.var < 0 || node.var >= n_vars_) raise(Errc::NodeNotFound, "query variable out of range");
        if (node.lag < 0 || node.lag > tau_max_) raise(Errc::LagOutOfRange, "query lag outside backend window");
    }
    for (const TsNode& node : q.cond) {
        if (node.var < 0 || node.var >= n_vars_) raise(Errc::NodeNotFound, "conditioning variable out of range");
        if (node.lag < 0 || node.lag > tau_max_) raise(Errc::LagOutOfRange, "conditioning lag outside backend window");
    }

    const int trim = query_max_lag(q);
    const TrimStats& stats = trims_[static_cast<std::size_t>(trim)];
    const int k = static_cast<int>(q.cond.size());
    std::vector<int> cols;
    cols.reserve(static_cast<std::size_t>(k) + 2);
    cols.push_back(q.i.lag * n_vars_ + q.i.var);
    cols.push_back(q.j.lag * n_vars_ + q.j.var);
    for (const TsNode& c : q.cond) cols.push_back(c.lag * n_vars_ + c.var);

    Eigen::MatrixXd sub(k + 2, k + 2);
    for (int r = 0; r < k + 2; ++r)
        for (int c = 0; c < k + 2; ++c)
            sub(r, c) = stats.cov.size() > 0
                            ? stats.cov(cols[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)])
                            : 0.0;
    return parcorr_from_cov(sub, stats.rows);
}

CiOutcome partial_correlation(const ObservedDataset& data, const CiQuery& q) {
    check_ci_query(q);
    for (const TsNode& node : {q.i, q.j})
        if (node.var < 0 || node.var >= data.n_observed) raise(Errc::NodeNotFound, "query variable out of range");
    for (const TsNode& node : q.cond)
        if (node.var < 0 || node.var >= data.n_observed)
            raise(Errc::NodeNotFound, "conditioning variable out of range");

    const int trim = query_max_lag(q);
    const int rows = data.t_len - trim;
    const int k = static_cast<int>(q.cond.size());
    if (rows <= k + 3)
        raise(Errc::InsufficientSamples,
              "need more than |cond|+3 samples, have " + std::to_string(std::max(rows, 0)));

    std::vector<TsNode> nodes{q.i, q.j};
    nodes.insert(nodes.end(), q.cond.begin(), q.cond.end());
    Eigen::MatrixXd mat(rows, k + 2);
    for (int c = 0; c < k + 2; ++c)
        for (int t = 0; t < rows; ++t)
            mat(t, c) = data.at(t + trim - nodes[static_cast<std::size_t>(c)].lag,
                                nodes[static_cast<std::size_t>(c)].var);
    const Eigen::RowVectorXd mean = mat.colwise().mean();
    mat.rowwise() -= mean;
    const Eigen::MatrixXd cov = (mat.transpose() * mat) / static_cast<double>(rows - 1);
    return parcorr_from_cov(cov, rows);
}

OracleCiBackend::OracleCiBackend(const TsGraph& true_window_dag, std::vector<int> observed, int padding)
    : unrolled_(true_window_dag, padding), observed_(std::move(observed)), tau_max_(true_window_dag.tau_max()) {
    for (int v : observed_)
        if (v < 0 || v >= true_window_dag.n_vars()) raise(Errc::BadLatentIndex, "observed index out of range");
    std::sort(observed_.begin(), observed_.end());
    observed_.erase(std::unique(observed_.begin(), observed_.end()), observed_.end());
    if (observed_.empty()) raise(Errc::InvalidArgument, "no observed variables");
}

CiOutcome OracleCiBackend::test(const CiQuery& q) const {
    check_ci_query(q);
    auto map_node = [&](TsNode n) {
        if (n.var < 0 || n.var >= static_cast<int>(observed_.size()))
            raise(Errc::NodeNotFound, "query variable out of range");
        return TsNode{observed_[static_cast<std::size_t>(n.var)], n.lag};
    };
    TsNode x = map_node(q.i);
    TsNode y = map_node(q.j);
    if (std::tie(y.var, y.lag) < std::tie(x.var, x.lag)) std::swap(x, y);
    std::vector<std::uint32_t> cond_key;
    std::vector<TsNode> cond;
    cond.reserve(q.cond.size());
    for (const TsNode& c : q.cond) cond.push_back(map_node(c));
    std::sort(cond.begin(), cond.end());
    cond_key.reserve(cond.size());
    for (const TsNode& c : cond)
        cond_key.push_back((static_cast<std::uint32_t>(c.var) << 10) | static_cast<std::uint32_t>(c.lag));

    const std::uint64_t pair_key = (static_cast<std::uint64_t>(x.var) << 48) |
                                   (static_cast<std::uint64_t>(x.lag) << 32) |
                                   (static_cast<std::uint64_t>(y.var) << 16) | static_cast<std::uint64_t>(y.lag);
    auto& bucket = cache_[pair_key];
    for (const auto& [key, separated] : bucket)
        if (key == cond_key) return separated ? CiOutcome{0.0, 1.0, 0} : CiOutcome{1.0, 0.0, 0};

    const bool separated = unrolled_.d_sep(x, y, cond);
    bucket.emplace_back(std::move(cond_key), separated);
    return separated ? CiOutcome{0.0, 1.0, 0} : CiOutcome{1.0, 0.0, 0};
}

CiOutcome oracle_ci(const TsGraph& true_window_dag, const CiQuery& q, int padding) {
    check_ci_query(q);
    const bool separated = ts_d_separated(true_window_dag, SeparationQuery{q.i, q.j, q.cond}, padding);
    return separated ? CiOutcome{0.0, 1.0, 0} : CiOutcome{1.0, 0.0, 0};
}

}  // namespace tscausal
