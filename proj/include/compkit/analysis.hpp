#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "solver.hpp"
#include "task_space.hpp"

namespace compkit {

enum class Split { TrainOnly, TestOnly, TrainAndTest };

inline std::string split_name(Split s) {
    switch (s) {
        case Split::TrainOnly: return "TrainOnly";
        case Split::TestOnly: return "TestOnly";
        default: return "TrainAndTest";
    }
}

namespace detail {
inline std::vector<CompInput> split_rows(const CompositionalDataset& ds, Split split) {
    std::vector<CompInput> rows;
    if (split != Split::TestOnly)
        for (const auto& e : ds.train) rows.push_back(e.z);
    if (split != Split::TrainOnly)
        for (const auto& e : ds.test) rows.push_back(e.z);
    return rows;
}
inline std::vector<double> split_truth(const CompositionalDataset& ds, Split split) {
    std::vector<double> t;
    if (split != Split::TestOnly)
        for (const auto& e : ds.train) t.push_back(e.target);
    if (split != Split::TrainOnly)
        for (const auto& e : ds.test) t.push_back(e.target);
    return t;
}
}  // namespace detail

// A conjunction instance: the conjunction J plus the component values it binds.
struct ConjInstance {
    ConjMask mask = 0;
    std::vector<int> values;  // z_c for each set bit of mask, ascending c

    bool operator<(const ConjInstance& o) const {
        return std::tie(mask, values) < std::tie(o.mask, o.values);
    }
    bool matches(const CompInput& z) const {
        std::size_t vi = 0;
        for (std::size_t c = 0; c < z.size(); ++c)
            if (mask & (ConjMask(1) << c))
                if (z[c] != values[vi++]) return false;
        return true;
    }
};

inline ConjInstance conj_instance(ConjMask mask, const CompInput& z) {
    ConjInstance ci;
    ci.mask = mask;
    for (std::size_t c = 0; c < z.size(); ++c)
        if (mask & (ConjMask(1) << c)) ci.values.push_back(z[c]);
    return ci;
}

// Least-squares decomposition of a predictor into conjunction-wise one-hot
// features. Only conjunction instances active somewhere in the training split
// enter the design; the empty conjunction is dropped and no intercept is fit.
struct AdditivityReport {
    double r_squared = 0.0;
    bool degenerate = false;  // zero-variance predictions on the split
    std::map<ConjInstance, double> coefficients;
    int feature_count = 0;
    Split split_used = Split::TestOnly;
};

namespace detail {

inline std::vector<ConjInstance> training_conj_instances(const CompositionalDataset& ds) {
    std::map<ConjInstance, bool> seen;
    const ConjMask full = full_mask(ds.space.num_components);
    for (const auto& e : ds.train)
        for (ConjMask j = 1; j <= full; ++j) seen[conj_instance(j, e.z)] = true;
    std::vector<ConjInstance> out;
    out.reserve(seen.size());
    for (auto& [ci, _] : seen) out.push_back(ci);
    return out;
}

inline Eigen::MatrixXd one_hot_design(const std::vector<CompInput>& rows,
                                      const std::vector<ConjInstance>& features) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t f = 0; f < features.size(); ++f)
            if (features[f].matches(rows[i])) X(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(f)) = 1.0;
    return X;
}

// Minimal-norm least squares for a rank-deficient design.
inline Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    return cod.solve(y);
}

}  // namespace detail

// predictions[i] must correspond to the i-th example of the evaluated split
// (test split, or train followed by test).
inline AdditivityReport additivity(const Eigen::VectorXd& predictions,
                                   const CompositionalDataset& dataset, Split split) {
    if (split == Split::TrainOnly)
        throw ConfigError("additivity is defined on TestOnly or TrainAndTest splits");
    std::vector<CompInput> rows = detail::split_rows(dataset, split);
    if (static_cast<std::size_t>(predictions.size()) != rows.size())
        throw ConfigError("additivity: predictions do not cover the requested split");
    std::vector<ConjInstance> features = detail::training_conj_instances(dataset);

    AdditivityReport rep;
    rep.split_used = split;
    rep.feature_count = static_cast<int>(features.size());
    Eigen::MatrixXd X = detail::one_hot_design(rows, features);
    Eigen::VectorXd w = detail::min_norm_lstsq(X, predictions);
    for (std::size_t f = 0; f < features.size(); ++f)
        rep.coefficients[features[f]] = w[static_cast<Eigen::Index>(f)];
    double mean = predictions.size() > 0 ? predictions.mean() : 0.0;
    double ss_tot = (predictions.array() - mean).square().sum();
    double ss_res = (predictions - X * w).squaredNorm();
    if (ss_tot < 1e-24) {
        // zero-variance target: score by absolute residual instead of shares
        rep.degenerate = true;
        rep.r_squared = ss_res < 1e-24 ? 1.0 : 0.0;
    } else {
        rep.r_squared = 1.0 - ss_res / ss_tot;
    }
    return rep;
}

inline AdditivityReport additivity(const KernelModel& model, const CompositionalDataset& dataset,
                                   Split split) {
    return additivity(predict_values(model, detail::split_rows(dataset, split)), dataset, split);
}

// Coefficient groups for context dependence: the context-feature conjunction
// the active context should use (Right), the one it should ignore (Wrong),
// conjunctions of sensory features only, the bare context, and the full
// triple.
struct CoefficientGroups {
    double right_conj = 0.0;
    double wrong_conj = 0.0;
    double sensory_feat = 0.0;
    double context_only = 0.0;
    double memorization = 0.0;
};

inline CoefficientGroups coefficient_groups(const AdditivityReport& report,
                                            const CompositionalDataset& task) {
    if (task.name != "context_dependence")
        throw ConfigError("coefficient_groups requires a context-dependence dataset");
    double sums[5] = {0, 0, 0, 0, 0};
    long long counts[5] = {0, 0, 0, 0, 0};
    for (auto& [ci, w] : report.coefficients) {
        int slot;
        switch (ci.mask) {
            case 0b001: slot = 3; break;                         // context alone
            case 0b010:
            case 0b100:
            case 0b110: slot = 2; break;                         // sensory features
            case 0b011: slot = ci.values[0] == 0 ? 0 : 1; break; // context + feature 1
            case 0b101: slot = ci.values[0] == 1 ? 0 : 1; break; // context + feature 2
            default: slot = 4; break;                            // full triple
        }
        sums[slot] += std::abs(w);
        ++counts[slot];
    }
    CoefficientGroups g;
    g.right_conj = counts[0] ? sums[0] / static_cast<double>(counts[0]) : 0.0;
    g.wrong_conj = counts[1] ? sums[1] / static_cast<double>(counts[1]) : 0.0;
    g.sensory_feat = counts[2] ? sums[2] / static_cast<double>(counts[2]) : 0.0;
    g.context_only = counts[3] ? sums[3] / static_cast<double>(counts[3]) : 0.0;
    g.memorization = counts[4] ? sums[4] / static_cast<double>(counts[4]) : 0.0;
    return g;
}

struct SlopeEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean squared residual of the line fit
};

// Ordinary least-squares line of prediction against ground truth on a split.
inline SlopeEstimate slope_estimate(const Eigen::VectorXd& predictions,
                                    const CompositionalDataset& dataset, Split split) {
    std::vector<double> truth = detail::split_truth(dataset, split);
    if (static_cast<std::size_t>(predictions.size()) != truth.size())
        throw ConfigError("slope_estimate: predictions do not cover the requested split");
    double lo = truth.empty() ? 0.0 : truth[0], hi = lo;
    for (double t : truth) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (truth.size() < 2 || hi - lo < 1e-12)
        throw ConfigError("slope_estimate: split needs at least 2 distinct ground-truth values");
    const auto n = static_cast<Eigen::Index>(truth.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = truth[static_cast<std::size_t>(i)];
        A(i, 1) = 1.0;
        y[i] = predictions[i];
    }
    Eigen::Vector2d beta = (A.transpose() * A).ldlt().solve(A.transpose() * y);
    SlopeEstimate s;
    s.slope = beta[0];
    s.intercept = beta[1];
    s.residual = std::sqrt((y - A * beta).squaredNorm() / static_cast<double>(n));
    return s;
}

inline SlopeEstimate slope_estimate(const KernelModel& model, const CompositionalDataset& dataset,
                                    Split split) {
    return slope_estimate(predict_values(model, detail::split_rows(dataset, split)), dataset,
                          split);
}

// Fraction of kernel variance not explained by the best compositionally
// structured approximation: sigma_cs^2 / sigma_var^2 over distinct pairs
// (strict upper triangle), where sigma_cs^2 is the mean squared deviation of
// K from its per-overlap-class means and sigma_var^2 the variance of the
// entries. Identical pairs are excluded; their class is trivially structured.
inline double variance_ratio(const Eigen::MatrixXd& X, const std::vector<CompInput>& inputs) {
    if (static_cast<std::size_t>(X.rows()) != inputs.size())
        throw ConfigError("variance_ratio: row count does not match inputs");
    if (inputs.size() < 3) throw ConfigError("variance_ratio needs at least 3 inputs");
    std::map<ConjMask, std::pair<double, long long>> cls;  // sum, count
    std::vector<std::pair<ConjMask, double>> entries;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        for (std::size_t j = i + 1; j < inputs.size(); ++j) {
            ConjMask m = overlap(inputs[i], inputs[j]);
            double k = X.row(static_cast<Eigen::Index>(i))
                           .dot(X.row(static_cast<Eigen::Index>(j)));
            entries.push_back({m, k});
            cls[m].first += k;
            cls[m].second += 1;
        }
    double mean = 0.0;
    for (auto& [m, k] : entries) mean += k;
    mean /= static_cast<double>(entries.size());
    double ss_var = 0.0, ss_cs = 0.0;
    for (auto& [m, k] : entries) {
        double cmean = cls[m].first / static_cast<double>(cls[m].second);
        ss_var += (k - mean) * (k - mean);
        ss_cs += (k - cmean) * (k - cmean);
    }
    if (ss_var < 1e-24) throw NumericalError("variance_ratio: zero-variance kernel");
    return ss_cs / ss_var;
}

}  // namespace compkit
