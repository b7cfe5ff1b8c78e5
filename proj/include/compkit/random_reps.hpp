#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "solver.hpp"
#include "task_space.hpp"

namespace compkit {

// Random Gaussian per-conjunction representation: x(z) is the sum over all
// conjunctions J of a vector x_J[z_J] with i.i.d. N(0, sigma_{|J|}^2)
// coordinates, drawn once per distinct (J, z_J). Coordinates are not scaled
// by 1/sqrt(d); only the ratios sigma_k^2 d matter for salience.
struct GaussianRepSpec {
    ComponentSpace space;
    int dim = 0;
    std::map<int, double> sigma_by_size;        // k -> sigma_k, k = 0..C
    std::map<ConjMask, double> sigma_by_set;    // per-conjunction override
    std::uint64_t seed = 0;

    double sigma(ConjMask j) const {
        auto o = sigma_by_set.find(j);
        if (o != sigma_by_set.end()) return o->second;
        auto it = sigma_by_size.find(std::popcount(j));
        return it == sigma_by_size.end() ? 0.0 : it->second;
    }
};

// Sampling is keyed on the sorted set of (J, z_J) instances appearing in the
// inputs, so identical (spec, seed) pairs reproduce matrices bit-identically
// regardless of input order.
inline Eigen::MatrixXd sample_representation(const GaussianRepSpec& spec,
                                             const std::vector<CompInput>& inputs) {
    if (spec.dim < 1) throw ConfigError("representation dimension must be >= 1");
    for (auto& [k, s] : spec.sigma_by_size)
        if (s < 0.0) throw ConfigError("sigma values must be non-negative");
    for (auto& [j, s] : spec.sigma_by_set)
        if (s < 0.0) throw ConfigError("sigma values must be non-negative");
    const ConjMask full = full_mask(spec.space.num_components);
    std::map<std::pair<ConjMask, std::vector<int>>, Eigen::VectorXd> vecs;
    for (const auto& z : inputs) {
        if (!spec.space.contains(z)) throw ConfigError("input outside the representation space");
        for (ConjMask j = 0; j <= full; ++j) {
            if (spec.sigma(j) == 0.0) continue;
            std::vector<int> zj;
            for (int c = 0; c < spec.space.num_components; ++c)
                if (j & (ConjMask(1) << c)) zj.push_back(z[c]);
            vecs.try_emplace({j, std::move(zj)}, Eigen::VectorXd());
        }
    }
    Rng rng(spec.seed);
    for (auto& [key, v] : vecs) {
        double s = spec.sigma(key.first);
        v.resize(spec.dim);
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = s * rng.normal();
    }
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inputs.size()), spec.dim);
    for (std::size_t r = 0; r < inputs.size(); ++r) {
        const auto& z = inputs[r];
        for (ConjMask j = 0; j <= full; ++j) {
            if (spec.sigma(j) == 0.0) continue;
            std::vector<int> zj;
            for (int c = 0; c < spec.space.num_components; ++c)
                if (j & (ConjMask(1) << c)) zj.push_back(z[c]);
            X.row(static_cast<Eigen::Index>(r)) += vecs.at({j, zj});
        }
    }
    return X;
}

// Expected per-conjunction salience of a per-size spec: S(k;C) is
// sigma_k^2 over the total conjunction energy (d cancels).
inline SalienceProfile expected_salience(const GaussianRepSpec& spec) {
    if (!spec.sigma_by_set.empty())
        throw ConfigError("expected_salience supports per-size sigma specs only");
    const int C = spec.space.num_components;
    double total = 0.0;
    std::vector<double> s(static_cast<std::size_t>(C), 0.0);
    for (int k = 1; k <= C; ++k) {
        auto it = spec.sigma_by_size.find(k);
        double v = it == spec.sigma_by_size.end() ? 0.0 : it->second * it->second;
        s[static_cast<std::size_t>(k) - 1] = v;
        total += static_cast<double>(detail::binom(C, k)) * v;
    }
    if (total <= 0.0) throw ConfigError("expected_salience: all sigma values are zero");
    for (auto& v : s) v /= total;
    return make_uniform_profile(s);
}

// Inverse helper: sigma_k = sqrt(S(k;C)) realizes the requested expected
// salience profile (approximation valid for large d).
inline std::map<int, double> sigma_for_expected_salience(const SalienceProfile& target) {
    if (!target.is_uniform())
        throw ConfigError("sigma targeting supports uniform profiles only");
    std::map<int, double> sigma;
    for (int k = 1; k <= target.num_components; ++k)
        sigma[k] = std::sqrt(std::max(0.0, target.per_size[static_cast<std::size_t>(k) - 1]));
    return sigma;
}

struct AveragedBehavior {
    Eigen::VectorXd mean_train_predictions;
    Eigen::VectorXd mean_test_predictions;
    Eigen::VectorXd test_prediction_stderr;
    std::vector<double> per_seed_test_accuracy;  // classification tasks
    std::vector<std::uint64_t> skipped_seeds;
    int seeds_used = 0;

    double mean_test_accuracy() const {
        if (per_seed_test_accuracy.empty()) return 0.0;
        double s = 0.0;
        for (double a : per_seed_test_accuracy) s += a;
        return s / static_cast<double>(per_seed_test_accuracy.size());
    }
};

// Fits one kernel model per seed on the empirical Gram of a fresh random
// representation and averages predictions tuple-wise. Seeds whose empirical
// Gram cannot be solved are skipped and recorded.
inline AveragedBehavior averaged_behavior(GaussianRepSpec spec, const CompositionalDataset& task,
                                          int num_seeds) {
    if (num_seeds < 1) throw ConfigError("averaged_behavior needs num_seeds >= 1");
    if (!(spec.space == task.space))
        throw ConfigError("representation space does not match the task space");
    std::vector<CompInput> all_inputs = task.train_inputs();
    const auto n_train = static_cast<Eigen::Index>(all_inputs.size());
    for (const auto& e : task.test) all_inputs.push_back(e.z);
    const auto n_test = static_cast<Eigen::Index>(task.test.size());
    Eigen::VectorXd y(n_train);
    for (Eigen::Index i = 0; i < n_train; ++i) y[i] = task.train[static_cast<std::size_t>(i)].target;

    AveragedBehavior out;
    out.mean_train_predictions = Eigen::VectorXd::Zero(n_train);
    out.mean_test_predictions = Eigen::VectorXd::Zero(n_test);
    Eigen::VectorXd test_sq = Eigen::VectorXd::Zero(n_test);
    const std::uint64_t base_seed = spec.seed;
    for (int s = 0; s < num_seeds; ++s) {
        spec.seed = base_seed + static_cast<std::uint64_t>(s);
        Eigen::MatrixXd X = sample_representation(spec, all_inputs);
        Eigen::MatrixXd K = X * X.transpose();
        Eigen::VectorXd a;
        try {
            a = fit_dual_on_gram(K.topLeftCorner(n_train, n_train), y);
        } catch (const NumericalError&) {
            out.skipped_seeds.push_back(spec.seed);
            continue;
        }
        Eigen::VectorXd pred = K.leftCols(n_train) * a;
        out.mean_train_predictions += pred.head(n_train);
        out.mean_test_predictions += pred.tail(n_test);
        test_sq += pred.tail(n_test).cwiseAbs2();
        if (task.kind == TaskKind::Classification && n_test > 0) {
            int correct = 0;
            for (Eigen::Index i = 0; i < n_test; ++i) {
                double yhat = pred[n_train + i];
                double truth = task.test[static_cast<std::size_t>(i)].target;
                if (yhat != 0.0 && ((yhat > 0.0) == (truth > 0.0))) ++correct;
            }
            out.per_seed_test_accuracy.push_back(static_cast<double>(correct) /
                                                 static_cast<double>(n_test));
        }
        ++out.seeds_used;
    }
    if (out.seeds_used == 0) throw NumericalError("averaged_behavior: every seed was skipped");
    double m = static_cast<double>(out.seeds_used);
    out.mean_train_predictions /= m;
    out.mean_test_predictions /= m;
    out.test_prediction_stderr = Eigen::VectorXd::Zero(n_test);
    if (out.seeds_used > 1)
        for (Eigen::Index i = 0; i < n_test; ++i) {
            double var = (test_sq[i] - m * out.mean_test_predictions[i] *
                                           out.mean_test_predictions[i]) /
                         (m - 1.0);
            out.test_prediction_stderr[i] = std::sqrt(std::max(0.0, var) / m);
        }
    return out;
}

}  // namespace compkit
