#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "task_space.hpp"

namespace compkit {

// Minimal-norm kernel interpolator in dual form: f(x) = sum_i a_i K(x, x_i)
// with a = K^-1 y.
struct KernelModel {
    ComponentSpace space;
    TaskKind kind = TaskKind::Classification;
    std::vector<CompInput> train_inputs;
    Eigen::VectorXd train_targets;
    Eigen::VectorXd dual_coeffs;
    SimilarityTable table;
};

struct PredictionRow {
    CompInput z;
    double truth = 0.0;
    double prediction = 0.0;
    double margin = 0.0;         // y * yhat, classification only
    double squared_error = 0.0;  // regression only
};

struct PredictionReport {
    std::string split;
    TaskKind kind = TaskKind::Classification;
    std::vector<PredictionRow> rows;
    double accuracy = 0.0;  // classification, sign(0) counted incorrect
    int ties = 0;           // predictions exactly at zero
    double mse = 0.0;       // regression

    Eigen::VectorXd predictions() const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] = rows[static_cast<std::size_t>(i)].prediction;
        return v;
    }
};

namespace detail {

// Solves (K + jitter I) a = y with the unconditional relative jitter
// 1e-12 * trace(K) / n, via LDLT.
inline Eigen::VectorXd solve_dual(const Eigen::MatrixXd& K, const Eigen::VectorXd& y) {
    const auto n = K.rows();
    double jitter = 1e-12 * K.trace() / static_cast<double>(n);
    Eigen::MatrixXd Kj = K + jitter * Eigen::MatrixXd::Identity(n, n);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Kj);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("dual solve failed: LDLT factorization did not succeed");
    Eigen::VectorXd a = ldlt.solve(y);
    double resid = (K * a - y).cwiseAbs().maxCoeff();
    double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
    if (resid > 1e-8 * scale) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kj, Eigen::EigenvaluesOnly);
        double rcond = es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
        throw NumericalError(
            "dual solve failed the interpolation contract (max residual " +
            std::to_string(resid) + ", reciprocal condition estimate " + std::to_string(rcond) +
            ")");
    }
    return a;
}

}  // namespace detail

// Fits the minimal-norm interpolant on the training split.
inline KernelModel fit(const CompositionalDataset& dataset, const SimilarityTable& table) {
    if (dataset.train.empty()) throw ConfigError("fit: empty training split");
    KernelModel m;
    m.space = dataset.space;
    m.kind = dataset.kind;
    m.train_inputs = dataset.train_inputs();
    m.train_targets.resize(static_cast<Eigen::Index>(dataset.train.size()));
    for (Eigen::Index i = 0; i < m.train_targets.size(); ++i)
        m.train_targets[i] = dataset.train[static_cast<std::size_t>(i)].target;
    m.table = table;
    Eigen::MatrixXd K = gram(m.train_inputs, table);
    m.dual_coeffs = detail::solve_dual(K, m.train_targets);
    return m;
}

// Low-level fit on an explicit (empirical) Gram matrix; used for random
// representations where no similarity table exists.
inline Eigen::VectorXd fit_dual_on_gram(const Eigen::MatrixXd& K, const Eigen::VectorXd& y) {
    return detail::solve_dual(K, y);
}

inline Eigen::VectorXd predict_values(const KernelModel& model,
                                      const std::vector<CompInput>& inputs) {
    Eigen::MatrixXd Kx = cross_gram(inputs, model.train_inputs, model.table);
    return Kx * model.dual_coeffs;
}

inline double predict_value(const KernelModel& model, const CompInput& z) {
    return predict_values(model, {z})[0];
}

inline PredictionReport report_predictions(const KernelModel& model,
                                           const std::vector<Example>& examples,
                                           const std::string& split) {
    PredictionReport r;
    r.split = split;
    r.kind = model.kind;
    std::vector<CompInput> inputs;
    inputs.reserve(examples.size());
    for (const auto& e : examples) inputs.push_back(e.z);
    Eigen::VectorXd yhat = examples.empty() ? Eigen::VectorXd() : predict_values(model, inputs);
    int correct = 0;
    double sse = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        PredictionRow row;
        row.z = examples[i].z;
        row.truth = examples[i].target;
        row.prediction = yhat[static_cast<Eigen::Index>(i)];
        if (model.kind == TaskKind::Classification) {
            row.margin = row.truth * row.prediction;
            if (row.prediction == 0.0) ++r.ties;
            if (row.prediction != 0.0 &&
                ((row.prediction > 0.0) == (row.truth > 0.0)))
                ++correct;
        } else {
            row.squared_error = (row.prediction - row.truth) * (row.prediction - row.truth);
            sse += row.squared_error;
        }
        r.rows.push_back(std::move(row));
    }
    if (!examples.empty()) {
        r.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
        r.mse = sse / static_cast<double>(examples.size());
    }
    return r;
}

inline double test_accuracy(const CompositionalDataset& ds, const SimilarityTable& table) {
    KernelModel m = fit(ds, table);
    return report_predictions(m, ds.test, "test").accuracy;
}

}  // namespace compkit
