#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "task_space.hpp"

namespace compkit {

namespace detail {

inline long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// Proper non-empty submasks of m, plus the empty mask.
inline std::vector<ConjMask> strict_submasks(ConjMask m) {
    std::vector<ConjMask> out;
    for (ConjMask j = (m - 1) & m;; j = (j - 1) & m) {
        out.push_back(j);
        if (j == 0) break;
    }
    return out;
}

}  // namespace detail

// Normalized unique contribution of each conjunction to the kernel. Uniform
// profiles store one value per conjunction size k = 1..C (the per-conjunction
// convention: sum_k binom(C,k) * S(k;C) = 1). Generalized profiles store one
// value per non-empty conjunction set J.
struct SalienceProfile {
    int num_components = 0;
    std::vector<double> per_size;            // index k-1 holds S(k;C); empty if per-set
    std::map<ConjMask, double> per_set;      // S(J) for non-empty J; empty if uniform

    bool is_uniform() const { return per_set.empty(); }

    double value(ConjMask j) const {
        if (is_uniform()) return per_size[static_cast<std::size_t>(std::popcount(j)) - 1];
        auto it = per_set.find(j);
        return it == per_set.end() ? 0.0 : it->second;
    }
};

inline SalienceProfile make_uniform_profile(std::vector<double> s_by_size) {
    SalienceProfile p;
    p.num_components = static_cast<int>(s_by_size.size());
    p.per_size = std::move(s_by_size);
    if (p.num_components < 1) throw ConfigError("salience profile needs C >= 1");
    double total = 0.0;
    for (int k = 1; k <= p.num_components; ++k) {
        double v = p.per_size[k - 1];
        if (v < -1e-12) throw ConfigError("salience values must be non-negative");
        total += static_cast<double>(detail::binom(p.num_components, k)) * v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("salience profile must sum to 1 over non-empty conjunctions");
    return p;
}

inline SalienceProfile make_per_set_profile(int num_components, std::map<ConjMask, double> s) {
    SalienceProfile p;
    p.num_components = num_components;
    p.per_set = std::move(s);
    double total = 0.0;
    for (auto& [j, v] : p.per_set) {
        if (j == 0 || j > full_mask(num_components))
            throw ConfigError("per-set salience keys must be non-empty conjunctions of the space");
        if (v < -1e-12) throw ConfigError("salience values must be non-negative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("salience profile must sum to 1 over non-empty conjunctions");
    return p;
}

// Similarity kappa per overlap class, indexed by overlap count (uniform) or by
// overlap set (generalized).
struct SimilarityTable {
    int num_components = 0;
    std::vector<double> by_size;             // index k holds kappa(k), k = 0..C; empty if per-set
    std::map<ConjMask, double> by_set;       // kappa(J) for every J including 0; empty if uniform

    bool is_uniform() const { return by_set.empty(); }

    double value(ConjMask j) const {
        if (is_uniform()) return by_size[static_cast<std::size_t>(std::popcount(j))];
        return by_set.at(j);
    }

    SimilarityTable scaled(double c) const {
        SimilarityTable t = *this;
        for (auto& v : t.by_size) v *= c;
        for (auto& [j, v] : t.by_set) v *= c;
        return t;
    }
};

inline SimilarityTable make_uniform_table(std::vector<double> kappa_by_size) {
    SimilarityTable t;
    t.num_components = static_cast<int>(kappa_by_size.size()) - 1;
    t.by_size = std::move(kappa_by_size);
    if (t.num_components < 1) throw ConfigError("similarity table needs C >= 1");
    return t;
}

// kappa(0) = 0 and kappa(J) = sum of S(J') over non-empty J' contained in J,
// so identical trials have similarity exactly 1 (canonical normalization).
inline SimilarityTable similarities_from_salience(const SalienceProfile& profile) {
    SimilarityTable t;
    t.num_components = profile.num_components;
    const int C = profile.num_components;
    if (profile.is_uniform()) {
        t.by_size.assign(static_cast<std::size_t>(C) + 1, 0.0);
        for (int k = 1; k <= C; ++k) {
            double kap = 0.0;
            for (int j = 1; j <= k; ++j)
                kap += static_cast<double>(detail::binom(k, j)) * profile.per_size[j - 1];
            t.by_size[k] = kap;
        }
    } else {
        for (ConjMask j = 0; j <= full_mask(C); ++j) {
            double kap = 0.0;
            for (ConjMask sub = j;; sub = (sub - 1) & j) {
                if (sub != 0) kap += profile.value(sub);
                if (sub == 0) break;
            }
            t.by_set[j] = kap;
        }
    }
    return t;
}

// The recursion S_bar(empty) = kappa(empty), S_bar(J) = kappa(J) minus all
// strictly contained S_bar, normalized over non-empty conjunctions.
inline SalienceProfile salience_from_similarities(const SimilarityTable& table) {
    const int C = table.num_components;
    std::map<ConjMask, double> sbar;
    sbar[0] = table.value(0);
    for (int size = 1; size <= C; ++size)
        for (ConjMask j = 1; j <= full_mask(C); ++j) {
            if (std::popcount(j) != size) continue;
            double v = table.value(j);
            for (ConjMask sub : detail::strict_submasks(j)) v -= sbar.at(sub);
            sbar[j] = v;
        }
    double total = 0.0;
    for (auto& [j, v] : sbar)
        if (j != 0) total += v;
    if (std::abs(total) < 1e-300)
        throw NumericalError("degenerate similarity table: zero total unnormalized salience");
    SalienceProfile p;
    p.num_components = C;
    if (table.is_uniform()) {
        p.per_size.assign(static_cast<std::size_t>(C), 0.0);
        for (int k = 1; k <= C; ++k) {
            ConjMask rep = (ConjMask(1) << k) - 1;
            p.per_size[k - 1] = sbar.at(rep) / total;
        }
    } else {
        for (auto& [j, v] : sbar)
            if (j != 0) p.per_set[j] = v / total;
    }
    return p;
}

// K[i][j] = kappa(overlap(z_i, z_j)), with a PSD check: eigenvalues must not
// fall below -1e-10 times the largest eigenvalue.
inline Eigen::MatrixXd gram(const std::vector<CompInput>& inputs, const SimilarityTable& table,
                            bool check_psd = true) {
    const auto n = static_cast<Eigen::Index>(inputs.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            double v = table.value(overlap(inputs[static_cast<std::size_t>(i)],
                                           inputs[static_cast<std::size_t>(j)]));
            K(i, j) = v;
            K(j, i) = v;
        }
    if (check_psd && n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
        double lo = es.eigenvalues().minCoeff();
        double hi = es.eigenvalues().maxCoeff();
        if (lo < -1e-10 * std::max(hi, 1e-300))
            throw NumericalError("similarity table yields a non-PSD Gram matrix (min eigenvalue " +
                                 std::to_string(lo) + ")");
    }
    return K;
}

inline Eigen::MatrixXd cross_gram(const std::vector<CompInput>& rows,
                                  const std::vector<CompInput>& cols,
                                  const SimilarityTable& table) {
    Eigen::MatrixXd K(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = 0; j < K.cols(); ++j)
            K(i, j) = table.value(overlap(rows[static_cast<std::size_t>(i)],
                                          cols[static_cast<std::size_t>(j)]));
    return K;
}

// Estimates a salience profile from raw representation vectors: average the
// empirical kernel X X^T within each overlap class (pairs i <= j, so the
// identical class comes from the diagonal), then run the salience recursion.
inline SalienceProfile empirical_salience(const Eigen::MatrixXd& X,
                                          const std::vector<CompInput>& inputs) {
    if (inputs.size() < 2) throw ConfigError("empirical_salience needs n >= 2 inputs");
    if (static_cast<std::size_t>(X.rows()) != inputs.size())
        throw ConfigError("empirical_salience: row count does not match inputs");
    const int C = static_cast<int>(inputs[0].size());
    std::map<ConjMask, double> sum;
    std::map<ConjMask, long long> count;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        for (std::size_t j = i; j < inputs.size(); ++j) {
            ConjMask m = overlap(inputs[i], inputs[j]);
            sum[m] += X.row(static_cast<Eigen::Index>(i))
                          .dot(X.row(static_cast<Eigen::Index>(j)));
            ++count[m];
        }
    SimilarityTable t;
    t.num_components = C;
    std::vector<ConjMask> missing;
    for (ConjMask j = 0; j <= full_mask(C); ++j) {
        auto it = sum.find(j);
        if (it == sum.end()) {
            missing.push_back(j);
            continue;
        }
        t.by_set[j] = it->second / static_cast<double>(count.at(j));
    }
    if (!missing.empty()) {
        std::string what = "empirical_salience: no input pair realizes overlap class(es)";
        for (ConjMask m : missing) what += " " + std::to_string(m);
        throw ConfigError(what);
    }
    SalienceProfile per_set = salience_from_similarities(t);
    // collapse to a uniform profile when the per-set values agree per size
    std::vector<double> by_size(static_cast<std::size_t>(C), 0.0);
    bool uniform = true;
    for (int k = 1; k <= C && uniform; ++k) {
        double ref = 0.0;
        bool first = true;
        for (auto& [j, v] : per_set.per_set) {
            if (std::popcount(j) != k) continue;
            if (first) {
                ref = v;
                first = false;
            } else if (std::abs(v - ref) > 1e-9 * std::max(1.0, std::abs(ref))) {
                uniform = false;
                break;
            }
        }
        by_size[k - 1] = ref;
    }
    if (!uniform) return per_set;
    SalienceProfile p;
    p.num_components = C;
    p.per_size = std::move(by_size);
    return p;
}

// Mean salience over all conjunctions of a given size (identity for uniform
// profiles).
inline double mean_salience_by_size(const SalienceProfile& p, int k) {
    if (k < 1 || k > p.num_components) throw ConfigError("conjunction size out of range");
    if (p.is_uniform()) return p.per_size[static_cast<std::size_t>(k) - 1];
    double sum = 0.0;
    long long n = 0;
    for (auto& [j, v] : p.per_set)
        if (std::popcount(j) == k) {
            sum += v;
            ++n;
        }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

// Normalized arc-cosine layer map for a (leaky) ReLU network:
// k(u) = (1-A)^2/(2 pi) * (sqrt(1-u^2) + (pi - acos(u)) u) + A u, divided by
// its value at u = 1, which is (1 + A^2)/2.
inline double arccos_step(double u, double leak) {
    if (leak < 0.0 || leak >= 1.0) throw ConfigError("leak must lie in [0,1)");
    if (std::abs(u) > 1.0 + 1e-12) throw NumericalError("arccos_step: |u| > 1");
    u = std::clamp(u, -1.0, 1.0);
    const double pi = 3.14159265358979323846;
    double a = leak;
    double k = (1.0 - a) * (1.0 - a) / (2.0 * pi) *
                   (std::sqrt(std::max(0.0, 1.0 - u * u)) + (pi - std::acos(u)) * u) +
               a * u;
    return k / ((1.0 + a * a) / 2.0);
}

// Per-layer salience of a deep random (leaky) ReLU network on top of a
// representation with the given salience profile. Each layer converts the
// profile to canonical similarities, applies the arc-cosine map elementwise,
// and converts back; entry 0 of the result is the input profile (depth 0).
inline std::vector<SalienceProfile> depth_salience(const SalienceProfile& input_profile,
                                                   int depth, double leak) {
    if (depth < 0) throw ConfigError("depth must be non-negative");
    std::vector<SalienceProfile> layers;
    layers.reserve(static_cast<std::size_t>(depth) + 1);
    layers.push_back(input_profile);
    for (int l = 0; l < depth; ++l) {
        SimilarityTable t = similarities_from_salience(layers.back());
        for (auto& v : t.by_size) v = arccos_step(v, leak);
        for (auto& [j, v] : t.by_set) v = arccos_step(v, leak);
        layers.push_back(salience_from_similarities(t));
    }
    return layers;
}

}  // namespace compkit
