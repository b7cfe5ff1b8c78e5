#pragma once

#include <bit>
#include <cmath>
#include <map>
#include <vector>

#include "geometry.hpp"
#include "solver.hpp"
#include "task_space.hpp"

// Closed-form results, implemented independently of the solver so either side
// can validate the other. Nothing here calls fit or predict.
namespace compkit::oracles {

// Test-set slope of the minimal-norm model on symbolic addition when the
// anchor set has p mean-zero values: m = p S / (1 + (p-2) S) with S = S(1;2).
inline double addition_slope(double s1, int p) {
    if (p < 1) throw ConfigError("addition_slope: anchor count must be >= 1");
    if (s1 <= 0.0 || s1 > 0.5) throw ConfigError("addition_slope: S(1;2) must lie in (0, 0.5]");
    double denom = 1.0 + static_cast<double>(p - 2) * s1;
    if (denom <= 0.0) throw ConfigError("addition_slope: denominator 1 + (p-2) S is not positive");
    return static_cast<double>(p) * s1 / denom;
}

// Test margin on the invariance task: m = S / (1 - S). Invariant to the
// kernel parameterization.
inline double invariance_margin(double s1) {
    if (s1 <= 0.0 || s1 > 0.5) throw ConfigError("invariance_margin: S must lie in (0, 0.5]");
    return s1 / (1.0 - s1);
}

// Test margin on the partial-exposure task: m = 2 S^2 / (1 - 2 S^2), valid
// for kernels with kappa(0) = 0.
inline double partial_exposure_margin(double s1) {
    if (s1 <= 0.0 || s1 * s1 >= 0.5)
        throw ConfigError("partial_exposure_margin: S must lie in (0, 1/sqrt(2))");
    return 2.0 * s1 * s1 / (1.0 - 2.0 * s1 * s1);
}

// The two delta conventions in the source derivations share a symbol but not
// a meaning; they are kept in separate namespaces on purpose.

namespace subsetwise {

// delta(empty) = kappa(empty); delta(J) = kappa(J) - sum over strict subsets.
inline std::map<ConjMask, double> delta_recursion(const SimilarityTable& table) {
    const int C = table.num_components;
    std::map<ConjMask, double> delta;
    delta[0] = table.value(0);
    for (int size = 1; size <= C; ++size)
        for (ConjMask j = 1; j <= full_mask(C); ++j) {
            if (std::popcount(j) != size) continue;
            double v = table.value(j);
            for (ConjMask sub : compkit::detail::strict_submasks(j)) v -= delta.at(sub);
            delta[j] = v;
        }
    return delta;
}

}  // namespace subsetwise

namespace baseline {

// Baseline-relative similarities used by the slope derivation: both deltas
// subtract kappa(0) directly, with no recursion.
inline double delta1(double kappa0, double kappa1) { return kappa1 - kappa0; }
inline double delta2(double kappa0, double kappa2) { return kappa2 - kappa0; }

}  // namespace baseline

// Conjunction-wise decomposition of a fitted model's prediction at z:
// f_J(z) = delta_J * sum of dual coefficients of training inputs matching z
// on J. The values sum to the model's prediction at z.
inline std::map<ConjMask, double> conjunctionwise_decompose(const KernelModel& model,
                                                     const CompInput& z) {
    std::map<ConjMask, double> delta = subsetwise::delta_recursion(model.table);
    std::map<ConjMask, double> parts;
    const ConjMask full = full_mask(model.space.num_components);
    for (ConjMask j = 0; j <= full; ++j) {
        double coeff_sum = 0.0;
        for (std::size_t i = 0; i < model.train_inputs.size(); ++i)
            if ((overlap(z, model.train_inputs[i]) & j) == j)
                coeff_sum += model.dual_coeffs[static_cast<Eigen::Index>(i)];
        parts[j] = delta.at(j) * coeff_sum;
    }
    return parts;
}

struct DeepLimitResult {
    std::vector<SalienceProfile> trajectory;
    bool verdict = false;
};

// Iterates the arc-cosine depth recursion from a multi-hot input profile.
// Verdict: the full conjunction carries salience above 1 - eps at the given
// depth and every partial conjunction is below eps, with eps = 0.01.
inline DeepLimitResult deep_limit_check(int num_components, double leak, int depth) {
    if (num_components < 1) throw ConfigError("deep_limit_check needs C >= 1");
    std::vector<double> s(static_cast<std::size_t>(num_components), 0.0);
    s[0] = 1.0 / static_cast<double>(num_components);
    DeepLimitResult r;
    r.trajectory = depth_salience(make_uniform_profile(s), depth, leak);
    const SalienceProfile& last = r.trajectory.back();
    const double eps = 0.01;
    r.verdict = mean_salience_by_size(last, num_components) > 1.0 - eps;
    for (int k = 1; k < num_components && r.verdict; ++k)
        if (std::abs(mean_salience_by_size(last, k)) >= eps) r.verdict = false;
    return r;
}

}  // namespace compkit::oracles
