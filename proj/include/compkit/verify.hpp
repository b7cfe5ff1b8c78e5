#pragma once

// Cross-validation of the closed-form oracles against brute-force solves.
// Every row pits an analytic value against an independently computed one;
// the CLI surfaces the table, tests assert all_pass().

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "compkit/analysis.hpp"
#include "compkit/csv.hpp"
#include "compkit/oracles.hpp"
#include "compkit/solver.hpp"

namespace compkit {

struct VerifyRow {
    std::string check;
    std::string config;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }

    CsvTable to_csv() const {
        CsvTable t;
        t.header = {"check", "config", "error", "tolerance", "pass"};
        for (const auto& r : rows)
            t.rows.push_back({r.check, r.config, format_real(r.error), format_real(r.tolerance),
                              r.pass ? "1" : "0"});
        return t;
    }
};

namespace detail {

inline void push_row(VerifyReport& rep, const std::string& check, const std::string& config,
                     double error, double tolerance) {
    rep.rows.push_back({check, config, error, tolerance, error <= tolerance});
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Distinct values drawn from 1..9 by partial Fisher-Yates.
inline std::vector<int> draw_distinct_positives(Rng& rng, int count) {
    std::vector<int> pool{1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (int i = 0; i < count; ++i) {
        auto j = static_cast<std::size_t>(i) +
                 static_cast<std::size_t>(rng.below(pool.size() - static_cast<std::size_t>(i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
}

inline void verify_addition_slopes(VerifyReport& rep, Rng& rng, int num_configs) {
    for (int i = 0; i < num_configs; ++i) {
        const int p = 1 + i % 4;
        // anchors use the first p/2 value pairs; keep at least one clear pair
        // so the test split has distinct targets
        const int half = std::max(2 + static_cast<int>(rng.below(3)), p / 2 + 1);
        std::vector<int> pos = draw_distinct_positives(rng, half);
        std::vector<double> values{0.0};
        for (int v : pos) {
            values.push_back(v);
            values.push_back(-v);
        }
        std::vector<double> anchors;
        if (p % 2 == 1) anchors.push_back(0.0);
        for (int q = 0; q < p / 2; ++q) {
            anchors.push_back(pos[static_cast<std::size_t>(q)]);
            anchors.push_back(-pos[static_cast<std::size_t>(q)]);
        }
        const double s1 = 0.05 + 0.40 * rng.next_double();

        CompositionalDataset ds = gen_symbolic_addition(values, anchors);
        SimilarityTable table = similarities_from_salience(make_uniform_profile({s1, 1.0 - 2.0 * s1}));
        KernelModel model = fit(ds, table);
        SlopeEstimate est = slope_estimate(model, ds, Split::TestOnly);
        const double m = oracles::addition_slope(s1, p);
        const double error =
            std::max({std::abs(est.slope - m), std::abs(est.intercept), est.residual});
        push_row(rep, "addition_slope",
                 "p=" + std::to_string(p) + " |V|=" + std::to_string(values.size()) +
                     " S1=" + fmt(s1),
                 error, 1e-6);
    }
}

inline void verify_invariance_margins(VerifyReport& rep) {
    CompositionalDataset ds = gen_invariance();
    for (int i = 1; i <= 9; ++i) {
        const double s1 = 0.05 * static_cast<double>(i);
        const double m = oracles::invariance_margin(s1);
        SimilarityTable canonical =
            similarities_from_salience(make_uniform_profile({s1, 1.0 - 2.0 * s1}));
        SimilarityTable shifted = canonical.scaled(0.7);
        for (auto& v : shifted.by_size) v += 0.3;
        const SimilarityTable variants[] = {canonical, canonical.scaled(2.5), shifted};
        const char* names[] = {"canonical", "scaled", "shifted"};
        for (int v = 0; v < 3; ++v) {
            PredictionReport pr = report_predictions(fit(ds, variants[v]), ds.test, "test");
            double error = 0.0;
            for (const auto& row : pr.rows) error = std::max(error, std::abs(row.margin - m));
            push_row(rep, "invariance_margin",
                     "S=" + fmt(s1) + " table=" + names[v], error, 1e-6);
        }
    }
}

inline void verify_partial_exposure_margins(VerifyReport& rep) {
    CompositionalDataset ds = gen_partial_exposure();
    for (int i = 1; i <= 9; ++i) {
        const double s1 = 0.05 * static_cast<double>(i);
        const double m = oracles::partial_exposure_margin(s1);
        SimilarityTable table =
            similarities_from_salience(make_uniform_profile({s1, 1.0 - 2.0 * s1}));
        PredictionReport pr = report_predictions(fit(ds, table), ds.test, "test");
        double error = 0.0;
        for (const auto& row : pr.rows) error = std::max(error, std::abs(row.margin - m));
        push_row(rep, "partial_exposure_margin", "S=" + fmt(s1), error, 1e-6);
    }
}

inline void verify_decomposition_sums(VerifyReport& rep, Rng& rng, int num_configs) {
    for (int i = 0; i < num_configs; ++i) {
        const int C = 2 + i % 2;
        const bool per_set = i % 3 == 0;
        const ConjMask full = full_mask(C);

        SalienceProfile profile;
        if (per_set) {
            std::map<ConjMask, double> s;
            double total = 0.0;
            for (ConjMask j = 1; j <= full; ++j) total += (s[j] = 0.1 + rng.next_double());
            for (auto& [j, v] : s) v /= total;
            profile = make_per_set_profile(C, s);
        } else {
            std::vector<double> s(static_cast<std::size_t>(C));
            double total = 0.0;
            for (int k = 1; k <= C; ++k) {
                s[static_cast<std::size_t>(k) - 1] = 0.1 + rng.next_double();
                total += static_cast<double>(detail::binom(C, k)) *
                         s[static_cast<std::size_t>(k) - 1];
            }
            for (auto& v : s) v /= total;
            profile = make_uniform_profile(s);
        }

        ComponentSpace space = make_space(std::vector<int>(static_cast<std::size_t>(C), 3));
        CompositionalDataset ds;
        ds.name = "random_regression";
        ds.space = space;
        ds.kind = TaskKind::Regression;
        for (const auto& z : enumerate_grid(space)) {
            Example e{z, rng.uniform(-1.0, 1.0)};
            (rng.next_double() < 0.5 ? ds.train : ds.test).push_back(e);
        }
        if (ds.train.size() < 2 || ds.test.empty()) {
            --i;
            continue;
        }

        KernelModel model = fit(ds, similarities_from_salience(profile));
        double error = 0.0;
        std::size_t checked = 0;
        for (const auto& e : ds.test) {
            if (checked++ == 5) break;
            double sum = 0.0;
            for (auto& [j, part] : oracles::conjunctionwise_decompose(model, e.z)) sum += part;
            error = std::max(error, std::abs(sum - predict_value(model, e.z)));
        }
        push_row(rep, "decomposition_sum",
                 "C=" + std::to_string(C) + (per_set ? " per_set" : " uniform") +
                     " n_train=" + std::to_string(ds.train.size()),
                 error, 1e-8);
    }
}

inline void verify_salience_roundtrips(VerifyReport& rep, Rng& rng) {
    for (int C = 2; C <= 4; ++C) {
        std::vector<double> s(static_cast<std::size_t>(C));
        double total = 0.0;
        for (int k = 1; k <= C; ++k) {
            s[static_cast<std::size_t>(k) - 1] = 0.05 + rng.next_double();
            total += static_cast<double>(detail::binom(C, k)) * s[static_cast<std::size_t>(k) - 1];
        }
        for (auto& v : s) v /= total;
        SalienceProfile p = make_uniform_profile(s);
        SalienceProfile back = salience_from_similarities(similarities_from_salience(p));
        double error = 0.0;
        for (int k = 1; k <= C; ++k)
            error = std::max(error, std::abs(back.per_size[static_cast<std::size_t>(k) - 1] -
                                             p.per_size[static_cast<std::size_t>(k) - 1]));
        push_row(rep, "salience_roundtrip", "C=" + std::to_string(C) + " uniform", error, 1e-12);

        std::map<ConjMask, double> sp;
        double ptotal = 0.0;
        for (ConjMask j = 1; j <= full_mask(C); ++j) ptotal += (sp[j] = 0.05 + rng.next_double());
        for (auto& [j, v] : sp) v /= ptotal;
        SalienceProfile q = make_per_set_profile(C, sp);
        SalienceProfile qback = salience_from_similarities(similarities_from_salience(q));
        double qerror = 0.0;
        for (auto& [j, v] : sp) qerror = std::max(qerror, std::abs(qback.value(j) - v));
        push_row(rep, "salience_roundtrip", "C=" + std::to_string(C) + " per_set", qerror, 1e-12);
    }
}

}  // namespace detail

inline VerifyReport verify_oracles(std::uint64_t seed = 2026) {
    VerifyReport rep;
    Rng rng(seed);
    detail::verify_addition_slopes(rep, rng, 50);
    detail::verify_invariance_margins(rep);
    detail::verify_partial_exposure_margins(rep);
    detail::verify_decomposition_sums(rep, rng, 10);
    detail::verify_salience_roundtrips(rep, rng);
    return rep;
}

}  // namespace compkit
