// compkit command line. Every subcommand reads a key = value config, writes
// CSV artifacts plus a manifest into --out, and prints a short summary.
// Exit codes: 0 success, 1 usage or config error, 2 numerical failure,
// 3 oracle mismatch.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "compkit/analysis.hpp"
#include "compkit/config.hpp"
#include "compkit/csv.hpp"
#include "compkit/manifest.hpp"
#include "compkit/oracles.hpp"
#include "compkit/random_reps.hpp"
#include "compkit/solver.hpp"
#include "compkit/svg.hpp"
#include "compkit/task_space.hpp"
#include "compkit/verify.hpp"

namespace {

using namespace compkit;

struct Common {
    std::string config_path;
    std::string out = "out";
    std::string seed_str;
    int jobs = 1;
    bool no_plots = false;
    std::string command_line;
};

const std::set<std::string> kTaskKeys = {"task",       "values",         "anchors",
                                         "variant",    "items_per_class", "num_classes",
                                         "held_out",   "num_items",       "op",
                                         "truth",      "seed"};
const std::set<std::string> kSalienceKeys = {"salience", "salience_sets", "kappa"};

std::set<std::string> unite(std::set<std::string> a, const std::set<std::string>& b) {
    a.insert(b.begin(), b.end());
    return a;
}

Config load_config(const Common& c) { return Config::parse(read_file(c.config_path)); }

std::uint64_t effective_seed(const Config& cfg, const Common& c) {
    if (!c.seed_str.empty()) {
        try {
            return std::stoull(c.seed_str);
        } catch (const std::exception&) {
            throw ConfigError("--seed must be a non-negative integer");
        }
    }
    if (cfg.has("seed")) return static_cast<std::uint64_t>(cfg.get_int("seed"));
    return 0;
}

long long get_int_or(const Config& cfg, const std::string& key, long long fallback) {
    return cfg.has(key) ? cfg.get_int(key) : fallback;
}

std::vector<std::pair<int, int>> pair_groups(const Config& cfg, const std::string& key) {
    std::vector<std::pair<int, int>> out;
    for (const auto& g : cfg.get_real_groups(key)) {
        if (g.size() != 2 || g[0] != std::floor(g[0]) || g[1] != std::floor(g[1]))
            throw ConfigError("config key '" + key + "' wants integer pairs like 0,2;3,5");
        out.push_back({static_cast<int>(g[0]), static_cast<int>(g[1])});
    }
    return out;
}

CompositionalDataset task_from_config(const Config& cfg, std::uint64_t seed) {
    const std::string task = cfg.get("task");
    if (task == "symbolic_addition")
        return gen_symbolic_addition(cfg.get_reals("values"), cfg.get_reals("anchors"));
    if (task == "context_dependence") {
        long long v = cfg.get_int("variant");
        if (v < 1 || v > 3) throw ConfigError("context dependence variant must be 1, 2, or 3");
        return gen_context_dependence(static_cast<CdVariant>(v));
    }
    if (task == "transitive_equivalence") {
        std::vector<std::pair<int, int>> held = {{0, 2}, {3, 5}};
        if (cfg.has("held_out")) held = pair_groups(cfg, "held_out");
        return gen_transitive_equivalence(static_cast<int>(get_int_or(cfg, "items_per_class", 3)),
                                          static_cast<int>(get_int_or(cfg, "num_classes", 2)),
                                          held, seed);
    }
    if (task == "invariance") return gen_invariance();
    if (task == "partial_exposure") return gen_partial_exposure();
    if (task == "transitive_ordering")
        return gen_transitive_ordering(static_cast<int>(cfg.get_int("num_items")));
    if (task == "logical_op") {
        const std::string opname = cfg.get("op");
        LogicalOp op;
        if (opname == "AND")
            op = LogicalOp::AND;
        else if (opname == "OR")
            op = LogicalOp::OR;
        else if (opname == "XOR")
            op = LogicalOp::XOR;
        else
            throw ConfigError("op must be AND, OR, or XOR");
        std::vector<bool> truth;
        for (double v : cfg.get_reals("truth")) {
            if (v != 0.0 && v != 1.0) throw ConfigError("truth must be a list of 0/1 values");
            truth.push_back(v == 1.0);
        }
        std::vector<std::pair<int, int>> held;
        if (cfg.has("held_out")) held = pair_groups(cfg, "held_out");
        return gen_logical_op(op, truth, held);
    }
    throw ConfigError("unknown task '" + task + "'");
}

SalienceProfile profile_from_config(const Config& cfg, int num_components) {
    const int given = (cfg.has("salience") ? 1 : 0) + (cfg.has("salience_sets") ? 1 : 0) +
                      (cfg.has("kappa") ? 1 : 0);
    if (given != 1)
        throw ConfigError("exactly one of salience, salience_sets, kappa must be given");
    if (cfg.has("salience")) {
        auto s = cfg.get_reals("salience");
        if (static_cast<int>(s.size()) != num_components)
            throw ConfigError("salience wants " + std::to_string(num_components) +
                              " values S(1)..S(C)");
        return make_uniform_profile(s);
    }
    if (cfg.has("salience_sets")) {
        std::map<ConjMask, double> s;
        for (const auto& g : cfg.get_real_groups("salience_sets")) {
            if (g.size() != 2 || g[0] != std::floor(g[0]) || g[0] < 1)
                throw ConfigError("salience_sets wants mask,value groups like 1,0.3;2,0.3;3,0.4");
            s[static_cast<ConjMask>(g[0])] = g[1];
        }
        return make_per_set_profile(num_components, s);
    }
    auto k = cfg.get_reals("kappa");
    if (static_cast<int>(k.size()) != num_components + 1)
        throw ConfigError("kappa wants " + std::to_string(num_components + 1) +
                          " values kappa(0)..kappa(C)");
    return salience_from_similarities(make_uniform_table(k));
}

SimilarityTable table_from_config(const Config& cfg, int num_components) {
    if (cfg.has("kappa")) {
        auto k = cfg.get_reals("kappa");
        if (static_cast<int>(k.size()) != num_components + 1)
            throw ConfigError("kappa wants " + std::to_string(num_components + 1) +
                              " values kappa(0)..kappa(C)");
        const int given = (cfg.has("salience") ? 1 : 0) + (cfg.has("salience_sets") ? 1 : 0);
        if (given != 0)
            throw ConfigError("exactly one of salience, salience_sets, kappa must be given");
        return make_uniform_table(k);
    }
    return similarities_from_salience(profile_from_config(cfg, num_components));
}

std::string join_ints(const std::vector<int>& v, char sep = '|') {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

CsvTable salience_csv(const SalienceProfile& p) {
    CsvTable t;
    t.header = {"conjunction_mask", "size", "salience"};
    for (ConjMask j = 1; j <= full_mask(p.num_components); ++j)
        t.rows.push_back({std::to_string(j), std::to_string(std::popcount(j)),
                          format_real(p.value(j))});
    return t;
}

CsvTable similarity_csv(const SimilarityTable& table) {
    CsvTable t;
    t.header = {"conjunction_mask", "size", "kappa"};
    for (ConjMask j = 0; j <= full_mask(table.num_components); ++j)
        t.rows.push_back({std::to_string(j), std::to_string(std::popcount(j)),
                          format_real(table.value(j))});
    return t;
}

CsvTable predictions_csv(const CompositionalDataset& ds,
                         const std::vector<PredictionReport>& reports) {
    CsvTable t;
    for (int c = 0; c < ds.space.num_components; ++c) t.header.push_back("z_" + std::to_string(c));
    t.header.insert(t.header.begin(), "split");
    t.header.push_back("truth");
    t.header.push_back("prediction");
    t.header.push_back("margin");
    t.header.push_back("squared_error");
    for (const auto& rep : reports)
        for (const auto& row : rep.rows) {
            std::vector<std::string> cells{rep.split};
            for (int v : row.z) cells.push_back(std::to_string(v));
            cells.push_back(format_real(row.truth));
            cells.push_back(format_real(row.prediction));
            cells.push_back(rep.kind == TaskKind::Classification ? format_real(row.margin) : "");
            cells.push_back(rep.kind == TaskKind::Regression ? format_real(row.squared_error)
                                                             : "");
            t.rows.push_back(std::move(cells));
        }
    return t;
}

CsvTable metrics_csv(const std::vector<PredictionReport>& reports) {
    CsvTable t;
    t.header = {"split", "count", "accuracy", "ties", "mse"};
    for (const auto& rep : reports) {
        const bool cls = rep.kind == TaskKind::Classification;
        t.rows.push_back({rep.split, std::to_string(rep.rows.size()),
                          cls ? format_real(rep.accuracy) : "",
                          cls ? std::to_string(rep.ties) : "", cls ? "" : format_real(rep.mse)});
    }
    return t;
}

CsvTable additivity_csv(const AdditivityReport& rep) {
    CsvTable t;
    t.header = {"conjunction_mask", "component_values", "coefficient"};
    for (const auto& [ci, w] : rep.coefficients)
        t.rows.push_back({std::to_string(ci.mask), join_ints(ci.values), format_real(w)});
    t.rows.push_back({"r_squared", "", format_real(rep.r_squared)});
    t.rows.push_back({"degenerate", "", rep.degenerate ? "1" : "0"});
    return t;
}

Split split_from_config(const Config& cfg, Split fallback) {
    if (!cfg.has("split")) return fallback;
    const std::string s = cfg.get("split");
    if (s == "test_only") return Split::TestOnly;
    if (s == "train_and_test") return Split::TrainAndTest;
    throw ConfigError("split must be test_only or train_and_test");
}

// generate-task: materialize a task as dataset.csv.
void run_generate_task(const Common& c) {
    Config cfg = load_config(c);
    cfg.check_schema(kTaskKeys, {"task"});
    CompositionalDataset ds = task_from_config(cfg, effective_seed(cfg, c));
    Manifest m(c.out);
    m.write_csv("dataset.csv", dataset_to_csv(ds));
    m.finalize(c.command_line);
    std::printf("%s: %zu train, %zu test, %s\n", ds.name.c_str(), ds.train.size(),
                ds.test.size(),
                ds.kind == TaskKind::Classification ? "classification" : "regression");
}

// build-kernel: salience profile, similarity table, and Gram matrix for a task.
void run_build_kernel(const Common& c) {
    Config cfg = load_config(c);
    cfg.check_schema(unite(kTaskKeys, kSalienceKeys), {"task"});
    CompositionalDataset ds = task_from_config(cfg, effective_seed(cfg, c));
    const int C = ds.space.num_components;
    SimilarityTable table = table_from_config(cfg, C);
    SalienceProfile profile = salience_from_similarities(table);

    std::vector<CompInput> inputs = ds.train_inputs();
    for (const auto& e : ds.test) inputs.push_back(e.z);
    Eigen::MatrixXd K = gram(inputs, table);

    CsvTable gt;
    gt.header.push_back("input");
    for (const auto& z : inputs) gt.header.push_back(join_ints(z));
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::vector<std::string> row{join_ints(inputs[i])};
        for (std::size_t j = 0; j < inputs.size(); ++j)
            row.push_back(format_real(K(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j))));
        gt.rows.push_back(std::move(row));
    }

    Manifest m(c.out);
    m.write_csv("dataset.csv", dataset_to_csv(ds));
    m.write_csv("salience.csv", salience_csv(profile));
    m.write_csv("similarity.csv", similarity_csv(table));
    m.write_csv("gram.csv", gt);
    m.finalize(c.command_line);
    std::printf("built %zux%zu Gram for %s (C=%d), PSD check passed\n", inputs.size(),
                inputs.size(), ds.name.c_str(), C);
}

// fit: minimal-norm interpolation, predictions and metrics on both splits.
void run_fit(const Common& c) {
    Config cfg = load_config(c);
    cfg.check_schema(unite(kTaskKeys, kSalienceKeys), {"task"});
    CompositionalDataset ds = task_from_config(cfg, effective_seed(cfg, c));
    SimilarityTable table = table_from_config(cfg, ds.space.num_components);
    KernelModel model = fit(ds, table);
    std::vector<PredictionReport> reports{report_predictions(model, ds.train, "train"),
                                          report_predictions(model, ds.test, "test")};
    Manifest m(c.out);
    m.write_csv("dataset.csv", dataset_to_csv(ds));
    m.write_csv("predictions.csv", predictions_csv(ds, reports));
    m.write_csv("metrics.csv", metrics_csv(reports));
    m.finalize(c.command_line);
    if (ds.kind == TaskKind::Classification)
        std::printf("%s: train accuracy %.4f, test accuracy %.4f (%d ties)\n", ds.name.c_str(),
                    reports[0].accuracy, reports[1].accuracy, reports[1].ties);
    else
        std::printf("%s: train mse %.3e, test mse %.3e\n", ds.name.c_str(), reports[0].mse,
                    reports[1].mse);
}

// analyze: fit plus conjunction-wise additivity, coefficient groups for
// context dependence, and prediction-vs-truth slopes for regression tasks.
void run_analyze(const Common& c) {
    Config cfg = load_config(c);
    cfg.check_schema(unite(unite(kTaskKeys, kSalienceKeys), {"split"}), {"task"});
    CompositionalDataset ds = task_from_config(cfg, effective_seed(cfg, c));
    SimilarityTable table = table_from_config(cfg, ds.space.num_components);
    KernelModel model = fit(ds, table);
    std::vector<PredictionReport> reports{report_predictions(model, ds.train, "train"),
                                          report_predictions(model, ds.test, "test")};
    const Split split = split_from_config(cfg, Split::TrainAndTest);
    AdditivityReport add = additivity(model, ds, split);

    Manifest m(c.out);
    m.write_csv("dataset.csv", dataset_to_csv(ds));
    m.write_csv("predictions.csv", predictions_csv(ds, reports));
    m.write_csv("metrics.csv", metrics_csv(reports));
    m.write_csv("additivity.csv", additivity_csv(add));
    std::printf("%s: additivity R^2 = %.6f over %s (%d features)%s\n", ds.name.c_str(),
                add.r_squared, split_name(split).c_str(), add.feature_count,
                add.degenerate ? " [degenerate target]" : "");

    if (ds.name == "context_dependence") {
        CoefficientGroups g = coefficient_groups(add, ds);
        CsvTable gt;
        gt.header = {"group", "mean_abs_coefficient"};
        gt.rows = {{"right_conj", format_real(g.right_conj)},
                   {"wrong_conj", format_real(g.wrong_conj)},
                   {"sensory_feat", format_real(g.sensory_feat)},
                   {"context_only", format_real(g.context_only)},
                   {"memorization", format_real(g.memorization)}};
        m.write_csv("groups.csv", gt);
        std::printf("groups: right %.4f, wrong %.4f, sensory %.4f, context %.4f, memo %.4f\n",
                    g.right_conj, g.wrong_conj, g.sensory_feat, g.context_only, g.memorization);
    }
    if (ds.kind == TaskKind::Regression) {
        CsvTable st;
        st.header = {"split", "slope", "intercept", "residual"};
        for (Split sp : {Split::TrainOnly, Split::TestOnly}) {
            SlopeEstimate se = slope_estimate(model, ds, sp);
            st.rows.push_back({split_name(sp), format_real(se.slope), format_real(se.intercept),
                               format_real(se.residual)});
            if (sp == Split::TestOnly)
                std::printf("test slope %.6f (intercept %.2e, residual %.2e)\n", se.slope,
                            se.intercept, se.residual);
        }
        m.write_csv("slope.csv", st);
    }
    m.finalize(c.command_line);
}

struct SweepPoint {
    std::string variant;
    double s1 = 0.0;
    std::optional<double> s2;
    std::optional<double> s3;
    std::size_t dataset_index = 0;
    std::vector<double> profile;
};

// sweep: metric over a salience grid, optionally crossed with task variants,
// under the exact kernel or seed-averaged Gaussian representations.
void run_sweep(const Common& c) {
    Config cfg = load_config(c);
    cfg.check_schema(unite(kTaskKeys, {"metric", "s1", "s2", "variants", "anchor_sets",
                                       "representation", "dim", "num_seeds", "split"}),
                     {"task", "metric", "s1"});
    const std::string task = cfg.get("task");
    const std::string metric = cfg.get("metric");
    const std::string representation = cfg.get_or("representation", "exact");
    if (representation != "exact" && representation != "gaussian")
        throw ConfigError("representation must be exact or gaussian");
    const std::uint64_t seed = effective_seed(cfg, c);
    const Split split = split_from_config(cfg, Split::TrainAndTest);

    std::vector<std::string> variant_labels;
    std::vector<CompositionalDataset> datasets;
    if (task == "context_dependence") {
        std::vector<double> vs = cfg.has("variants") ? cfg.get_reals("variants")
                                                     : std::vector<double>{3};
        for (double v : vs) {
            if (v != 1.0 && v != 2.0 && v != 3.0)
                throw ConfigError("variants must list values from 1, 2, 3");
            datasets.push_back(gen_context_dependence(static_cast<CdVariant>(int(v))));
            variant_labels.push_back("CD" + std::to_string(int(v)));
        }
    } else if (task == "symbolic_addition" && cfg.has("anchor_sets")) {
        auto values = cfg.get_reals("values");
        for (const auto& w : cfg.get_real_groups("anchor_sets")) {
            datasets.push_back(gen_symbolic_addition(values, w));
            std::string label = "W=";
            for (std::size_t i = 0; i < w.size(); ++i)
                label += (i ? "|" : "") + std::string(format_real(w[i]));
            variant_labels.push_back(label);
        }
    } else {
        datasets.push_back(task_from_config(cfg, seed));
        variant_labels.push_back("-");
    }
    const int C = datasets[0].space.num_components;
    if (C > 3) throw ConfigError("sweep supports spaces with at most 3 components");

    std::vector<double> s1s = cfg.get_reals("s1");
    std::vector<double> s2s;
    if (cfg.has("s2")) s2s = cfg.get_reals("s2");
    if (C == 3 && s2s.empty()) throw ConfigError("a 3-component sweep needs an s2 grid");
    if (C == 2 && !s2s.empty()) throw ConfigError("a 2-component sweep derives S(2) from s1");

    std::vector<SweepPoint> points;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (double s1 : s1s) {
            if (C == 2) {
                const double s2 = 1.0 - 2.0 * s1;
                if (s1 <= 0.0 || s2 < -1e-12) continue;
                SweepPoint p{variant_labels[d], s1, s2, std::nullopt, d, {s1, std::max(0.0, s2)}};
                points.push_back(std::move(p));
            } else {
                for (double s2 : s2s) {
                    const double s3 = 1.0 - 3.0 * s1 - 3.0 * s2;
                    if (s1 <= 0.0 || s2 <= 0.0 || s3 < 1e-12) continue;
                    SweepPoint p{variant_labels[d], s1, s2, s3, d, {s1, s2, s3}};
                    points.push_back(std::move(p));
                }
            }
        }
    if (points.empty()) throw ConfigError("sweep grid is empty after feasibility filtering");

    auto evaluate = [&](const SweepPoint& p) -> double {
        const CompositionalDataset& ds = datasets[p.dataset_index];
        if (representation == "exact") {
            SimilarityTable table = similarities_from_salience(make_uniform_profile(p.profile));
            KernelModel model = fit(ds, table);
            if (metric == "test_accuracy")
                return report_predictions(model, ds.test, "test").accuracy;
            if (metric == "slope") return slope_estimate(model, ds, Split::TestOnly).slope;
            if (metric == "margin") {
                PredictionReport r = report_predictions(model, ds.test, "test");
                double s = 0.0;
                for (const auto& row : r.rows) s += row.margin;
                return r.rows.empty() ? 0.0 : s / static_cast<double>(r.rows.size());
            }
            if (metric == "additivity_r2") return additivity(model, ds, split).r_squared;
            throw ConfigError("unknown metric '" + metric + "'");
        }
        GaussianRepSpec spec;
        spec.space = ds.space;
        spec.dim = static_cast<int>(get_int_or(cfg, "dim", 100));
        spec.seed = seed;
        SalienceProfile target = make_uniform_profile(p.profile);
        spec.sigma_by_size = sigma_for_expected_salience(target);
        AveragedBehavior avg =
            averaged_behavior(spec, ds, static_cast<int>(get_int_or(cfg, "num_seeds", 200)));
        if (metric == "test_accuracy") return avg.mean_test_accuracy();
        if (metric == "slope")
            return slope_estimate(avg.mean_test_predictions, ds, Split::TestOnly).slope;
        if (metric == "margin") {
            double s = 0.0;
            for (std::size_t i = 0; i < ds.test.size(); ++i)
                s += ds.test[i].target * avg.mean_test_predictions[static_cast<Eigen::Index>(i)];
            return ds.test.empty() ? 0.0 : s / static_cast<double>(ds.test.size());
        }
        if (metric == "additivity_r2")
            return additivity(avg.mean_test_predictions, ds,
                              split_from_config(cfg, Split::TestOnly))
                .r_squared;
        throw ConfigError("unknown metric '" + metric + "'");
    };

    std::vector<double> values(points.size(), 0.0);
    {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= points.size()) return;
                try {
                    values[i] = evaluate(points[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(points.size());
                    return;
                }
            }
        };
        const int jobs = std::max(1, c.jobs);
        std::vector<std::thread> pool;
        for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    CsvTable t;
    t.header = {"task", "variant", "s1", "s2", "s3", "metric", "value", "seed"};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        t.rows.push_back({task, p.variant, format_real(p.s1),
                          p.s2 ? format_real(*p.s2) : "", p.s3 ? format_real(*p.s3) : "", metric,
                          format_real(values[i]), std::to_string(seed)});
    }
    Manifest m(c.out);
    m.write_csv("sweep.csv", t);

    if (!c.no_plots) {
        if (C == 3 && s2s.size() > 1) {
            for (std::size_t d = 0; d < datasets.size(); ++d) {
                std::vector<std::vector<double>> grid(
                    s2s.size(),
                    std::vector<double>(s1s.size(), std::numeric_limits<double>::quiet_NaN()));
                for (std::size_t i = 0; i < points.size(); ++i) {
                    if (points[i].dataset_index != d) continue;
                    const auto xi = static_cast<std::size_t>(
                        std::find(s1s.begin(), s1s.end(), points[i].s1) - s1s.begin());
                    const auto yi = static_cast<std::size_t>(
                        std::find(s2s.begin(), s2s.end(), *points[i].s2) - s2s.begin());
                    grid[yi][xi] = values[i];
                }
                m.write_text("sweep_" + variant_labels[d] + ".svg",
                             svg::heatmap(s1s, s2s, grid, task + " " + variant_labels[d] + ": " +
                                          metric, "S(1;3)", "S(2;3)"));
            }
        } else {
            std::vector<svg::Series> series(datasets.size());
            for (std::size_t d = 0; d < datasets.size(); ++d) series[d].label = variant_labels[d];
            for (std::size_t i = 0; i < points.size(); ++i) {
                series[points[i].dataset_index].x.push_back(points[i].s1);
                series[points[i].dataset_index].y.push_back(values[i]);
            }
            m.write_text("sweep.svg", svg::line_chart(series, task + ": " + metric, "S(1;C)",
                                                      metric));
        }
    }
    m.finalize(c.command_line);
    std::printf("sweep: %zu points (%s, %s, %s)\n", points.size(), task.c_str(), metric.c_str(),
                representation.c_str());
}

// depth-salience: arc-cosine depth recursion of a salience profile.
void run_depth_salience(const Common& c) {
    Config cfg = load_config(c);
    cfg.check_schema({"components", "depth", "leak", "s_init"}, {"depth"});
    const int C = static_cast<int>(get_int_or(cfg, "components", 2));
    const int depth = static_cast<int>(cfg.get_int("depth"));
    if (C < 1 || depth < 1) throw ConfigError("depth-salience needs components >= 1, depth >= 1");
    std::vector<double> leaks = cfg.has("leak") ? cfg.get_reals("leak") : std::vector<double>{0.0};

    SalienceProfile start;
    if (cfg.has("s_init")) {
        auto s = cfg.get_reals("s_init");
        if (static_cast<int>(s.size()) != C)
            throw ConfigError("s_init wants " + std::to_string(C) + " values S(1)..S(C)");
        start = make_uniform_profile(s);
    } else {
        std::vector<double> s(static_cast<std::size_t>(C), 0.0);
        s[0] = 1.0 / static_cast<double>(C);
        start = make_uniform_profile(s);
    }

    CsvTable traj_csv;
    traj_csv.header = {"leak", "layer", "size", "salience"};
    CsvTable verdict_csv;
    verdict_csv.header = {"leak", "depth", "full_conjunction_salience", "verdict",
                          "crossing_layer"};
    std::vector<svg::Series> series;
    for (double leak : leaks) {
        std::vector<SalienceProfile> traj = depth_salience(start, depth, leak);
        int crossing = -1;
        for (std::size_t l = 0; l < traj.size(); ++l) {
            for (int k = 1; k <= C; ++k)
                traj_csv.rows.push_back({format_real(leak), std::to_string(l), std::to_string(k),
                                         format_real(mean_salience_by_size(traj[l], k))});
            if (crossing < 0 && mean_salience_by_size(traj[l], C) > 0.99)
                crossing = static_cast<int>(l);
        }
        const SalienceProfile& last = traj.back();
        bool verdict = mean_salience_by_size(last, C) > 0.99;
        for (int k = 1; k < C && verdict; ++k)
            if (std::abs(mean_salience_by_size(last, k)) >= 0.01) verdict = false;
        verdict_csv.rows.push_back({format_real(leak), std::to_string(depth),
                                    format_real(mean_salience_by_size(last, C)),
                                    verdict ? "1" : "0", std::to_string(crossing)});
        svg::Series s;
        s.label = "A=" + std::string(format_real(leak));
        for (std::size_t l = 0; l < traj.size(); ++l) {
            s.x.push_back(static_cast<double>(l));
            s.y.push_back(mean_salience_by_size(traj[l], C));
        }
        series.push_back(std::move(s));
        std::printf("leak %.2f: S(C;C) = %.6f at depth %d, crossing at layer %d, verdict %s\n",
                    leak, mean_salience_by_size(last, C), depth, crossing,
                    verdict ? "pass" : "fail");
    }
    Manifest m(c.out);
    m.write_csv("depth_salience.csv", traj_csv);
    m.write_csv("depth_verdicts.csv", verdict_csv);
    if (!c.no_plots)
        m.write_text("depth_salience.svg",
                     svg::line_chart(series, "full-conjunction salience by depth", "layer",
                                     "S(C;C)"));
    m.finalize(c.command_line);
}

// sample-reps: random Gaussian representations for a task; empirical salience,
// variance ratio, seed-averaged predictions.
void run_sample_reps(const Common& c) {
    Config cfg = load_config(c);
    cfg.check_schema(unite(kTaskKeys, {"dim", "num_seeds", "sigma", "target_salience"}),
                     {"task", "dim"});
    const std::uint64_t seed = effective_seed(cfg, c);
    CompositionalDataset ds = task_from_config(cfg, seed);
    const int C = ds.space.num_components;

    GaussianRepSpec spec;
    spec.space = ds.space;
    spec.dim = static_cast<int>(cfg.get_int("dim"));
    spec.seed = seed;
    if (cfg.has("sigma") == cfg.has("target_salience"))
        throw ConfigError("exactly one of sigma, target_salience must be given");
    if (cfg.has("sigma")) {
        auto s = cfg.get_reals("sigma");
        if (static_cast<int>(s.size()) != C)
            throw ConfigError("sigma wants " + std::to_string(C) + " values sigma_1..sigma_C");
        for (int k = 1; k <= C; ++k) spec.sigma_by_size[k] = s[static_cast<std::size_t>(k) - 1];
    } else {
        auto s = cfg.get_reals("target_salience");
        if (static_cast<int>(s.size()) != C)
            throw ConfigError("target_salience wants " + std::to_string(C) + " values");
        spec.sigma_by_size = sigma_for_expected_salience(make_uniform_profile(s));
    }
    const int num_seeds = static_cast<int>(get_int_or(cfg, "num_seeds", 1));

    std::vector<CompInput> inputs = ds.train_inputs();
    for (const auto& e : ds.test) inputs.push_back(e.z);
    SalienceProfile expected = expected_salience(spec);

    CsvTable per_seed;
    per_seed.header = {"seed", "variance_ratio"};
    for (int k = 1; k <= C; ++k) per_seed.header.push_back("empirical_s" + std::to_string(k));
    GaussianRepSpec probe = spec;
    for (int s = 0; s < num_seeds; ++s) {
        probe.seed = seed + static_cast<std::uint64_t>(s);
        Eigen::MatrixXd X = sample_representation(probe, inputs);
        std::vector<std::string> row{std::to_string(probe.seed),
                                     format_real(variance_ratio(X, inputs))};
        SalienceProfile emp = empirical_salience(X, inputs);
        for (int k = 1; k <= C; ++k) row.push_back(format_real(mean_salience_by_size(emp, k)));
        per_seed.rows.push_back(std::move(row));
    }

    AveragedBehavior avg = averaged_behavior(spec, ds, num_seeds);
    CsvTable avg_csv;
    avg_csv.header = {"split"};
    for (int k = 0; k < C; ++k) avg_csv.header.push_back("z_" + std::to_string(k));
    avg_csv.header.push_back("truth");
    avg_csv.header.push_back("mean_prediction");
    avg_csv.header.push_back("stderr");
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        std::vector<std::string> row{"train"};
        for (int v : ds.train[i].z) row.push_back(std::to_string(v));
        row.push_back(format_real(ds.train[i].target));
        row.push_back(format_real(avg.mean_train_predictions[static_cast<Eigen::Index>(i)]));
        row.push_back("");
        avg_csv.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < ds.test.size(); ++i) {
        std::vector<std::string> row{"test"};
        for (int v : ds.test[i].z) row.push_back(std::to_string(v));
        row.push_back(format_real(ds.test[i].target));
        row.push_back(format_real(avg.mean_test_predictions[static_cast<Eigen::Index>(i)]));
        row.push_back(format_real(avg.test_prediction_stderr[static_cast<Eigen::Index>(i)]));
        avg_csv.rows.push_back(std::move(row));
    }

    CsvTable summary;
    summary.header = {"key", "value"};
    summary.rows.push_back({"seeds_used", std::to_string(avg.seeds_used)});
    summary.rows.push_back({"seeds_skipped", std::to_string(avg.skipped_seeds.size())});
    for (int k = 1; k <= C; ++k)
        summary.rows.push_back({"expected_s" + std::to_string(k),
                                format_real(mean_salience_by_size(expected, k))});
    if (ds.kind == TaskKind::Classification) {
        summary.rows.push_back({"mean_test_accuracy", format_real(avg.mean_test_accuracy())});
        std::printf("%s: %d seeds, mean test accuracy %.4f\n", ds.name.c_str(), avg.seeds_used,
                    avg.mean_test_accuracy());
    } else {
        SlopeEstimate se = slope_estimate(avg.mean_test_predictions, ds, Split::TestOnly);
        AdditivityReport add = additivity(avg.mean_test_predictions, ds, Split::TestOnly);
        summary.rows.push_back({"mean_test_slope", format_real(se.slope)});
        summary.rows.push_back({"mean_test_intercept", format_real(se.intercept)});
        summary.rows.push_back({"test_additivity_r2", format_real(add.r_squared)});
        std::printf("%s: %d seeds, mean-prediction slope %.4f, test additivity R^2 %.4f\n",
                    ds.name.c_str(), avg.seeds_used, se.slope, add.r_squared);
    }

    Manifest m(c.out);
    m.write_csv("dataset.csv", dataset_to_csv(ds));
    m.write_csv("rep_metrics.csv", per_seed);
    m.write_csv("averaged.csv", avg_csv);
    m.write_csv("summary.csv", summary);
    m.finalize(c.command_line);
}

// verify-oracles: analytic results against brute-force solves; exit 3 on any
// mismatch.
int run_verify_oracles(const Common& c) {
    std::uint64_t seed = 2026;
    if (!c.config_path.empty()) {
        Config cfg = load_config(c);
        cfg.check_schema({"seed"}, {});
        seed = effective_seed(cfg, c);
        if (seed == 0) seed = 2026;
    } else if (!c.seed_str.empty()) {
        seed = std::stoull(c.seed_str);
    }
    VerifyReport rep = verify_oracles(seed);
    Manifest m(c.out);
    m.write_csv("verify.csv", rep.to_csv());
    m.finalize(c.command_line);
    int passed = 0;
    for (const auto& r : rep.rows) {
        if (r.pass)
            ++passed;
        else
            std::printf("[FAIL] %s %s error=%.3e tol=%.0e\n", r.check.c_str(), r.config.c_str(),
                        r.error, r.tolerance);
    }
    std::printf("verify-oracles: %d/%zu checks passed\n", passed, rep.rows.size());
    return rep.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compositional kernel toolkit"};
    app.require_subcommand(1);

    Common common;
    for (int i = 0; i < argc; ++i) {
        if (i) common.command_line += " ";
        common.command_line += argv[i];
    }

    int exit_code = 0;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* copt = sub->add_option("--config", common.config_path,
                                     "configuration file (key = value lines)");
        if (config_required) copt->required();
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--seed", common.seed_str, "seed override (non-negative integer)");
        sub->add_option("--jobs", common.jobs, "worker threads")->capture_default_str();
        sub->add_flag("--no-plots", common.no_plots, "skip SVG plots");
    };

    struct Sub {
        const char* name;
        const char* help;
        std::function<void()> run;
        bool config_required = true;
    };
    const std::vector<Sub> subs = {
        {"generate-task", "materialize a compositional task as CSV",
         [&] { run_generate_task(common); }},
        {"build-kernel", "salience profile, similarity table, and Gram matrix",
         [&] { run_build_kernel(common); }},
        {"fit", "minimal-norm kernel fit with train/test predictions",
         [&] { run_fit(common); }},
        {"analyze", "fit plus conjunction-wise additivity analysis",
         [&] { run_analyze(common); }},
        {"sweep", "metric over a salience grid", [&] { run_sweep(common); }},
        {"depth-salience", "arc-cosine depth recursion of a salience profile",
         [&] { run_depth_salience(common); }},
        {"sample-reps", "random Gaussian representations for a task",
         [&] { run_sample_reps(common); }},
        {"verify-oracles", "closed-form oracles against brute-force solves",
         [&] { exit_code = run_verify_oracles(common); }, false},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, s.config_required);
        sub->callback(s.run);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const compkit::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const compkit::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exit_code;
}
