#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "compkit/analysis.hpp"
#include "compkit/random_reps.hpp"
#include "compkit/task_space.hpp"

using namespace compkit;

namespace {

GaussianRepSpec pair_spec(const ComponentSpace& space, int dim, double sigma1, double sigma2,
                          std::uint64_t seed) {
    GaussianRepSpec spec;
    spec.space = space;
    spec.dim = dim;
    spec.sigma_by_size = {{1, sigma1}, {2, sigma2}};
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("sampling is deterministic in the seed", "[random_reps]") {
    ComponentSpace space = make_space({3, 3});
    std::vector<CompInput> inputs = enumerate_grid(space);
    GaussianRepSpec spec = pair_spec(space, 16, 1.0, 0.5, 42);
    Eigen::MatrixXd a = sample_representation(spec, inputs);
    Eigen::MatrixXd b = sample_representation(spec, inputs);
    REQUIRE(a == b);
    spec.seed = 43;
    Eigen::MatrixXd c = sample_representation(spec, inputs);
    REQUIRE((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sampled rows depend on the tuple, not the query order", "[random_reps]") {
    ComponentSpace space = make_space({3, 3});
    std::vector<CompInput> inputs = enumerate_grid(space);
    GaussianRepSpec spec = pair_spec(space, 16, 1.0, 0.5, 42);
    Eigen::MatrixXd forward = sample_representation(spec, inputs);
    std::vector<CompInput> reversed(inputs.rbegin(), inputs.rend());
    Eigen::MatrixXd backward = sample_representation(spec, reversed);
    for (std::size_t i = 0; i < inputs.size(); ++i)
        REQUIRE(forward.row(static_cast<Eigen::Index>(i)) ==
                backward.row(static_cast<Eigen::Index>(inputs.size() - 1 - i)));
}

TEST_CASE("expected salience follows the sigma ratios", "[random_reps]") {
    ComponentSpace space = make_space({3, 3});
    GaussianRepSpec spec = pair_spec(space, 8, std::sqrt(0.3), std::sqrt(0.4), 0);
    SalienceProfile p = expected_salience(spec);
    REQUIRE(p.per_size[0] == Catch::Approx(0.3).margin(1e-12));
    REQUIRE(p.per_size[1] == Catch::Approx(0.4).margin(1e-12));

    std::map<int, double> sigma =
        sigma_for_expected_salience(make_uniform_profile({0.3, 0.4}));
    REQUIRE(sigma.at(1) == Catch::Approx(std::sqrt(0.3)).margin(1e-12));
    REQUIRE(sigma.at(2) == Catch::Approx(std::sqrt(0.4)).margin(1e-12));

    GaussianRepSpec zero = pair_spec(space, 8, 0.0, 0.0, 0);
    REQUIRE_THROWS_AS(expected_salience(zero), ConfigError);
}

TEST_CASE("empirical salience concentrates around the expectation", "[random_reps]") {
    ComponentSpace space = make_space({3, 3});
    std::vector<CompInput> inputs = enumerate_grid(space);
    GaussianRepSpec spec = pair_spec(space, 4000, std::sqrt(0.3), std::sqrt(0.4), 7);
    Eigen::MatrixXd X = sample_representation(spec, inputs);
    SalienceProfile p = empirical_salience(X, inputs);
    REQUIRE(mean_salience_by_size(p, 1) == Catch::Approx(0.3).margin(0.05));
    REQUIRE(mean_salience_by_size(p, 2) == Catch::Approx(0.4).margin(0.05));
    REQUIRE(variance_ratio(X, inputs) < 0.2);
}

TEST_CASE("sampling validates dimension and space membership", "[random_reps]") {
    ComponentSpace space = make_space({3, 3});
    GaussianRepSpec spec = pair_spec(space, 0, 1.0, 1.0, 0);
    REQUIRE_THROWS_AS(sample_representation(spec, {{0, 0}}), ConfigError);
    spec.dim = 4;
    REQUIRE_THROWS_AS(sample_representation(spec, {{0, 3}}), ConfigError);
    spec.sigma_by_size[1] = -1.0;
    REQUIRE_THROWS_AS(sample_representation(spec, {{0, 0}}), ConfigError);
}

TEST_CASE("averaging skips seeds whose gram cannot interpolate", "[random_reps]") {
    // one feature dimension cannot interpolate 17 independent targets
    CompositionalDataset ds = gen_symbolic_addition({-2, -1, 0, 1, 2}, {0});
    GaussianRepSpec spec = pair_spec(ds.space, 1, 1.0, 0.0, 5);
    REQUIRE_THROWS_AS(averaged_behavior(spec, ds, 3), NumericalError);
}

TEST_CASE("seed-averaged addition recovers the analytic slope", "[random_reps]") {
    CompositionalDataset ds = gen_symbolic_addition({-2, -1, 0, 1, 2}, {0});
    GaussianRepSpec spec = pair_spec(ds.space, 100, std::sqrt(0.4), std::sqrt(0.2), 1);
    AveragedBehavior avg = averaged_behavior(spec, ds, 100);
    REQUIRE(avg.seeds_used == 100);
    REQUIRE(avg.skipped_seeds.empty());
    SlopeEstimate se = slope_estimate(avg.mean_test_predictions, ds, Split::TestOnly);
    REQUIRE(se.slope == Catch::Approx(2.0 / 3.0).margin(0.05));
    REQUIRE(se.intercept == Catch::Approx(0.0).margin(0.05));
    REQUIRE(avg.test_prediction_stderr.size() == 16);
    REQUIRE(avg.test_prediction_stderr.minCoeff() > 0.0);
    REQUIRE(avg.per_seed_test_accuracy.empty());
}

TEST_CASE("averaging rejects mismatched spaces and bad seed counts", "[random_reps]") {
    CompositionalDataset ds = gen_invariance();
    GaussianRepSpec spec = pair_spec(make_space({3, 3}), 8, 1.0, 1.0, 0);
    REQUIRE_THROWS_AS(averaged_behavior(spec, ds, 2), ConfigError);
    GaussianRepSpec ok = pair_spec(ds.space, 8, 1.0, 1.0, 0);
    REQUIRE_THROWS_AS(averaged_behavior(ok, ds, 0), ConfigError);
}
