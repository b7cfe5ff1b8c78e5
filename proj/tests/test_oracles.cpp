#include <catch2/catch_amalgamated.hpp>

#include "compkit/oracles.hpp"
#include "compkit/solver.hpp"
#include "compkit/task_space.hpp"

using namespace compkit;

namespace {

std::vector<double> value_range(int lo, int hi) {
    std::vector<double> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
}

}  // namespace

TEST_CASE("addition slope formula", "[oracles]") {
    REQUIRE(oracles::addition_slope(0.4, 1) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    // p = 2 cancels the denominator
    REQUIRE(oracles::addition_slope(0.3, 2) == Catch::Approx(0.6).margin(1e-15));
    REQUIRE(oracles::addition_slope(0.25, 4) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    REQUIRE_THROWS_AS(oracles::addition_slope(0.0, 1), ConfigError);
    REQUIRE_THROWS_AS(oracles::addition_slope(0.6, 1), ConfigError);
    REQUIRE_THROWS_AS(oracles::addition_slope(0.4, 0), ConfigError);
}

TEST_CASE("margin formulas", "[oracles]") {
    REQUIRE(oracles::invariance_margin(0.4) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    REQUIRE(oracles::partial_exposure_margin(0.4) == Catch::Approx(8.0 / 17.0).margin(1e-15));
    REQUIRE_THROWS_AS(oracles::invariance_margin(0.0), ConfigError);
    REQUIRE_THROWS_AS(oracles::invariance_margin(0.51), ConfigError);
    REQUIRE_THROWS_AS(oracles::partial_exposure_margin(0.71), ConfigError);
}

TEST_CASE("the unique-contribution recursion inverts the similarity table", "[oracles]") {
    std::map<ConjMask, double> d =
        oracles::subsetwise::delta_recursion(make_uniform_table({0.0, 0.4, 1.0}));
    REQUIRE(d.at(0b00) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(d.at(0b01) == Catch::Approx(0.4).margin(1e-15));
    REQUIRE(d.at(0b10) == Catch::Approx(0.4).margin(1e-15));
    REQUIRE(d.at(0b11) == Catch::Approx(0.2).margin(1e-15));

    // non-canonical table: the empty conjunction absorbs the baseline
    std::map<ConjMask, double> nd =
        oracles::subsetwise::delta_recursion(make_uniform_table({0.3, 0.58, 1.0}));
    REQUIRE(nd.at(0b00) == Catch::Approx(0.3).margin(1e-15));
    REQUIRE(nd.at(0b01) == Catch::Approx(0.28).margin(1e-15));
    REQUIRE(nd.at(0b11) == Catch::Approx(0.14).margin(1e-12));

    SimilarityTable per_set = similarities_from_salience(
        make_per_set_profile(2, {{0b01, 0.3}, {0b10, 0.25}, {0b11, 0.45}}));
    std::map<ConjMask, double> pd = oracles::subsetwise::delta_recursion(per_set);
    REQUIRE(pd.at(0b01) == Catch::Approx(0.3).margin(1e-12));
    REQUIRE(pd.at(0b10) == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(pd.at(0b11) == Catch::Approx(0.45).margin(1e-12));
}

TEST_CASE("the slope derivation deltas subtract the baseline directly", "[oracles]") {
    REQUIRE(oracles::baseline::delta1(0.3, 0.58) == Catch::Approx(0.28).margin(1e-15));
    REQUIRE(oracles::baseline::delta2(0.3, 1.0) == Catch::Approx(0.7).margin(1e-15));
}

TEST_CASE("decomposition splits a prediction into conjunction parts", "[oracles]") {
    CompositionalDataset ds = gen_symbolic_addition(value_range(-4, 4), {0});
    KernelModel m = fit(ds, similarities_from_salience(make_uniform_profile({0.4, 0.2})));
    CompInput z = ds.test[0].z;  // (-4, -4): no training input matches both slots
    std::map<ConjMask, double> parts = oracles::conjunctionwise_decompose(m, z);
    REQUIRE(parts.at(0b00) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(parts.at(0b11) == Catch::Approx(0.0).margin(1e-12));
    double sum = parts.at(0b01) + parts.at(0b10);
    REQUIRE(sum == Catch::Approx(predict_value(m, z)).margin(1e-10));
    REQUIRE(sum == Catch::Approx(ds.test[0].target * 2.0 / 3.0).margin(1e-8));
}

TEST_CASE("the depth recursion concentrates salience on the full conjunction", "[oracles]") {
    oracles::DeepLimitResult hit = oracles::deep_limit_check(2, 0.0, 18);
    REQUIRE(hit.verdict);
    REQUIRE(hit.trajectory.size() == 19);
    REQUIRE_FALSE(oracles::deep_limit_check(2, 0.0, 17).verdict);

    // a leak close to 1 freezes the recursion near the input profile
    oracles::DeepLimitResult frozen = oracles::deep_limit_check(2, 0.99, 128);
    REQUIRE_FALSE(frozen.verdict);
    for (std::size_t l = 1; l < frozen.trajectory.size(); ++l)
        REQUIRE(mean_salience_by_size(frozen.trajectory[l], 2) >=
                mean_salience_by_size(frozen.trajectory[l - 1], 2) - 1e-12);
    REQUIRE(mean_salience_by_size(frozen.trajectory.back(), 2) < 0.01);
}
