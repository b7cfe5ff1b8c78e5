#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "compkit/geometry.hpp"
#include "compkit/task_space.hpp"

using namespace compkit;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("salience and similarities convert both ways", "[geometry]") {
    SimilarityTable t = make_uniform_table({0.0, 0.4, 1.0});
    SalienceProfile p = salience_from_similarities(t);
    REQUIRE(p.is_uniform());
    REQUIRE(p.per_size[0] == Catch::Approx(0.4).margin(1e-12));
    REQUIRE(p.per_size[1] == Catch::Approx(0.2).margin(1e-12));

    SimilarityTable back = similarities_from_salience(p);
    REQUIRE(back.by_size[0] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(back.by_size[1] == Catch::Approx(0.4).margin(1e-12));
    REQUIRE(back.by_size[2] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("salience is invariant to affine changes of the similarity table", "[geometry]") {
    SalienceProfile p = salience_from_similarities(make_uniform_table({0.3, 0.58, 1.0}));
    REQUIRE(p.per_size[0] == Catch::Approx(0.4).margin(1e-12));
    REQUIRE(p.per_size[1] == Catch::Approx(0.2).margin(1e-12));

    SalienceProfile q =
        salience_from_similarities(make_uniform_table({0.0, 0.4, 1.0}).scaled(3.7));
    REQUIRE(q.per_size[0] == Catch::Approx(0.4).margin(1e-12));
    REQUIRE(q.per_size[1] == Catch::Approx(0.2).margin(1e-12));
}

TEST_CASE("multi-hot similarities put all salience on singletons", "[geometry]") {
    SalienceProfile p =
        salience_from_similarities(make_uniform_table({0.0, 1.0 / 3, 2.0 / 3, 1.0}));
    REQUIRE(p.per_size[0] == Catch::Approx(1.0 / 3).margin(1e-12));
    REQUIRE(p.per_size[1] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(p.per_size[2] == Catch::Approx(0.0).margin(1e-12));

    SimilarityTable t = similarities_from_salience(make_uniform_profile({1.0 / 3, 0.0, 0.0}));
    for (int k = 0; k <= 3; ++k)
        REQUIRE(t.by_size[static_cast<std::size_t>(k)] ==
                Catch::Approx(k / 3.0).margin(1e-12));
}

TEST_CASE("salience profiles validate normalization and sign", "[geometry]") {
    REQUIRE_THROWS_AS(make_uniform_profile({0.5, 0.5}), ConfigError);
    REQUIRE_THROWS_AS(make_uniform_profile({0.6, -0.1}), ConfigError);
    REQUIRE_THROWS_AS(make_per_set_profile(2, {{0, 0.5}, {1, 0.5}}), ConfigError);
    REQUIRE_THROWS_AS(make_per_set_profile(2, {{1, 0.4}, {2, 0.4}}), ConfigError);
}

TEST_CASE("per-set profiles round-trip through similarities", "[geometry]") {
    SalienceProfile p = make_per_set_profile(2, {{0b01, 0.3}, {0b10, 0.25}, {0b11, 0.45}});
    SimilarityTable t = similarities_from_salience(p);
    REQUIRE(t.by_set.at(0b00) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(t.by_set.at(0b01) == Catch::Approx(0.3).margin(1e-12));
    REQUIRE(t.by_set.at(0b11) == Catch::Approx(1.0).margin(1e-12));
    SalienceProfile back = salience_from_similarities(t);
    REQUIRE_FALSE(back.is_uniform());
    for (auto& [j, v] : p.per_set)
        REQUIRE(back.per_set.at(j) == Catch::Approx(v).margin(1e-12));

    REQUIRE(mean_salience_by_size(p, 1) == Catch::Approx(0.275).margin(1e-12));
    REQUIRE(mean_salience_by_size(p, 2) == Catch::Approx(0.45).margin(1e-12));
    REQUIRE_THROWS_AS(mean_salience_by_size(p, 3), ConfigError);
}

TEST_CASE("gram matrices are symmetric with unit diagonal", "[geometry]") {
    std::vector<CompInput> inputs = enumerate_grid(make_space({3, 3}));
    SimilarityTable t = similarities_from_salience(make_uniform_profile({0.4, 0.2}));
    Eigen::MatrixXd K = gram(inputs, t);
    REQUIRE(K.rows() == 9);
    REQUIRE((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < K.rows(); ++i) REQUIRE(K(i, i) == Catch::Approx(1.0));
    // overlap on the first component only
    REQUIRE(K(0, 1) == Catch::Approx(0.4));
    // no overlap
    REQUIRE(K(0, 4) == Catch::Approx(0.0));

    Eigen::MatrixXd Kx = cross_gram({inputs[0]}, inputs, t);
    REQUIRE(Kx.rows() == 1);
    REQUIRE(Kx.cols() == 9);
    REQUIRE(Kx(0, 0) == Catch::Approx(1.0));
}

TEST_CASE("gram rejects non-PSD similarity tables", "[geometry]") {
    std::vector<CompInput> inputs = enumerate_grid(make_space({2, 2}));
    REQUIRE_THROWS_AS(gram(inputs, make_uniform_table({0.0, 1.0, 0.1})), NumericalError);
    REQUIRE_NOTHROW(gram(inputs, make_uniform_table({0.0, 1.0, 0.1}), false));
}

TEST_CASE("valid salience profiles always give PSD gram matrices", "[geometry]") {
    Rng rng(11);
    std::vector<CompInput> inputs = enumerate_grid(make_space({2, 3, 2}));
    for (int rep = 0; rep < 20; ++rep) {
        double raw[3];
        double total = 0.0;
        const double b[3] = {3, 3, 1};
        for (int k = 0; k < 3; ++k) {
            raw[k] = rng.next_double();
            total += b[k] * raw[k];
        }
        REQUIRE_NOTHROW(gram(inputs, similarities_from_salience(make_uniform_profile(
                                          {raw[0] / total, raw[1] / total, raw[2] / total}))));
    }
}

TEST_CASE("empirical salience recovers the generating profile exactly", "[geometry]") {
    // concatenated one-hot features scaled by sqrt(S) realize the kernel exactly
    const double s1 = 0.4, s2 = 0.2;
    std::vector<CompInput> inputs = enumerate_grid(make_space({3, 3}));
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(9, 15);
    for (int i = 0; i < 9; ++i) {
        const CompInput& z = inputs[static_cast<std::size_t>(i)];
        X(i, z[0]) = std::sqrt(s1);
        X(i, 3 + z[1]) = std::sqrt(s1);
        X(i, 6 + 3 * z[0] + z[1]) = std::sqrt(s2);
    }
    SalienceProfile p = empirical_salience(X, inputs);
    REQUIRE(p.is_uniform());
    REQUIRE(p.per_size[0] == Catch::Approx(s1).margin(1e-12));
    REQUIRE(p.per_size[1] == Catch::Approx(s2).margin(1e-12));
}

TEST_CASE("empirical salience validates its inputs", "[geometry]") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(1, 4);
    REQUIRE_THROWS_AS(empirical_salience(X, {{0, 0}}), ConfigError);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Ones(2, 4);
    // no pair realizes the single-component overlap classes
    REQUIRE_THROWS_AS(empirical_salience(Y, {{0, 0}, {1, 1}}), ConfigError);
}

TEST_CASE("arc-cosine step is normalized and leak-aware", "[geometry]") {
    REQUIRE(arccos_step(1.0, 0.0) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(arccos_step(1.0, 0.5) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(arccos_step(0.0, 0.0) == Catch::Approx(1.0 / kPi).margin(1e-12));
    const double a = 0.5;
    REQUIRE(arccos_step(0.0, a) ==
            Catch::Approx((1.0 - a) * (1.0 - a) / (kPi * (1.0 + a * a))).margin(1e-12));
    REQUIRE_THROWS_AS(arccos_step(1.0 + 1e-9, 0.0), NumericalError);
    REQUIRE_THROWS_AS(arccos_step(0.5, 1.0), ConfigError);
    REQUIRE_THROWS_AS(arccos_step(0.5, -0.1), ConfigError);
}

TEST_CASE("depth salience starts at the input profile and shifts upward", "[geometry]") {
    SalienceProfile start = make_uniform_profile({0.5, 0.0});
    for (double leak : {0.0, 0.2, 0.99}) {
        std::vector<SalienceProfile> layers = depth_salience(start, 40, leak);
        REQUIRE(layers.size() == 41);
        REQUIRE(layers[0].per_size == start.per_size);
        for (std::size_t l = 1; l < layers.size(); ++l) {
            REQUIRE(mean_salience_by_size(layers[l], 1) <=
                    mean_salience_by_size(layers[l - 1], 1) + 1e-12);
            REQUIRE(mean_salience_by_size(layers[l], 2) >=
                    mean_salience_by_size(layers[l - 1], 2) - 1e-12);
        }
    }
    REQUIRE_THROWS_AS(depth_salience(start, -1, 0.0), ConfigError);
}

TEST_CASE("partial excess similarity contracts once it falls below one half", "[geometry]") {
    // the canonical similarity of a partial overlap class is its normalized
    // excess similarity; each layer strictly shrinks it on (0, 1/2]
    for (int C : {2, 3}) {
        std::vector<double> s(static_cast<std::size_t>(C), 0.0);
        s[0] = 1.0 / C;
        for (double leak : {0.0, 0.2, 0.5, 0.99}) {
            std::vector<SalienceProfile> layers =
                depth_salience(make_uniform_profile(s), 128, leak);
            std::vector<SimilarityTable> tables;
            for (const auto& p : layers) tables.push_back(similarities_from_salience(p));
            for (std::size_t l = 0; l + 1 < tables.size(); ++l)
                for (int k = 1; k < C; ++k) {
                    double cur = tables[l].by_size[static_cast<std::size_t>(k)];
                    double nxt = tables[l + 1].by_size[static_cast<std::size_t>(k)];
                    if (cur > 1e-12 && cur <= 0.5) REQUIRE(nxt < cur);
                }
        }
    }
}
