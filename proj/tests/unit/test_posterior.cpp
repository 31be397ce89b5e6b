#include <doctest.h>

#include <cmath>
#include <random>

#include "pbp/posterior.hpp"

using namespace pbp;

TEST_CASE("uniform network shapes include the bias column") {
    SUBCASE("one hidden layer") {
        auto net = NetworkPosterior::uniform({13, 50, 1});
        REQUIRE(net.layers.size() == 2);
        CHECK(net.layers[0].rows() == 50);
        CHECK(net.layers[0].cols() == 14);
        CHECK(net.layers[1].rows() == 1);
        CHECK(net.layers[1].cols() == 51);
        CHECK(net.weight_count() == 50 * 14 + 51);
    }
    SUBCASE("no hidden layer") {
        auto net = NetworkPosterior::uniform({1, 1});
        REQUIRE(net.layers.size() == 1);
        CHECK(net.layers[0].rows() == 1);
        CHECK(net.layers[0].cols() == 2);
    }
    SUBCASE("three layers") {
        auto net = NetworkPosterior::uniform({4, 3, 2, 1});
        REQUIRE(net.layers.size() == 3);
        CHECK((net.layers[0].rows() == 3 && net.layers[0].cols() == 5));
        CHECK((net.layers[1].rows() == 2 && net.layers[1].cols() == 4));
        CHECK((net.layers[2].rows() == 1 && net.layers[2].cols() == 3));
    }
}

TEST_CASE("uniform state is flat") {
    auto net = NetworkPosterior::uniform({3, 4, 1});
    net.for_each_weight([&](WeightIndex w) {
        CHECK(net.weight(w).mean == 0.0);
        CHECK(net.weight(w).is_uniform());
    });
    CHECK(net.noise == GammaDist{1.0, 0.0});
    CHECK(net.prior == GammaDist{1.0, 0.0});
    CHECK_FALSE(variances_valid(net));
}

TEST_CASE("invalid architectures are rejected") {
    CHECK_THROWS_AS(NetworkPosterior::uniform({}), InvalidArchitecture);
    CHECK_THROWS_AS(NetworkPosterior::uniform({3}), InvalidArchitecture);
    CHECK_THROWS_AS(NetworkPosterior::uniform({3, 0, 1}), InvalidArchitecture);
    CHECK_THROWS_AS(NetworkPosterior::uniform({3, 2}), InvalidArchitecture);
}

TEST_CASE("config defaults") {
    PbpConfig c;
    CHECK(c.prior_shape_lambda == 6.0);
    CHECK(c.prior_rate_lambda == 6.0);
    CHECK(c.prior_shape_gamma == 6.0);
    CHECK(c.prior_rate_gamma == 6.0);
    CHECK(c.epochs == 40);
    CHECK(c.layer_sizes(7) == std::vector<std::size_t>{7, 50, 1});
}

TEST_CASE("mean perturbation") {
    auto base = NetworkPosterior::uniform({3, 5, 1});
    for (auto& layer : base.layers)
        for (double& v : layer.variances.flat()) v = 1.2;

    SUBCASE("deterministic under a fixed seed, variances untouched") {
        auto a = base;
        auto b = base;
        std::mt19937_64 r1(42), r2(42);
        perturb_means(a, r1);
        perturb_means(b, r2);
        CHECK(a == b);
        for (std::size_t l = 0; l < a.layers.size(); ++l) CHECK(a.layers[l].variances == base.layers[l].variances);
        CHECK(a.layers[0].means != base.layers[0].means);
    }

    SUBCASE("variance 1/(rows+1) for a 50-unit layer") {
        auto net = NetworkPosterior::uniform({1, 50, 1});
        std::mt19937_64 rng(7);
        double sum = 0.0, sum_sq = 0.0;
        std::size_t n = 0;
        while (n < 100000) {
            perturb_means(net, rng);
            for (double m : net.layers[0].means.flat()) {
                sum += m;
                sum_sq += m * m;
                ++n;
            }
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        CHECK(std::abs(var - 1.0 / 51.0) < 0.05 / 51.0);
    }
}
