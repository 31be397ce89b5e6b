#include <doctest.h>

#include <cmath>
#include <random>

#include "pbp/normal.hpp"
#include "pbp/oracle.hpp"
#include "test_support.hpp"

using namespace pbp;

TEST_CASE("weight sampling oracle") {
    SUBCASE("point network has no spread") {
        std::mt19937_64 rng(1);
        auto net = test::random_network({3, 4, 1}, rng);
        for (auto& l : net.layers)
            for (double& v : l.variances.flat()) v = 0.0;
        auto x = test::random_input(3, rng);
        auto e = oracle::mc_forward_moments(net, x, 10000, 1);
        CHECK(e.variance < 1e-20);
    }
    SUBCASE("single rectified unit") {
        auto net = NetworkPosterior::uniform({1, 1, 1});
        // a = w * 1 / sqrt(2) with w ~ N(0, 2), so a ~ N(0, 1); the output layer passes max(0, a) through
        net.layers[0].means(0, 0) = 0.0;
        net.layers[0].variances(0, 0) = 2.0;
        net.layers[0].means(0, 1) = 0.0;
        net.layers[0].variances(0, 1) = 0.0;
        net.layers[1].means(0, 0) = std::sqrt(2.0);
        net.layers[1].variances(0, 0) = 0.0;
        net.layers[1].means(0, 1) = 0.0;
        net.layers[1].variances(0, 1) = 0.0;
        std::vector<double> x{1.0};
        auto e = oracle::mc_forward_moments(net, x, 1'000'000, 2);
        CHECK(std::abs(e.mean - normal::kInvSqrt2Pi) < 3 * e.mean_se);
        CHECK(e.mean == doctest::Approx(0.3989).epsilon(1e-2));
    }
    SUBCASE("standard error halves when samples quadruple") {
        std::mt19937_64 rng(3);
        auto net = test::random_network({2, 5, 1}, rng);
        auto x = test::random_input(2, rng);
        auto a = oracle::mc_forward_moments(net, x, 40000, 4);
        auto b = oracle::mc_forward_moments(net, x, 160000, 5);
        CHECK(a.mean_se / b.mean_se == doctest::Approx(2.0).epsilon(0.2));
        CHECK(a.variance_se / b.variance_se == doctest::Approx(2.0).epsilon(0.2));
    }
    SUBCASE("chunking is deterministic") {
        std::mt19937_64 rng(6);
        auto net = test::random_network({2, 3, 1}, rng);
        auto x = test::random_input(2, rng);
        auto a = oracle::mc_forward_moments(net, x, 10000, 7, 4);
        auto b = oracle::mc_forward_moments(net, x, 10000, 7, 4);
        CHECK(a.mean == b.mean);
        CHECK(a.variance == b.variance);
    }
}

TEST_CASE("rectifier sampling oracle") {
    auto e = oracle::mc_relu_moments(0.0, 1.0, 1'000'000, 1);
    CHECK(std::abs(e.mean - normal::kInvSqrt2Pi) < 3 * e.mean_se);
    CHECK(std::abs(e.variance - (0.5 - 0.5 / M_PI)) < 3 * e.variance_se);
}

TEST_CASE("Gamma quadrature oracle") {
    const GammaDist g{6.0, 4.0};
    SUBCASE("constant factor") {
        auto q = oracle::gamma_tilted_moments_quadrature(g, [](double) { return 0.0; });
        CHECK(q.mean == doctest::Approx(6.0 / 4.0).epsilon(1e-10));
        CHECK(q.second == doctest::Approx(6.0 * 7.0 / 16.0).epsilon(1e-10));
        CHECK(std::abs(q.log_z) < 1e-10);
        CHECK(std::abs(q.log_z1) < 1e-10);
        CHECK(std::abs(q.log_z2) < 1e-10);
    }
    SUBCASE("monomial factor") {
        auto q = oracle::gamma_tilted_moments_quadrature(g, [](double l) { return std::log(l); });
        CHECK(q.mean == doctest::Approx(7.0 / 4.0).epsilon(1e-10));
        CHECK(q.second == doctest::Approx(7.0 * 8.0 / 16.0).epsilon(1e-10));
        CHECK(q.log_z == doctest::Approx(std::log(6.0 / 4.0)).epsilon(1e-10));
    }
    SUBCASE("tighter tolerance agrees") {
        auto f = [](double l) { return normal::log_density(2.5, 0.0, 1.0 / l + 0.3); };
        auto a = oracle::gamma_tilted_moments_quadrature(g, f, 1e-9);
        auto b = oracle::gamma_tilted_moments_quadrature(g, f, 5e-10);
        CHECK(std::abs(a.mean - b.mean) / b.mean < 1e-9);
        CHECK(std::abs(a.second - b.second) / b.second < 1e-9);
    }
}

TEST_CASE("finite-difference oracle") {
    std::mt19937_64 rng(8);
    auto net = test::random_network({2, 3, 1}, rng);
    auto x = test::random_input(2, rng);
    auto g = oracle::fd_logz_gradients(net, x, 0.5);
    CHECK(g.d_mean.size() == 2);
    CHECK(g.d_mean[0].rows() == 3);
    CHECK(g.d_mean[0].cols() == 3);
    CHECK_THROWS(oracle::fd_logz_gradients(net, x, 0.5, 0.0));
    CHECK_THROWS(oracle::fd_logz_gradients(net, x, 0.5, 1e-300));
}

TEST_CASE("conjugate oracle") {
    auto p = oracle::conjugate_gaussian_posterior({1.0, 2.0}, 3.0, 1.0);
    CHECK(p.mean == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
    CHECK(p.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}
