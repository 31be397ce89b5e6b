#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "pbp/active.hpp"
#include "pbp/experiments.hpp"
#include "pbp/predictor.hpp"
#include "pbp/trainer.hpp"
#include "test_support.hpp"

using namespace pbp;

namespace {

ActiveConfig small_config() {
    ActiveConfig c;
    c.initial_train = 10;
    c.test_size = 30;
    c.acquisitions = 4;
    c.pbp.hidden_layer_sizes = {5};
    c.pbp.epochs = 3;
    return c;
}

Dataset synthetic(std::size_t n) {
    std::mt19937_64 rng(31);
    return test::cubic_toy(n, rng);
}

}  // namespace

TEST_CASE("acquisition rule") {
    std::mt19937_64 rng(1);
    auto net = test::random_network({2, 4, 1}, rng);
    const auto stats = NormStats::identity(2);

    SUBCASE("single point") {
        Matrix pool(1, 2, 0.5);
        CHECK(acquire_next(net, stats, pool) == 0);
    }
    SUBCASE("ties go to the first index") {
        for (auto& l : net.layers)
            for (double& v : l.variances.flat()) v = 0.0;
        Matrix pool(5, 2);
        for (double& v : pool.flat()) v = std::normal_distribution<double>()(rng);
        CHECK(acquire_next(net, stats, pool) == 0);
    }
    SUBCASE("empty pool") {
        Matrix pool(0, 2);
        CHECK_THROWS(acquire_next(net, stats, pool));
    }
    SUBCASE("largest variance wins") {
        Matrix pool(6, 2);
        for (double& v : pool.flat()) v = std::normal_distribution<double>()(rng);
        const auto pick = acquire_next(net, stats, pool);
        for (std::size_t r = 0; r < 6; ++r)
            CHECK(predict(net, stats, pool.row(r)).variance <= predict(net, stats, pool.row(pick)).variance);
    }
    SUBCASE("far point on the toy model") {
        std::mt19937_64 data_rng(2);
        auto raw = test::cubic_toy(20, data_rng);
        auto norm = normalize(raw);
        PbpConfig cfg;
        cfg.hidden_layer_sizes = {50};
        std::mt19937_64 train_rng(3);
        auto r = train(norm.data, cfg, train_rng);
        Matrix pool(2, 1);
        pool(0, 0) = 0.5;
        pool(1, 0) = 12.0;
        CHECK(acquire_next(r.net, norm.stats, pool) == 1);
    }
}

TEST_CASE("pool hands out targets only on removal") {
    Dataset d;
    d.features = Matrix(3, 1);
    d.features(0, 0) = 1;
    d.features(1, 0) = 2;
    d.features(2, 0) = 3;
    d.targets = {10, 20, 30};
    Pool pool(d);
    CHECK(pool.targets_read() == 0);
    auto t = pool.take(1);
    CHECK(t.x == std::vector<double>{2});
    CHECK(t.y == 20);
    CHECK(pool.size() == 2);
    CHECK(pool.features()(1, 0) == 3);
    CHECK(pool.targets_read() == 1);
    CHECK_THROWS(pool.take(5));
}

TEST_CASE("active experiment loop") {
    const auto data = synthetic(80);
    const auto cfg = small_config();

    auto a = run_active_experiment(data, AcquisitionPolicy::Active, cfg, 5);
    auto r1 = run_active_experiment(data, AcquisitionPolicy::Random, cfg, 5);
    auto r2 = run_active_experiment(data, AcquisitionPolicy::Random, cfg, 5);

    CHECK(a.rmse_history.size() == cfg.acquisitions + 1);
    CHECK(r1.rmse_history == r2.rmse_history);
    CHECK(r1.acquired_rows == r2.acquired_rows);
    CHECK(a.initial_train_rows == r1.initial_train_rows);
    CHECK(a.pool_audit_ok);
    CHECK(r1.pool_audit_ok);
    CHECK(a.acquired_rows.size() == cfg.acquisitions);

    std::set<std::size_t> initial(a.initial_train_rows.begin(), a.initial_train_rows.end());
    std::set<std::size_t> acquired(a.acquired_rows.begin(), a.acquired_rows.end());
    CHECK(acquired.size() == cfg.acquisitions);
    for (auto row : acquired) CHECK(initial.count(row) == 0);

    auto other = run_active_experiment(data, AcquisitionPolicy::Random, cfg, 6);
    CHECK(other.initial_train_rows != r1.initial_train_rows);

    CHECK_THROWS_AS(run_active_experiment(synthetic(40), AcquisitionPolicy::Active, cfg, 1), DataError);
}

TEST_CASE("learning curve file") {
    const auto data = synthetic(80);
    ActiveExperimentConfig cfg;
    cfg.active = small_config();
    cfg.repetitions = 3;
    cfg.jobs = 2;
    auto runs = run_active_repetitions(data, AcquisitionPolicy::Random, cfg);
    REQUIRE(runs.size() == 3);
    CHECK(runs[1].rmse_history == run_active_experiment(data, AcquisitionPolicy::Random, cfg.active, 2).rmse_history);

    std::ostringstream out;
    write_curve_csv(out, runs);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,mean_rmse,stderr");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.starts_with(std::to_string(rows) + ","));
        ++rows;
    }
    CHECK(rows == 5);
}
