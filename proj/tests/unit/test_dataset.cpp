#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "pbp/dataset.hpp"
#include "test_support.hpp"

using namespace pbp;

namespace {

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

std::string error_of(const std::filesystem::path& p, const std::string& target = "last") {
    try {
        load_csv(p, target);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("CSV loading") {
    test::TempDir dir;

    SUBCASE("headerless, target last") {
        auto d = load_csv(dir.file("a.csv", "1,2\n3,4\n5,6\n"));
        CHECK(d.size() == 3);
        CHECK(d.dim() == 1);
        CHECK(d.targets == std::vector<double>{2, 4, 6});
        CHECK(d.features(2, 0) == 5);
        CHECK(d.feature_names.empty());
    }
    SUBCASE("header detected, target by name and by index") {
        auto p = dir.file("b.csv", "x1,y,x2\n1,2,3\n4,5,6\n");
        auto d = load_csv(p, "y");
        CHECK(d.dim() == 2);
        CHECK(d.targets == std::vector<double>{2, 5});
        CHECK(d.feature_names == std::vector<std::string>{"x1", "x2"});
        CHECK(d.target_name == "y");
        CHECK(d.features(1, 1) == 6);
        auto e = load_csv(p, "0");
        CHECK(e.targets == std::vector<double>{1, 4});
    }
    SUBCASE("non-finite cell names row and column") {
        auto msg = error_of(dir.file("c.csv", "a,b\n1,2\n3,NaN\n"));
        CHECK(contains(msg, "row 2"));
        CHECK(contains(msg, "column 2"));
        auto msg2 = error_of(dir.file("d.csv", "1,2\nfoo,3\n"));
        CHECK(contains(msg2, "row 2"));
        CHECK(contains(msg2, "column 1"));
        auto msg3 = error_of(dir.file("inf.csv", "1,2\n3,inf\n"));
        CHECK(contains(msg3, "column 2"));
    }
    SUBCASE("missing column and file") {
        CHECK(contains(error_of(dir.file("e.csv", "a,b\n1,2\n"), "z"), "z"));
        CHECK(contains(error_of(dir.file("f.csv", "1,2\n"), "7"), "7"));
        CHECK(contains(error_of(dir / "nope.csv"), "nope.csv"));
        CHECK_FALSE(error_of(dir.file("g.csv", "1,2\n3\n")).empty());
    }
    SUBCASE("feature-only file") {
        auto m = load_feature_csv(dir.file("h.csv", "a,b,c\n1,2,3\n"));
        CHECK(m.rows() == 1);
        CHECK(m.cols() == 3);
    }
    SUBCASE("bundled Boston file") {
        auto d = load_csv(std::filesystem::path(PBP_DATA_DIR) / "boston_housing.csv");
        CHECK(d.size() == 506);
        CHECK(d.dim() == 13);
        CHECK(d.target_name == "MEDV");
    }
}

TEST_CASE("train/test split") {
    Dataset d;
    d.features = Matrix(506, 1);
    for (std::size_t i = 0; i < 506; ++i) {
        d.features(i, 0) = static_cast<double>(i);
        d.targets.push_back(static_cast<double>(i));
    }
    std::mt19937_64 a(3), b(3), c(4);
    auto s = split(d, 0.1, a);
    CHECK(s.train.size() == 456);
    CHECK(s.test.size() == 50);
    auto again = split(d, 0.1, b);
    CHECK(again.train_rows == s.train_rows);
    CHECK(split(d, 0.1, c).train_rows != s.train_rows);

    std::set<std::size_t> all(s.train_rows.begin(), s.train_rows.end());
    for (auto r : s.test_rows) CHECK(all.insert(r).second);
    CHECK(all.size() == 506);
    CHECK(s.test.features(0, 0) == static_cast<double>(s.test_rows[0]));

    CHECK_THROWS(split(d, 0.0, a));
    CHECK_THROWS(split(d, 1.0, a));
    Dataset one = d.subset(std::vector<std::size_t>{0});
    CHECK_THROWS(split(one, 0.1, a));
}

TEST_CASE("normalization") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(5.0, 3.0);
    Dataset d;
    d.features = Matrix(40, 3);
    for (std::size_t r = 0; r < 40; ++r) {
        d.features(r, 0) = n(rng);
        d.features(r, 1) = 7.0;
        d.features(r, 2) = 100.0 * n(rng);
        d.targets.push_back(n(rng));
    }
    auto norm = normalize(d);
    for (std::size_t c : {0u, 2u}) {
        double mean = 0.0, var = 0.0;
        for (std::size_t r = 0; r < 40; ++r) mean += norm.data.features(r, c);
        mean /= 40.0;
        for (std::size_t r = 0; r < 40; ++r) var += std::pow(norm.data.features(r, c) - mean, 2);
        var /= 40.0;
        CHECK(std::abs(mean) < 1e-12);
        CHECK(std::abs(var - 1.0) < 1e-10);
    }
    CHECK(norm.stats.feature_std[1] == 1.0);
    for (std::size_t r = 0; r < 40; ++r) CHECK(norm.data.features(r, 1) == 0.0);
    for (double y : d.targets)
        CHECK(std::abs(norm.stats.denormalize_target(norm.stats.normalize_target(y)) - y) < 1e-12);

    // statistics come from the training rows only
    std::vector<std::size_t> first{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    auto train = d.subset(first);
    auto stats = NormStats::fit(train);
    auto test_view = apply(stats, d);
    CHECK(test_view.features(20, 0) == (d.features(20, 0) - stats.feature_mean[0]) / stats.feature_std[0]);
    CHECK(stats == normalize(train).stats);
}
