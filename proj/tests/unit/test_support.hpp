#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "pbp/dataset.hpp"
#include "pbp/posterior.hpp"

namespace pbp::test {

// Network with random means and strictly positive variances.
inline NetworkPosterior random_network(const std::vector<std::size_t>& sizes, std::mt19937_64& rng,
                                       double mean_scale = 1.0, double var_lo = 0.01, double var_hi = 0.5) {
    auto net = NetworkPosterior::uniform(sizes);
    std::normal_distribution<double> mean(0.0, mean_scale);
    std::uniform_real_distribution<double> var(var_lo, var_hi);
    for (auto& layer : net.layers) {
        for (double& m : layer.means.flat()) m = mean(rng);
        for (double& v : layer.variances.flat()) v = var(rng);
    }
    std::uniform_real_distribution<double> shape(2.0, 10.0), rate(0.5, 5.0);
    net.noise = {shape(rng), rate(rng)};
    net.prior = {shape(rng), rate(rng)};
    return net;
}

inline std::vector<double> random_input(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    std::vector<double> x(d);
    for (double& v : x) v = n(rng);
    return x;
}

// y = x^3 + N(0, 9), x ~ U[-4, 4].
inline Dataset cubic_toy(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::normal_distribution<double> noise(0.0, 3.0);
    Dataset d;
    d.features = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = u(rng);
        d.features(i, 0) = x;
        d.targets.push_back(x * x * x + noise(rng));
    }
    return d;
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("pbp-test-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name, const std::string& contents) const {
        auto p = path_ / name;
        std::ofstream(p) << contents;
        return p;
    }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace pbp::test
