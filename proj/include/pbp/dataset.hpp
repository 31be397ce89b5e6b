#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbp/matrix.hpp"

namespace pbp {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dataset {
    Matrix features;  // N x D
    std::vector<double> targets;
    std::vector<std::string> feature_names;  // empty when the file had no header
    std::string target_name;

    std::size_t size() const { return targets.size(); }
    std::size_t dim() const { return features.cols(); }

    Dataset subset(std::span<const std::size_t> rows) const;
};

// Target column selector: "last", a zero-based index, or a header name.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column = "last");

// Feature-only CSV (optionally with a header); every column is a feature.
Matrix load_feature_csv(const std::filesystem::path& path);

struct TrainTestSplit {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

// Seeded permutation; the train part has ceil(N * (1 - test_fraction)) rows.
TrainTestSplit split(const Dataset& data, double test_fraction, std::mt19937_64& rng);

struct NormStats {
    std::vector<double> feature_mean;
    std::vector<double> feature_std;
    double target_mean = 0.0;
    double target_std = 1.0;

    static NormStats identity(std::size_t dim);
    // Population statistics; zero standard deviations are replaced by 1.
    static NormStats fit(const Dataset& train);

    std::vector<double> normalize_features(std::span<const double> x) const;
    double normalize_target(double y) const { return (y - target_mean) / target_std; }
    double denormalize_target(double y) const { return y * target_std + target_mean; }

    bool operator==(const NormStats&) const = default;
};

Dataset apply(const NormStats& stats, const Dataset& data);

struct Normalized {
    Dataset data;
    NormStats stats;
};

Normalized normalize(const Dataset& train);

}  // namespace pbp
