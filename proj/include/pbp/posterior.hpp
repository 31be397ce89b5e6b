#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "pbp/matrix.hpp"

namespace pbp {

// Variance value marking a weight whose posterior is still the improper
// uniform (flat) initial state. Only prior-factor incorporation accepts it.
inline constexpr double kUniformVariance = std::numeric_limits<double>::infinity();

struct GaussianScalar {
    double mean = 0.0;
    double variance = kUniformVariance;

    bool is_uniform() const { return variance == kUniformVariance; }
    bool operator==(const GaussianScalar&) const = default;
};

// Gamma(shape, rate). rate == 0 only in the uninitialized uniform state.
struct GammaDist {
    double shape = 1.0;
    double rate = 0.0;

    double mean() const { return shape / rate; }

    // Variance of the Gaussian with the same mean and variance as the
    // Student-t obtained by integrating a N(. | 0, 1/precision) against this
    // Gamma, with the shape raised by `shift`.
    double collapsed_variance(int shift = 0) const { return rate / (shape + shift - 1.0); }

    bool operator==(const GammaDist&) const = default;
};

struct LayerPosterior {
    Matrix means;
    Matrix variances;

    LayerPosterior() = default;
    LayerPosterior(std::size_t rows, std::size_t cols)
        : means(rows, cols, 0.0), variances(rows, cols, kUniformVariance) {}

    std::size_t rows() const { return means.rows(); }
    std::size_t cols() const { return means.cols(); }

    GaussianScalar weight(std::size_t i, std::size_t j) const { return {means(i, j), variances(i, j)}; }
    void set_weight(std::size_t i, std::size_t j, GaussianScalar w) {
        means(i, j) = w.mean;
        variances(i, j) = w.variance;
    }

    bool operator==(const LayerPosterior&) const = default;
};

struct WeightIndex {
    std::size_t layer = 0;
    std::size_t row = 0;
    std::size_t col = 0;
};

// Factored approximation: one Gaussian per weight (bias column included)
// plus Gamma posteriors for the noise precision and the prior precision.
struct NetworkPosterior {
    std::vector<std::size_t> layer_sizes;  // [D, hidden..., 1]
    std::vector<LayerPosterior> layers;
    GammaDist noise;  // gamma
    GammaDist prior;  // lambda

    // Flat state: zero means, uniform variances, Gamma(1, 0) hyperposteriors.
    static NetworkPosterior uniform(const std::vector<std::size_t>& layer_sizes);

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t weight_count() const;

    template <typename F>
    void for_each_weight(F&& f) const {
        for (std::size_t l = 0; l < layers.size(); ++l)
            for (std::size_t i = 0; i < layers[l].rows(); ++i)
                for (std::size_t j = 0; j < layers[l].cols(); ++j) f(WeightIndex{l, i, j});
    }

    GaussianScalar weight(WeightIndex w) const { return layers[w.layer].weight(w.row, w.col); }
    void set_weight(WeightIndex w, GaussianScalar g) { layers[w.layer].set_weight(w.row, w.col, g); }

    bool operator==(const NetworkPosterior&) const = default;
};

struct PbpConfig {
    std::vector<std::size_t> hidden_layer_sizes{50};
    int epochs = 40;
    double prior_shape_lambda = 6.0;
    double prior_rate_lambda = 6.0;
    double prior_shape_gamma = 6.0;
    double prior_rate_gamma = 6.0;
    std::uint64_t seed = 1;
    // Likelihood factors between EP refreshes of the prior sites; 0 means
    // once per pass over the data.
    std::size_t refresh_every = 0;

    std::vector<std::size_t> layer_sizes(std::size_t input_dim) const;

    bool operator==(const PbpConfig&) const = default;
};

class InvalidArchitecture : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Replaces every mean with a draw from N(0, 1/(rows + 1)), where rows is the
// number of output units of the layer holding the weight.
void perturb_means(NetworkPosterior& net, std::mt19937_64& rng);

// True when every variance is finite and strictly positive.
bool variances_valid(const NetworkPosterior& net);

}  // namespace pbp
