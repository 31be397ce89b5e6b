#pragma once

#include <span>
#include <vector>

#include "pbp/dataset.hpp"
#include "pbp/posterior.hpp"

namespace pbp {

// Gaussian predictive distribution in original target units.
struct PredictiveGaussian {
    double mean = 0.0;
    double variance = 0.0;
};

PredictiveGaussian predict(const NetworkPosterior& net, const NormStats& stats, std::span<const double> x_raw);
std::vector<PredictiveGaussian> predict_all(const NetworkPosterior& net, const NormStats& stats, const Matrix& x_raw);

// Observation-noise part of the predictive variance, original units.
double noise_floor(const NetworkPosterior& net, const NormStats& stats);

double rmse(std::span<const PredictiveGaussian> predictions, std::span<const double> targets);
double test_log_likelihood(std::span<const PredictiveGaussian> predictions, std::span<const double> targets);

struct Metrics {
    double rmse = 0.0;
    double log_likelihood = 0.0;
};

Metrics evaluate(const NetworkPosterior& net, const NormStats& stats, const Dataset& test);

}  // namespace pbp
