#include "pbp/predictor.hpp"

#include <cmath>
#include <stdexcept>

#include "pbp/forward.hpp"
#include "pbp/normal.hpp"

namespace pbp {

namespace {

void check_sizes(std::size_t predictions, std::size_t targets) {
    if (predictions == 0) throw std::invalid_argument("empty test set");
    if (predictions != targets) throw std::invalid_argument("prediction and target counts differ");
}

}  // namespace

double noise_floor(const NetworkPosterior& net, const NormStats& stats) {
    return net.noise.collapsed_variance(0) * stats.target_std * stats.target_std;
}

PredictiveGaussian predict(const NetworkPosterior& net, const NormStats& stats, std::span<const double> x_raw) {
    const auto x = stats.normalize_features(x_raw);
    const auto out = forward_output_moments(net, x);
    const double var = net.noise.collapsed_variance(0) + out.variance;
    return {stats.denormalize_target(out.mean), var * stats.target_std * stats.target_std};
}

std::vector<PredictiveGaussian> predict_all(const NetworkPosterior& net, const NormStats& stats, const Matrix& x_raw) {
    std::vector<PredictiveGaussian> out;
    out.reserve(x_raw.rows());
    for (std::size_t r = 0; r < x_raw.rows(); ++r) out.push_back(predict(net, stats, x_raw.row(r)));
    return out;
}

double rmse(std::span<const PredictiveGaussian> predictions, std::span<const double> targets) {
    check_sizes(predictions.size(), targets.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i].mean - targets[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(predictions.size()));
}

double test_log_likelihood(std::span<const PredictiveGaussian> predictions, std::span<const double> targets) {
    check_sizes(predictions.size(), targets.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        sum += normal::log_density(targets[i], predictions[i].mean, predictions[i].variance);
    return sum / static_cast<double>(predictions.size());
}

Metrics evaluate(const NetworkPosterior& net, const NormStats& stats, const Dataset& test) {
    const auto p = predict_all(net, stats, test.features);
    return {rmse(p, test.targets), test_log_likelihood(p, test.targets)};
}

}  // namespace pbp
