#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "pbp/dataset.hpp"
#include "pbp/factors.hpp"
#include "pbp/posterior.hpp"

namespace pbp {

struct TrainReport {
    int epochs_run = 0;
    std::size_t examples_seen = 0;
    std::size_t examples_skipped = 0;
    std::size_t undo_events = 0;
    std::size_t weight_updates = 0;  // weights x incorporated examples
    std::size_t gamma_rejections = 0;
    std::size_t sites_refreshed = 0;
    std::size_t sites_skipped = 0;
    double max_epoch_skip_rate = 0.0;
    std::vector<double> epoch_rmse;  // training-set predictive RMSE, normalized units
    double seconds = 0.0;

    double undo_rate() const {
        return weight_updates == 0 ? 0.0 : static_cast<double>(undo_events) / static_cast<double>(weight_updates);
    }
};

struct TrainResult {
    NetworkPosterior net;
    PriorSiteStore sites;
    TrainReport report;
};

// Raised when more than kMaxSkipRate of an epoch's examples had a
// non-finite log normalizer.
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kMaxSkipRate = 0.01;

// Hyperprior and weight-prior incorporation followed by the mean perturbation.
TrainResult initialize(std::size_t input_dim, const PbpConfig& config, std::mt19937_64& rng);

// `data` must already be normalized.
TrainResult train(const Dataset& data, const PbpConfig& config, std::mt19937_64& rng);

}  // namespace pbp
