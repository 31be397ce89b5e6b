#include "pbp/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace pbp {

namespace {

double training_rmse(const NetworkPosterior& net, const Dataset& data) {
    double ss = 0.0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double e = forward_output_moments(net, data.features.row(r)).mean - data.targets[r];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(data.size()));
}

}  // namespace

TrainResult initialize(std::size_t input_dim, const PbpConfig& config, std::mt19937_64& rng) {
    TrainResult result{NetworkPosterior::uniform(config.layer_sizes(input_dim)), {}, {}};
    auto& net = result.net;

    // The hyperprior factors share the Gamma form of q, so their update is exact.
    net.noise = {config.prior_shape_gamma, config.prior_rate_gamma};
    net.prior = {config.prior_shape_lambda, config.prior_rate_lambda};

    result.sites = PriorSiteStore(net);
    net.for_each_weight([&](WeightIndex w) { incorporate_prior_factor(net, w, result.sites); });
    perturb_means(net, rng);
    return result;
}

TrainResult train(const Dataset& data, const PbpConfig& config, std::mt19937_64& rng) {
    if (data.size() == 0) throw DataError("empty training set");
    const auto start = std::chrono::steady_clock::now();

    TrainResult result = initialize(data.dim(), config, rng);
    auto& net = result.net;
    auto& report = result.report;
    const std::size_t refresh_every = config.refresh_every == 0 ? data.size() : config.refresh_every;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t since_refresh = 0;

    auto refresh = [&] {
        const auto r = ep_refresh_prior(net, result.sites);
        report.sites_refreshed += r.refreshed;
        report.sites_skipped += r.skipped;
        since_refresh = 0;
    };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t skipped = 0;
        for (std::size_t n : order) {
            const auto u = incorporate_likelihood_factor(net, data.features.row(n), data.targets[n]);
            ++report.examples_seen;
            if (u.skipped) {
                ++skipped;
            } else {
                report.undo_events += u.undone;
                report.weight_updates += net.weight_count();
                report.gamma_rejections += u.gamma_rejected ? 1 : 0;
            }
            if (++since_refresh == refresh_every) refresh();
        }
        if (since_refresh != 0) refresh();
        report.examples_skipped += skipped;
        report.max_epoch_skip_rate =
            std::max(report.max_epoch_skip_rate, static_cast<double>(skipped) / static_cast<double>(data.size()));
        if (static_cast<double>(skipped) > kMaxSkipRate * static_cast<double>(data.size()))
            throw NumericFailure("epoch " + std::to_string(epoch + 1) + ": skipped " + std::to_string(skipped) +
                                 " of " + std::to_string(data.size()) + " examples (non-finite log normalizer)");
        ++report.epochs_run;
        report.epoch_rmse.push_back(training_rmse(net, data));
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace pbp
