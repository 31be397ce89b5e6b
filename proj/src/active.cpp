#include "pbp/active.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pbp/forward.hpp"
#include "pbp/predictor.hpp"
#include "pbp/trainer.hpp"

namespace pbp {

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t step = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(step)};
    return std::mt19937_64(seq);
}

enum Stream : std::uint64_t { kSplit = 1, kTrain = 2, kRandomPick = 3 };

}  // namespace

std::string to_string(AcquisitionPolicy p) { return p == AcquisitionPolicy::Active ? "active" : "random"; }

Pool::Pool(Dataset data) : features_(std::move(data.features)), targets_(std::move(data.targets)) {}

Pool::Taken Pool::take(std::size_t index) {
    if (index >= size()) throw std::out_of_range("pool index out of range");
    Taken t{std::vector<double>(features_.row(index).begin(), features_.row(index).end()), targets_[index]};
    ++targets_read_;

    Matrix rest(size() - 1, features_.cols());
    for (std::size_t r = 0, k = 0; r < size(); ++r) {
        if (r == index) continue;
        std::copy(features_.row(r).begin(), features_.row(r).end(), rest.row(k++).begin());
    }
    features_ = std::move(rest);
    targets_.erase(targets_.begin() + static_cast<std::ptrdiff_t>(index));
    return t;
}

std::size_t acquire_next(const NetworkPosterior& net, const NormStats& stats, const Matrix& pool_features) {
    if (pool_features.rows() == 0) throw std::invalid_argument("cannot acquire from an empty pool");
    std::size_t best = 0;
    double best_var = -1.0;
    for (std::size_t r = 0; r < pool_features.rows(); ++r) {
        const double v = predict(net, stats, pool_features.row(r)).variance;
        if (v > best_var) {
            best_var = v;
            best = r;
        }
    }
    return best;
}

ActiveRun run_active_experiment(const Dataset& data, AcquisitionPolicy policy, const ActiveConfig& config,
                                std::uint64_t seed) {
    const std::size_t needed = config.initial_train + config.test_size + config.acquisitions;
    if (data.size() < needed)
        throw DataError("active learning needs at least " + std::to_string(needed) + " rows, dataset has " +
                        std::to_string(data.size()));

    auto split_rng = substream(seed, kSplit);
    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), split_rng);

    const auto train_end = perm.begin() + static_cast<std::ptrdiff_t>(config.initial_train);
    const auto test_end = train_end + static_cast<std::ptrdiff_t>(config.test_size);
    std::vector<std::size_t> train_rows(perm.begin(), train_end);
    const std::vector<std::size_t> test_rows(train_end, test_end);
    std::vector<std::size_t> pool_rows(test_end, perm.end());

    ActiveRun run;
    run.initial_train_rows = train_rows;
    Dataset train = data.subset(train_rows);
    const Dataset test = data.subset(test_rows);
    Pool pool(data.subset(pool_rows));
    auto pick_rng = substream(seed, kRandomPick);

    for (std::size_t step = 0;; ++step) {
        const auto norm = normalize(train);
        auto rng = substream(seed, kTrain, step);
        const auto result = pbp::train(norm.data, config.pbp, rng);
        run.undo_events += result.report.undo_events;
        run.weight_updates += result.report.weight_updates;
        run.examples_skipped += result.report.examples_skipped;
        run.examples_seen += result.report.examples_seen;
        run.max_epoch_skip_rate = std::max(run.max_epoch_skip_rate, result.report.max_epoch_skip_rate);
        run.variances_valid = run.variances_valid && variances_valid(result.net);
        run.rmse_history.push_back(evaluate(result.net, norm.stats, test).rmse);
        if (step == config.acquisitions) break;

        std::size_t pick = 0;
        if (policy == AcquisitionPolicy::Active) {
            pick = acquire_next(result.net, norm.stats, pool.features());
        } else {
            std::uniform_int_distribution<std::size_t> u(0, pool.size() - 1);
            pick = u(pick_rng);
        }
        run.acquired_rows.push_back(pool_rows[pick]);
        pool_rows.erase(pool_rows.begin() + static_cast<std::ptrdiff_t>(pick));

        const auto taken = pool.take(pick);
        Matrix grown(train.size() + 1, train.dim());
        for (std::size_t r = 0; r < train.size(); ++r)
            std::copy(train.features.row(r).begin(), train.features.row(r).end(), grown.row(r).begin());
        std::copy(taken.x.begin(), taken.x.end(), grown.row(train.size()).begin());
        train.features = std::move(grown);
        train.targets.push_back(taken.y);
    }
    run.pool_audit_ok = pool.targets_read() == run.acquired_rows.size();
    return run;
}

}  // namespace pbp
