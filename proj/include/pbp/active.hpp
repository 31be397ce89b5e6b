#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbp/dataset.hpp"
#include "pbp/posterior.hpp"

namespace pbp {

enum class AcquisitionPolicy { Active, Random };

std::string to_string(AcquisitionPolicy p);

// Unlabelled pool. A target can only be obtained by taking the point out of
// the pool, which is what the read counter audits.
class Pool {
public:
    explicit Pool(Dataset data);

    std::size_t size() const { return features_.rows(); }
    const Matrix& features() const { return features_; }

    struct Taken {
        std::vector<double> x;
        double y;
    };
    Taken take(std::size_t index);

    std::size_t targets_read() const { return targets_read_; }

private:
    Matrix features_;
    std::vector<double> targets_;
    std::size_t targets_read_ = 0;
};

// Index of the pool point with the largest predictive variance; ties go to
// the lowest index.
std::size_t acquire_next(const NetworkPosterior& net, const NormStats& stats, const Matrix& pool_features);

struct ActiveConfig {
    std::size_t initial_train = 20;
    std::size_t test_size = 100;
    std::size_t acquisitions = 9;
    PbpConfig pbp{.hidden_layer_sizes = {10}, .epochs = 40};
};

struct ActiveRun {
    std::vector<double> rmse_history;  // acquisitions + 1 test evaluations
    std::vector<std::size_t> initial_train_rows;
    std::vector<std::size_t> acquired_rows;  // rows of the original dataset
    bool pool_audit_ok = false;
    std::size_t undo_events = 0;
    std::size_t weight_updates = 0;
    std::size_t examples_skipped = 0;
    std::size_t examples_seen = 0;
    double max_epoch_skip_rate = 0.0;
    bool variances_valid = true;
};

// One repetition: random 20/100/rest split, train from scratch, then
// alternately acquire one pool point and retrain from scratch. The split and
// the training seeds depend only on `seed`, never on the policy.
ActiveRun run_active_experiment(const Dataset& data, AcquisitionPolicy policy, const ActiveConfig& config,
                                std::uint64_t seed);

}  // namespace pbp
