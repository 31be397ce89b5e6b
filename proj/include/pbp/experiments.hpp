#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pbp/active.hpp"
#include "pbp/dataset.hpp"
#include "pbp/posterior.hpp"
#include "pbp/trainer.hpp"

namespace pbp {

struct BenchmarkConfig {
    PbpConfig pbp;
    std::size_t splits = 20;
    double test_fraction = 0.1;
    unsigned jobs = 1;
};

struct SplitResult {
    std::size_t split = 0;
    std::uint64_t seed = 0;
    double rmse = 0.0;
    double log_likelihood = 0.0;
    TrainReport report;
    bool variances_valid = false;
};

// Split i uses seed pbp.seed + i for both the split and the training run.
std::vector<SplitResult> run_benchmark(const Dataset& data, const BenchmarkConfig& config);

// Header "split,seed,rmse,rmse_stderr,test_ll,test_ll_stderr"; one row per
// split with empty stderr fields, then a "mean" row.
void write_benchmark_csv(std::ostream& out, std::span<const SplitResult> results);

struct ActiveExperimentConfig {
    ActiveConfig active;
    std::size_t repetitions = 40;
    unsigned jobs = 1;
    std::uint64_t seed = 1;
};

// Repetition r uses seed + r; all policies see the same splits.
std::vector<ActiveRun> run_active_repetitions(const Dataset& data, AcquisitionPolicy policy,
                                              const ActiveExperimentConfig& config);

// Header "step,mean_rmse,stderr"; step counts acquisitions made so far.
void write_curve_csv(std::ostream& out, std::span<const ActiveRun> runs);

}  // namespace pbp
