#include "pbp/experiments.hpp"

#include <cstdio>
#include <ostream>
#include <string>

#include "pbp/parallel.hpp"
#include "pbp/predictor.hpp"
#include "pbp/summary.hpp"

namespace pbp {

namespace {

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::vector<SplitResult> run_benchmark(const Dataset& data, const BenchmarkConfig& config) {
    return parallel_map(config.splits, config.jobs, [&](std::size_t i) {
        SplitResult r;
        r.split = i;
        r.seed = config.pbp.seed + i;
        std::mt19937_64 rng(r.seed);
        const auto parts = split(data, config.test_fraction, rng);
        const auto norm = normalize(parts.train);
        auto trained = train(norm.data, config.pbp, rng);
        const auto m = evaluate(trained.net, norm.stats, parts.test);
        r.rmse = m.rmse;
        r.log_likelihood = m.log_likelihood;
        r.report = trained.report;
        r.variances_valid = variances_valid(trained.net);
        return r;
    });
}

void write_benchmark_csv(std::ostream& out, std::span<const SplitResult> results) {
    out << "split,seed,rmse,rmse_stderr,test_ll,test_ll_stderr\n";
    std::vector<double> rmses, lls;
    for (const auto& r : results) {
        out << r.split << ',' << r.seed << ',' << real(r.rmse) << ",," << real(r.log_likelihood) << ",\n";
        rmses.push_back(r.rmse);
        lls.push_back(r.log_likelihood);
    }
    const auto rs = summarize(rmses);
    const auto ls = summarize(lls);
    out << "mean,," << real(rs.mean) << ',' << real(rs.std_error) << ',' << real(ls.mean) << ','
        << real(ls.std_error) << '\n';
}

std::vector<ActiveRun> run_active_repetitions(const Dataset& data, AcquisitionPolicy policy,
                                              const ActiveExperimentConfig& config) {
    return parallel_map(config.repetitions, config.jobs, [&](std::size_t r) {
        return run_active_experiment(data, policy, config.active, config.seed + r);
    });
}

void write_curve_csv(std::ostream& out, std::span<const ActiveRun> runs) {
    out << "step,mean_rmse,stderr\n";
    if (runs.empty()) return;
    for (std::size_t step = 0; step < runs.front().rmse_history.size(); ++step) {
        std::vector<double> xs;
        for (const auto& run : runs) xs.push_back(run.rmse_history.at(step));
        const auto s = summarize(xs);
        out << step << ',' << real(s.mean) << ',' << real(s.std_error) << '\n';
    }
}

}  // namespace pbp
