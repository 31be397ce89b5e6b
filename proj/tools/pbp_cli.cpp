#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pbp/active.hpp"
#include "pbp/dataset.hpp"
#include "pbp/experiments.hpp"
#include "pbp/forward.hpp"
#include "pbp/model_io.hpp"
#include "pbp/predictor.hpp"
#include "pbp/summary.hpp"
#include "pbp/trainer.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

struct Options {
    std::string data;
    std::string target = "last";
    std::vector<std::size_t> hidden;
    int epochs = 40;
    std::uint64_t seed = 1;
    double test_fraction = 0.1;
    std::size_t refresh_every = 0;
    std::size_t splits = 20;
    unsigned jobs = 1;
    std::string out;
    std::string model;
    std::string predict_target;
    // active learning
    std::size_t initial_train = 20;
    std::size_t test_size = 100;
    std::size_t acquisitions = 9;
    std::size_t repetitions = 40;
    std::string policy = "both";
    std::string out_prefix = "active";
};

pbp::PbpConfig pbp_config(const Options& o, std::size_t default_hidden) {
    pbp::PbpConfig c;
    c.hidden_layer_sizes = o.hidden.empty() ? std::vector<std::size_t>{default_hidden} : o.hidden;
    c.epochs = o.epochs;
    c.seed = o.seed;
    c.refresh_every = o.refresh_every;
    return c;
}

// Writes to the named file, or standard output for "" and "-".
template <typename F>
void with_output(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw pbp::DataError("cannot write " + path);
    write(out);
}

void print_report(std::ostream& out, const pbp::TrainReport& r) {
    out << "epochs_run: " << r.epochs_run << '\n'
        << "examples_seen: " << r.examples_seen << '\n'
        << "examples_skipped: " << r.examples_skipped << '\n'
        << "max_epoch_skip_rate: " << r.max_epoch_skip_rate << '\n'
        << "undo_events: " << r.undo_events << '\n'
        << "weight_updates: " << r.weight_updates << '\n'
        << "gamma_rejections: " << r.gamma_rejections << '\n'
        << "sites_refreshed: " << r.sites_refreshed << '\n'
        << "sites_skipped: " << r.sites_skipped << '\n'
        << "epoch_rmse:";
    for (double x : r.epoch_rmse) out << ' ' << x;
    out << '\n' << "seconds: " << r.seconds << '\n';
}

int cmd_train(const Options& o) {
    const auto data = pbp::load_csv(o.data, o.target);
    std::mt19937_64 rng(o.seed);
    pbp::Dataset train_set = data;
    pbp::Dataset test_set;
    if (o.test_fraction > 0.0) {
        auto parts = pbp::split(data, o.test_fraction, rng);
        train_set = std::move(parts.train);
        test_set = std::move(parts.test);
    }
    const auto norm = pbp::normalize(train_set);
    pbp::Model model;
    model.config = pbp_config(o, 50);
    model.norm = norm.stats;
    std::cerr << "training on " << train_set.size() << " rows, " << data.dim() << " features\n";
    auto result = pbp::train(norm.data, model.config, rng);
    model.net = std::move(result.net);
    model.sites = std::move(result.sites);
    pbp::save_model(o.out, model);

    print_report(std::cout, result.report);
    if (test_set.size() > 0) {
        const auto m = pbp::evaluate(model.net, model.norm, test_set);
        std::cout << "test_rows: " << test_set.size() << '\n'
                  << "test_rmse: " << m.rmse << '\n'
                  << "test_log_likelihood: " << m.log_likelihood << '\n';
    }
    std::cerr << "model written to " << o.out << '\n';
    return kOk;
}

int cmd_predict(const Options& o) {
    const auto model = pbp::load_model(o.model);
    pbp::Matrix x;
    if (o.predict_target.empty()) {
        x = pbp::load_feature_csv(o.data);
    } else {
        x = pbp::load_csv(o.data, o.predict_target).features;
    }
    const std::size_t d = model.net.input_dim();
    if (x.cols() != d)
        throw pbp::DataError(o.data + ": model expects " + std::to_string(d) + " features, file has " +
                             std::to_string(x.cols()));
    const auto predictions = pbp::predict_all(model.net, model.norm, x);
    with_output(o.out, [&](std::ostream& out) {
        out.precision(17);
        out << "mean,variance\n";
        for (const auto& p : predictions) out << p.mean << ',' << p.variance << '\n';
    });
    return kOk;
}

int cmd_benchmark(const Options& o) {
    const auto data = pbp::load_csv(o.data, o.target);
    pbp::BenchmarkConfig cfg;
    cfg.pbp = pbp_config(o, 50);
    cfg.splits = o.splits;
    cfg.test_fraction = o.test_fraction;
    cfg.jobs = o.jobs;
    std::cerr << "running " << cfg.splits << " splits on " << o.data << '\n';
    const auto results = pbp::run_benchmark(data, cfg);
    with_output(o.out, [&](std::ostream& out) { pbp::write_benchmark_csv(out, results); });

    std::vector<double> rmses, lls;
    for (const auto& r : results) {
        rmses.push_back(r.rmse);
        lls.push_back(r.log_likelihood);
    }
    const auto rs = pbp::summarize(rmses);
    const auto ls = pbp::summarize(lls);
    std::cerr << "test RMSE " << rs.mean << " +- " << rs.std_error << ", test LL " << ls.mean << " +- "
              << ls.std_error << '\n';
    return kOk;
}

int cmd_active(const Options& o) {
    const auto data = pbp::load_csv(o.data, o.target);
    pbp::ActiveExperimentConfig cfg;
    cfg.active.initial_train = o.initial_train;
    cfg.active.test_size = o.test_size;
    cfg.active.acquisitions = o.acquisitions;
    cfg.active.pbp = pbp_config(o, 10);
    cfg.repetitions = o.repetitions;
    cfg.jobs = o.jobs;
    cfg.seed = o.seed;

    std::vector<pbp::AcquisitionPolicy> policies;
    if (o.policy == "active" || o.policy == "both") policies.push_back(pbp::AcquisitionPolicy::Active);
    if (o.policy == "random" || o.policy == "both") policies.push_back(pbp::AcquisitionPolicy::Random);

    for (auto policy : policies) {
        const auto runs = pbp::run_active_repetitions(data, policy, cfg);
        const std::string path = o.out_prefix + "_" + pbp::to_string(policy) + ".csv";
        with_output(path, [&](std::ostream& out) { pbp::write_curve_csv(out, runs); });
        std::vector<double> final_rmse;
        for (const auto& r : runs) final_rmse.push_back(r.rmse_history.back());
        const auto s = pbp::summarize(final_rmse);
        std::cerr << pbp::to_string(policy) << ": final test RMSE " << s.mean << " +- " << s.std_error << " -> "
                  << path << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic backpropagation for Bayesian neural network regression"};
    app.require_subcommand(1);
    Options o;

    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--data", o.data, "CSV dataset")->required();
        sub->add_option("--target", o.target, "target column: 'last', zero-based index or header name");
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--hidden", o.hidden, "hidden layer sizes (repeat for more layers)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--epochs", o.epochs, "passes over the training data")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", o.seed, "seed for every random choice");
        sub->add_option("--refresh-every", o.refresh_every,
                        "likelihood factors between prior-site refreshes (0 = once per pass)");
    };

    auto* train = app.add_subcommand("train", "train on a split of a dataset and save the model");
    add_data(train);
    add_model(train);
    train->add_option("--test-fraction", o.test_fraction, "held-out fraction (0 trains on everything)")
        ->check(CLI::Range(0.0, 0.99));
    train->add_option("--out", o.out, "model file to write")->required();

    auto* predict = app.add_subcommand("predict", "predictive mean and variance for feature rows");
    predict->add_option("--model", o.model, "model file")->required();
    predict->add_option("--data", o.data, "CSV of feature rows")->required();
    predict->add_option("--drop-target", o.predict_target, "column to ignore if the file also holds targets");
    predict->add_option("--out", o.out, "output CSV (default: standard output)");

    auto* bench = app.add_subcommand("benchmark", "repeated random train/test splits");
    add_data(bench);
    add_model(bench);
    bench->add_option("--splits", o.splits, "number of splits")->check(CLI::PositiveNumber);
    bench->add_option("--test-fraction", o.test_fraction, "held-out fraction")->check(CLI::Range(0.01, 0.99));
    bench->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--out", o.out, "output CSV (default: standard output)");

    auto* active = app.add_subcommand("active", "active-learning experiment (variance vs random acquisition)");
    add_data(active);
    add_model(active);
    active->add_option("--initial-train", o.initial_train, "initial training rows")->check(CLI::PositiveNumber);
    active->add_option("--test-size", o.test_size, "test rows")->check(CLI::PositiveNumber);
    active->add_option("--acquisitions", o.acquisitions, "points moved from the pool");
    active->add_option("--repetitions", o.repetitions, "independent repetitions")->check(CLI::PositiveNumber);
    active->add_option("--policy", o.policy, "active, random or both")
        ->check(CLI::IsMember({"active", "random", "both"}));
    active->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    active->add_option("--out-prefix", o.out_prefix, "curves go to <prefix>_<policy>.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*train) return cmd_train(o);
        if (*predict) return cmd_predict(o);
        if (*bench) return cmd_benchmark(o);
        if (*active) return cmd_active(o);
    } catch (const pbp::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const pbp::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const pbp::ModelFormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}
