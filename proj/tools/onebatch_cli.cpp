// onebatch: k-medoids runs and benchmark grids from the command line.
//
//   onebatch run --data points.csv --algo onebatchpam --k 10 --variant nniw
//   onebatch run --n-points 5000 --dimension 10 --algo fasterpam --k 10
//   onebatch bench --config experiment.json
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "onebatch/bench.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct RunArgs {
    std::string data;
    bool header = false;
    std::vector<std::size_t> drop_columns;
    std::size_t n_points = 0;
    std::size_t dimension = 2;
    std::size_t n_blobs = 4;
    double blob_spread = 1.0;
    std::uint64_t data_seed = 0;

    std::string algo = "onebatchpam";
    std::size_t k = 10;
    std::string metric = "l1";
    std::uint64_t seed = 0;
    bool evaluate_exact = false;

    std::optional<std::string> variant;
    std::optional<std::string> batch_size;
    std::optional<std::size_t> max_passes;
    std::optional<double> epsilon;
    std::optional<std::size_t> reps;
    std::optional<std::string> subsample_size;
    std::optional<std::size_t> max_iters;
    std::optional<std::size_t> chain_length;
    std::optional<std::size_t> ls_steps;
    std::optional<std::string> exponent;
};

nlohmann::json count_or_auto(const std::string& text, const char* flag) {
    if (text == "AUTO") return "AUTO";
    try {
        std::size_t used = 0;
        long long v = std::stoll(text, &used);
        if (used != text.size() || v < 1) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw onebatch::InvalidConfig(std::string(flag) + " expects AUTO or a positive integer, got '" + text + "'");
    }
}

nlohmann::json real_or_auto(const std::string& text, const char* flag) {
    if (text == "AUTO") return "AUTO";
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw onebatch::InvalidConfig(std::string(flag) + " expects AUTO or a number, got '" + text + "'");
    }
}

onebatch::AlgorithmSpec algorithm_from(const RunArgs& a) {
    onebatch::AlgorithmSpec spec;
    spec.name = a.algo;
    auto& p = spec.params;
    if (a.variant) p["variant"] = *a.variant;
    if (a.batch_size) p["batch_size"] = count_or_auto(*a.batch_size, "--batch-size");
    if (a.max_passes) p["max_passes"] = *a.max_passes;
    if (a.epsilon) p["epsilon"] = *a.epsilon;
    if (a.reps) p["reps"] = *a.reps;
    if (a.subsample_size) p["subsample_size"] = count_or_auto(*a.subsample_size, "--subsample-size");
    if (a.max_iters) p["max_iters"] = *a.max_iters;
    if (a.chain_length) p["chain_length"] = *a.chain_length;
    if (a.ls_steps) p["ls_steps"] = *a.ls_steps;
    if (a.exponent) p["exponent"] = real_or_auto(*a.exponent, "--exponent");
    onebatch::validate_algorithm(spec);
    return spec;
}

int do_run(const RunArgs& a) {
    onebatch::DatasetSource source;
    if (!a.data.empty()) {
        source.csv = a.data;
        source.csv_options.has_header = a.header;
        source.csv_options.drop_columns = a.drop_columns;
    } else {
        source.synthetic = onebatch::SyntheticSpec{a.n_points, a.dimension, a.n_blobs, a.blob_spread,
                                                   onebatch::RandomSeed{a.data_seed}};
    }
    const auto spec = algorithm_from(a);
    const auto metric = onebatch::parse_metric(a.metric);

    onebatch::DataMatrix data = onebatch::load_dataset(source);
    auto result = onebatch::run_algorithm(data, spec, a.k, metric, onebatch::RandomSeed{a.seed}, a.evaluate_exact);
    auto out = onebatch::to_json(result);
    out["n"] = data.n();
    out["p"] = data.p();
    out["k"] = a.k;
    out["seed"] = a.seed;
    out["metric"] = a.metric;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int do_bench(const std::string& config_path) {
    auto cfg = onebatch::load_experiment_config(config_path);
    auto out = onebatch::run_experiment(cfg);
    std::cerr << "wrote " << out.records.size() << " records to " << cfg.output_path.string() << " and "
              << onebatch::summary_path_for(cfg.output_path).string() << '\n';
    std::cout << out.summary.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-medoids with a single subsampled batch, plus baselines and a benchmark harness"};
    app.require_subcommand(1);

    RunArgs a;
    auto* run = app.add_subcommand("run", "Run one algorithm and print the result as JSON");
    auto* data_opt = run->add_option("--data", a.data, "CSV file of numeric rows");
    run->add_flag("--header", a.header, "CSV has a header row");
    run->add_option("--drop-columns", a.drop_columns, "0-based CSV columns to ignore (e.g. labels)")->delimiter(',');
    auto* n_opt = run->add_option("--n-points", a.n_points, "Synthetic blobs: number of points");
    run->add_option("--dimension", a.dimension, "Synthetic blobs: dimension");
    run->add_option("--n-blobs", a.n_blobs, "Synthetic blobs: number of blobs");
    run->add_option("--blob-spread", a.blob_spread, "Synthetic blobs: standard deviation");
    run->add_option("--data-seed", a.data_seed, "Synthetic blobs: seed");
    data_opt->excludes(n_opt);

    run->add_option("--algo", a.algo, "onebatchpam|fasterpam|random|clara|alternate|kmeanspp|kmc2|lskmeanspp")
        ->capture_default_str();
    run->add_option("--k", a.k, "Number of medoids")->capture_default_str();
    run->add_option("--metric", a.metric, "l1|l2|sqeuclidean|cosine")->capture_default_str();
    run->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    run->add_flag("--evaluate-exact", a.evaluate_exact, "Also compute the exact objective on all rows");
    run->add_option("--variant", a.variant, "onebatchpam batch variant: unif|debias|nniw|lwcs");
    run->add_option("--batch-size", a.batch_size, "onebatchpam batch size: AUTO or an integer");
    run->add_option("--max-passes", a.max_passes, "Maximum swap passes");
    run->add_option("--epsilon", a.epsilon, "Relative improvement threshold for a swap");
    run->add_option("--reps", a.reps, "clara repetitions");
    run->add_option("--subsample-size", a.subsample_size, "clara subsample size: AUTO or an integer");
    run->add_option("--max-iters", a.max_iters, "alternate iterations");
    run->add_option("--chain-length", a.chain_length, "kmc2 chain length");
    run->add_option("--ls-steps", a.ls_steps, "LS-k-means++ local search steps");
    run->add_option("--exponent", a.exponent, "Seeding exponent: AUTO or a number");

    std::string config_path;
    auto* bench = app.add_subcommand("bench", "Run an experiment grid from a JSON config");
    bench->add_option("--config", config_path, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*run) {
            if (a.data.empty() && a.n_points == 0) {
                std::cerr << "error: run needs --data or --n-points\n";
                return kUsageError;
            }
            return do_run(a);
        }
        return do_bench(config_path);
    } catch (const onebatch::InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}
