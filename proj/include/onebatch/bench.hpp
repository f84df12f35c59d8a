#ifndef ONEBATCH_BENCH_HPP
#define ONEBATCH_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "onebatch/data_matrix.hpp"
#include "onebatch/dissimilarity.hpp"
#include "onebatch/error.hpp"
#include "onebatch/swap_engine.hpp"

namespace onebatch {

/// objective / best_objective - 1.
double delta_relative_objective(double objective, double best_objective);

/// time / reference_time.
double relative_time(double time, double reference_time);

struct ParetoPoint {
    std::string label;
    double mean_time = 0.0;
    double mean_objective = 0.0;
};

/// True when a is no worse than b on both axes and strictly better on one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b) noexcept;

/// Points not dominated by any other point, sorted by time (then objective,
/// then input order). Identical points are all kept.
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points);

/// One algorithm entry of an experiment: a registered name plus its
/// parameter object. Known names: onebatchpam, fasterpam, random, clara,
/// alternate, kmeanspp, kmc2, lskmeanspp.
struct AlgorithmSpec {
    std::string name;
    nlohmann::json params = nlohmann::json::object();
    std::string label;  // empty: derived from name and key parameters

    std::string display_label() const;
    /// "key=value;key=value" with keys sorted; empty when there are no params.
    std::string params_string() const;
};

/// Throws InvalidConfig on an unknown name, unknown parameter, or bad value.
void validate_algorithm(const AlgorithmSpec& spec);

/// Runs one algorithm. With evaluate_exact the result always carries the
/// exact objective (computed free of charge where the method yields it).
RunResult run_algorithm(const DataMatrix& data, const AlgorithmSpec& spec, std::size_t k, Metric metric,
                        RandomSeed seed, bool evaluate_exact);

nlohmann::json to_json(const RunResult& result);

struct DatasetSource {
    std::optional<std::filesystem::path> csv;
    CsvOptions csv_options;
    std::optional<SyntheticSpec> synthetic;
};

DataMatrix load_dataset(const DatasetSource& source);

struct ExperimentConfig {
    DatasetSource dataset;
    Metric metric = Metric::L1;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<std::size_t> k_values;
    std::vector<RandomSeed> seeds;
    std::filesystem::path output_path;
};

/// Strict parse: unknown keys anywhere are rejected with InvalidConfig.
ExperimentConfig parse_experiment_config(const nlohmann::json& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct BenchRecord {
    std::string algorithm;
    std::string params;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    double objective = 0.0;
    double wall_millis = 0.0;
    std::uint64_t dissim_evals = 0;
    std::size_t swaps = 0;
};

/// algorithm,params,k,seed,objective,wall_millis,dissim_evals,swaps
std::string records_csv_header();
std::string to_csv_row(const BenchRecord& record);

/// Per-k cells: mean/std (sample, n-1) of objective and time per algorithm,
/// delta relative objective and relative time against the best mean
/// objective of the cell, and the Pareto front of (mean time, mean objective).
nlohmann::json summarize(std::span<const BenchRecord> records);

/// Where the summary of an experiment writing records to `records_path` goes.
std::filesystem::path summary_path_for(const std::filesystem::path& records_path);

/// A grid cell failed; the message names the cell.
class CellError : public Error {
public:
    using Error::Error;
};

struct ExperimentOutput {
    std::vector<BenchRecord> records;
    nlohmann::json summary;
};

/// Runs every (k, algorithm, seed) cell in that nesting order. Records are
/// appended to output_path as they complete; the summary is written at the
/// end. An empty output_path skips all file output.
ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace onebatch

#endif  // ONEBATCH_BENCH_HPP
