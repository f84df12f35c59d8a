#ifndef ONEBATCH_BASELINES_HPP
#define ONEBATCH_BASELINES_HPP

#include <cstddef>
#include <optional>

#include "onebatch/data_matrix.hpp"
#include "onebatch/dissimilarity.hpp"
#include "onebatch/swap_engine.hpp"

namespace onebatch {

// Competitor algorithms. Every routine owns a fresh EvalCounter and reports
// its total in RunResult::dissim_evals. Wall time never includes the optional
// exact evaluation, except for CLARA where evaluation is part of the method.

struct RandomOptions {
    std::size_t k = 10;
    Metric metric = Metric::L1;
    RandomSeed seed{};
    bool evaluate_exact = false;
};

/// Uniform k-subset. Zero evaluations (n*k with evaluate_exact).
RunResult random_select(const DataMatrix& data, const RandomOptions& options);

struct ClaraOptions {
    std::size_t k = 10;
    Metric metric = Metric::L1;
    std::size_t repetitions = 5;
    std::optional<std::size_t> subsample_size;  // nullopt: 80 + 4k, clamped to n
    std::size_t max_passes = 10;
    RandomSeed seed{};
};

/// FasterPAM on `repetitions` uniform subsamples (the subsample is both the
/// batch and the candidate pool), each result scored on the full dataset,
/// best kept. Costs repetitions * (s^2 + n*k).
RunResult clara(const DataMatrix& data, const ClaraOptions& options);

struct AlternateOptions {
    std::size_t k = 10;
    Metric metric = Metric::L1;
    std::size_t max_iters = 100;
    RandomSeed seed{};
};

/// Voronoi iteration: assign to the nearest medoid, then move every medoid
/// to the member with the least total in-cluster dissimilarity. The exact
/// objective is a by-product of the last assignment.
RunResult alternate(const DataMatrix& data, const AlternateOptions& options);

struct SeedingOptions {
    std::size_t k = 10;
    Metric metric = Metric::L1;
    std::optional<double> exponent;  // nullopt: 1 for L1, 2 for L2 / squared L2, 1 otherwise
    std::size_t chain_length = 200;  // kmc2
    std::size_t ls_steps = 10;       // LS-k-means++
    RandomSeed seed{};
    bool evaluate_exact = false;
};

double resolve_exponent(const SeedingOptions& options);

/// D^p sampling. Costs n*(k-1) (+ n*k with evaluate_exact).
RunResult kmeanspp_seed(const DataMatrix& data, const SeedingOptions& options);

/// Metropolis chains with a uniform proposal over unselected rows.
/// Costs chain_length * k(k-1)/2 (+ n*k with evaluate_exact).
RunResult kmc2_seed(const DataMatrix& data, const SeedingOptions& options);

/// k-means++ followed by ls_steps single-swap improvements. Costs
/// n*k + n*ls_steps; the exact objective comes for free.
RunResult ls_kmeanspp(const DataMatrix& data, const SeedingOptions& options);

}  // namespace onebatch

#endif  // ONEBATCH_BASELINES_HPP
