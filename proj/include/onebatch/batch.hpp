#ifndef ONEBATCH_BATCH_HPP
#define ONEBATCH_BATCH_HPP

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "onebatch/data_matrix.hpp"
#include "onebatch/dissimilarity.hpp"

namespace onebatch {

/// How the batch is drawn and weighted. The four kinds are exclusive presets.
enum class BatchStrategy {
    Unif,    // uniform without replacement, unit weights
    Debias,  // Unif, then each batch point's own entry is set to +inf
    NNIW,    // Unif, columns weighted by nearest-neighbour counts
    LWCS,    // lightweight coreset: importance sampling with replacement
};

/// "unif", "debias", "nniw", "lwcs".
BatchStrategy parse_strategy(std::string_view name);
std::string_view strategy_name(BatchStrategy strategy);

/// The subsample the objective is estimated on.
///
/// `matrix` is n x m with matrix(i, j) = weights[j] * d(x_i, x_{indices[j]}),
/// except that a debiased view holds +inf at (indices[j], j).
struct BatchView {
    std::vector<std::size_t> indices;
    std::vector<double> weights;
    DenseMatrix matrix;
    bool debiased = false;

    std::size_t n() const noexcept { return matrix.rows(); }
    std::size_t m() const noexcept { return matrix.cols(); }

    /// Same view with every weight (and every finite entry) multiplied by c > 0.
    BatchView scaled(double c) const;
};

/// m = min(n, ceil(100 ln(k n))), at least 1.
std::size_t default_batch_size(std::size_t n, std::size_t k);

struct BoundInputs {
    double max_dissimilarity = 0.0;  // D
    double objective_gap = 0.0;      // Delta > 0
    double failure_prob = 0.0;       // delta in (0, 1]
    std::size_t swap_steps = 1;      // T
    std::size_t n = 1;
};

/// Smallest batch size for which the subsampled search reproduces the
/// full-batch swaps with probability 1 - delta:
/// ceil(4 D^2 / Delta^2 * ln(2 T n / delta)).
std::size_t theorem1_min_batch_size(const BoundInputs& b);

/// Number of dataset rows whose nearest column of `unweighted` is j, for each
/// j. Ties go to the smallest column. Sums to unweighted.rows().
std::vector<std::size_t> nearest_column_counts(const DenseMatrix& unweighted);

/// Lightweight-coreset sampling distribution
/// q_i = 1/(2n) + sqdist(x_i, mean) / (2 sum sqdist). Counts n evaluations.
std::vector<double> lightweight_coreset_distribution(const DataMatrix& data, EvalCounter& counter);

/// Builds the view for explicit batch rows. Counts n*m evaluations, plus n
/// for the LWCS distribution.
BatchView build_batch(const DataMatrix& data, std::vector<std::size_t> indices, BatchStrategy strategy,
                      Metric metric, EvalCounter& counter);

/// Draws the batch rows (without replacement, or i.i.d. from the coreset
/// distribution for LWCS) and builds the view.
BatchView sample_batch(const DataMatrix& data, std::size_t m, BatchStrategy strategy, Metric metric,
                       RandomSeed seed, EvalCounter& counter);

}  // namespace onebatch

#endif  // ONEBATCH_BATCH_HPP
