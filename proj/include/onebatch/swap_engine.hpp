#ifndef ONEBATCH_SWAP_ENGINE_HPP
#define ONEBATCH_SWAP_ENGINE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onebatch/batch.hpp"
#include "onebatch/data_matrix.hpp"
#include "onebatch/dissimilarity.hpp"

namespace onebatch {

/// k distinct dataset rows; position in the list is the medoid's slot.
class MedoidSet {
public:
    MedoidSet() = default;
    MedoidSet(std::vector<std::size_t> rows, std::size_t n);

    std::size_t size() const noexcept { return rows_.size(); }
    std::size_t operator[](std::size_t slot) const noexcept { return rows_[slot]; }
    std::span<const std::size_t> rows() const noexcept { return rows_; }
    bool contains(std::size_t row) const noexcept;

    /// Puts `row` in `slot`. The row must not already be a medoid.
    void replace(std::size_t slot, std::size_t row);

    friend bool operator==(const MedoidSet&, const MedoidSet&) = default;

private:
    std::vector<std::size_t> rows_;
};

/// Nearest / second-nearest medoid bookkeeping over the batch columns, plus
/// the removal gain of every medoid slot:
///   G_l = sum over {j : near(j) = l} of (d_near(j) - d_sec(j)).
///
/// Under a debiased batch with k = 2 a second distance may be +inf, so G_l is
/// held as a finite part and a count of infinite terms; G_l is -inf whenever
/// that count is non-zero.
struct NeighborCache {
    std::vector<std::size_t> near;
    std::vector<std::size_t> sec;
    std::vector<double> d_near;
    std::vector<double> d_sec;
    std::vector<double> removal_finite;
    std::vector<std::size_t> removal_infinite;

    /// From scratch. Requires k >= 2. Distance ties go to the smaller slot.
    static NeighborCache build(const BatchView& batch, const MedoidSet& medoids);

    /// Incremental update after `slot` of `medoids` received a new row.
    void apply_swap(const BatchView& batch, const MedoidSet& medoids, std::size_t slot);

    double removal_gain(std::size_t slot) const noexcept;
    /// Sum of d_near over the batch, i.e. m times the estimated objective.
    double total_near() const noexcept;

    friend bool operator==(const NeighborCache&, const NeighborCache&) = default;
};

/// Result of any clustering routine in this library.
struct RunResult {
    std::string algorithm;
    MedoidSet medoids;
    std::optional<double> est_objective;    // batch estimate, mean form
    std::optional<double> exact_objective;  // mean dissimilarity to the nearest medoid over all n rows
    std::size_t swaps = 0;
    std::size_t passes = 0;
    std::size_t batch_size = 0;
    std::uint64_t dissim_evals = 0;
    double wall_millis = 0.0;
    /// Per-iteration objective, for algorithms that iterate (alternate, LS-k-means++).
    std::vector<double> objective_trace;
};

/// (1/m) * sum_j min_l matrix(medoid_l, j). Throws NonFinite when some
/// column has no finite medoid entry.
double estimated_objective(const BatchView& batch, const MedoidSet& medoids);

/// (1/n) * sum_i min_l d(x_i, medoid_l). Counts n*k evaluations.
double exact_objective(const DataMatrix& data, const MedoidSet& medoids, Metric metric, EvalCounter& counter);

/// Gain of every (remove slot l, add candidate_row) swap against the batch
/// estimate, in sum form: m * (est(current) - est(after swap)). Entry l is
/// -inf when removing l leaves some column without a finite medoid.
std::vector<double> swap_gains(const BatchView& batch, const MedoidSet& medoids, const NeighborCache& cache,
                               std::size_t candidate_row);

struct SwapGain {
    std::size_t slot = 0;
    double gain = 0.0;
};

/// Best slot for a candidate (ties to the smallest slot) and its gain.
SwapGain swap_gain_scan(const BatchView& batch, const MedoidSet& medoids, const NeighborCache& cache,
                        std::size_t candidate_row);

struct SwapEvent {
    std::size_t pass;
    std::size_t candidate;
    std::size_t slot;
    std::size_t removed_row;
    double gain;
    double est_before;
    const MedoidSet& medoids;     // after the swap
    const NeighborCache& cache;   // after the swap
};

using SwapObserver = std::function<void(const SwapEvent&)>;

struct PassOptions {
    bool eager = true;
    /// A swap is taken only when gain > (epsilon + 1e-12) * m * est(current);
    /// the extra 1e-12 absorbs round-off between tied configurations.
    double epsilon = 0.0;
    std::size_t pass_index = 0;
    SwapObserver observer;
};

/// One sweep over all non-medoid rows. Eager mode swaps as soon as a
/// candidate clears the threshold; otherwise the best swap of the sweep is
/// applied at the end. Returns the number of swaps; the cache stays coherent.
std::size_t run_swap_pass(const BatchView& batch, MedoidSet& medoids, NeighborCache& cache,
                          const PassOptions& options = {});

/// Row minimizing sum_j matrix(i, j); ties to the smallest row.
std::size_t one_medoid(const BatchView& batch);

struct LocalSearchOptions {
    std::size_t max_passes = 10;
    double epsilon = 0.0;
    bool eager = true;
    SwapObserver observer;
};

struct LocalSearchOutcome {
    MedoidSet medoids;
    double est_objective = 0.0;
    std::size_t swaps = 0;
    std::size_t passes = 0;
    bool converged = false;  // stopped on a pass without swaps
};

/// Approximated FasterPAM over a fixed batch from a given start. k = 1 is
/// solved directly with one_medoid().
LocalSearchOutcome local_search(const BatchView& batch, MedoidSet start, const LocalSearchOptions& options = {});

struct OneBatchOptions {
    std::size_t k = 10;
    Metric metric = Metric::L1;
    BatchStrategy strategy = BatchStrategy::NNIW;
    std::optional<std::size_t> batch_size;  // nullopt: default_batch_size(n, k)
    std::size_t max_passes = 10;
    double epsilon = 0.0;
    bool eager = true;
    RandomSeed seed{};
    bool evaluate_exact = false;
    SwapObserver observer;
};

/// Samples one batch, starts from a uniform random k-subset and runs the
/// local search over every dataset row as candidate. Costs n*m evaluations
/// (plus n for LWCS, plus n*k when evaluate_exact).
RunResult one_batch_pam(const DataMatrix& data, const OneBatchOptions& options);

struct FasterPamOptions {
    std::size_t k = 10;
    Metric metric = Metric::L1;
    std::size_t max_passes = 10;
    double epsilon = 0.0;
    RandomSeed seed{};
    SwapObserver observer;
};

/// Full-batch special case: the batch is every row, in order, with unit
/// weights. Costs exactly n^2 evaluations; the estimate is the exact objective.
RunResult faster_pam(const DataMatrix& data, const FasterPamOptions& options);

}  // namespace onebatch

#endif  // ONEBATCH_SWAP_ENGINE_HPP
