#ifndef ONEBATCH_DISSIMILARITY_HPP
#define ONEBATCH_DISSIMILARITY_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "onebatch/data_matrix.hpp"

namespace onebatch {

enum class Metric { L1, L2, SquaredL2, Cosine };

/// "l1", "l2", "sqeuclidean", "cosine" (case-sensitive).
Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);

/// Number of point-pair dissimilarity evaluations. One count per pair,
/// whatever the dimension.
class EvalCounter {
public:
    std::uint64_t count() const noexcept { return count_; }
    void add(std::uint64_t pairs) noexcept { count_ += pairs; }

private:
    std::uint64_t count_ = 0;
};

/// Dissimilarity between two points, counting one evaluation. Features are
/// accumulated in ascending index order. Cosine is 1 - cos(a, b), clamped at 0.
double dissim(Metric metric, std::span<const double> a, std::span<const double> b, EvalCounter& counter);

/// Same as dissim() but uncounted and unchecked; for callers that account
/// for evaluations in bulk.
double dissim_raw(Metric metric, std::span<const double> a, std::span<const double> b) noexcept;

/// Row-major dense matrix of reals.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Entry (i, j) = d(row i, row columns[j]). Adds exactly n * m to the counter.
DenseMatrix cross_dissim_matrix(Metric metric, const DataMatrix& data, std::span<const std::size_t> columns,
                                EvalCounter& counter);

}  // namespace onebatch

#endif  // ONEBATCH_DISSIMILARITY_HPP
