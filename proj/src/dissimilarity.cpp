#include "onebatch/dissimilarity.hpp"

#include <algorithm>
#include <cmath>

#include "onebatch/error.hpp"

namespace onebatch {

Metric parse_metric(std::string_view name) {
    if (name == "l1") return Metric::L1;
    if (name == "l2") return Metric::L2;
    if (name == "sqeuclidean") return Metric::SquaredL2;
    if (name == "cosine") return Metric::Cosine;
    throw InvalidConfig("unknown metric '" + std::string(name) + "'");
}

std::string_view metric_name(Metric metric) {
    switch (metric) {
        case Metric::L1: return "l1";
        case Metric::L2: return "l2";
        case Metric::SquaredL2: return "sqeuclidean";
        case Metric::Cosine: return "cosine";
    }
    return "unknown";
}

double dissim_raw(Metric metric, std::span<const double> a, std::span<const double> b) noexcept {
    const std::size_t p = a.size();
    switch (metric) {
        case Metric::L1: {
            double s = 0.0;
            for (std::size_t f = 0; f < p; ++f) s += std::abs(a[f] - b[f]);
            return s;
        }
        case Metric::L2:
        case Metric::SquaredL2: {
            double s = 0.0;
            for (std::size_t f = 0; f < p; ++f) {
                double d = a[f] - b[f];
                s += d * d;
            }
            return metric == Metric::L2 ? std::sqrt(s) : s;
        }
        case Metric::Cosine: {
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t f = 0; f < p; ++f) {
                dot += a[f] * b[f];
                na += a[f] * a[f];
                nb += b[f] * b[f];
            }
            // sqrt(na * nb) is exactly na when a == b, so d(x, x) == 0.
            return std::max(0.0, 1.0 - dot / std::sqrt(na * nb));
        }
    }
    return 0.0;
}

namespace {

bool is_zero(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

double dissim(Metric metric, std::span<const double> a, std::span<const double> b, EvalCounter& counter) {
    if (a.size() != b.size())
        throw DimensionMismatch("points of dimension " + std::to_string(a.size()) + " and " +
                                std::to_string(b.size()));
    if (metric == Metric::Cosine && (is_zero(a) || is_zero(b)))
        throw ZeroVector("cosine dissimilarity of a zero vector");
    counter.add(1);
    return dissim_raw(metric, a, b);
}

DenseMatrix cross_dissim_matrix(Metric metric, const DataMatrix& data, std::span<const std::size_t> columns,
                                EvalCounter& counter) {
    for (std::size_t c : columns)
        if (c >= data.n()) throw IndexOutOfRange("column index " + std::to_string(c) + " out of range");
    if (metric == Metric::Cosine) {
        for (std::size_t i = 0; i < data.n(); ++i)
            if (is_zero(data.row(i))) throw ZeroVector("cosine dissimilarity: row " + std::to_string(i) + " is zero");
    }

    const std::size_t n = data.n();
    const std::size_t m = columns.size();
    DenseMatrix out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = data.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < m; ++j) dst[j] = dissim_raw(metric, xi, data.row(columns[j]));
    }
    counter.add(static_cast<std::uint64_t>(n) * m);
    return out;
}

}  // namespace onebatch
