#include "onebatch/batch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "onebatch/error.hpp"

namespace onebatch {

BatchStrategy parse_strategy(std::string_view name) {
    if (name == "unif") return BatchStrategy::Unif;
    if (name == "debias") return BatchStrategy::Debias;
    if (name == "nniw") return BatchStrategy::NNIW;
    if (name == "lwcs") return BatchStrategy::LWCS;
    throw InvalidConfig("unknown batch variant '" + std::string(name) + "'");
}

std::string_view strategy_name(BatchStrategy strategy) {
    switch (strategy) {
        case BatchStrategy::Unif: return "unif";
        case BatchStrategy::Debias: return "debias";
        case BatchStrategy::NNIW: return "nniw";
        case BatchStrategy::LWCS: return "lwcs";
    }
    return "unknown";
}

BatchView BatchView::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidSpec("weight scale must be positive and finite");
    BatchView out = *this;
    for (double& w : out.weights) w *= c;
    for (std::size_t i = 0; i < out.matrix.rows(); ++i)
        for (double& v : out.matrix.row(i))
            if (std::isfinite(v)) v *= c;
    return out;
}

std::size_t default_batch_size(std::size_t n, std::size_t k) {
    double kn = static_cast<double>(k) * static_cast<double>(n);
    double m = std::ceil(100.0 * std::log(kn));
    std::size_t mm = m < 1.0 ? 1 : static_cast<std::size_t>(m);
    return std::clamp<std::size_t>(mm, 1, std::max<std::size_t>(n, 1));
}

std::size_t theorem1_min_batch_size(const BoundInputs& b) {
    if (!(b.objective_gap > 0.0)) throw InvalidBound("objective gap must be positive");
    if (!(b.failure_prob > 0.0 && b.failure_prob <= 1.0)) throw InvalidBound("failure probability must be in (0, 1]");
    if (!(b.max_dissimilarity >= 0.0)) throw InvalidBound("max dissimilarity must be non-negative");
    if (b.swap_steps == 0 || b.n == 0) throw InvalidBound("swap steps and n must be positive");
    double ratio = b.max_dissimilarity / b.objective_gap;
    double m = 4.0 * ratio * ratio *
               std::log(2.0 * static_cast<double>(b.swap_steps) * static_cast<double>(b.n) / b.failure_prob);
    return static_cast<std::size_t>(std::ceil(m));
}

std::vector<std::size_t> nearest_column_counts(const DenseMatrix& unweighted) {
    std::vector<std::size_t> counts(unweighted.cols(), 0);
    if (unweighted.cols() == 0) return counts;
    for (std::size_t i = 0; i < unweighted.rows(); ++i) {
        auto r = unweighted.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < r.size(); ++j)
            if (r[j] < r[best]) best = j;
        ++counts[best];
    }
    return counts;
}

std::vector<double> lightweight_coreset_distribution(const DataMatrix& data, EvalCounter& counter) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    std::vector<double> mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = data.row(i);
        for (std::size_t f = 0; f < p; ++f) mean[f] += r[f];
    }
    for (double& v : mean) v /= static_cast<double>(n);

    std::vector<double> sq(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sq[i] = dissim_raw(Metric::SquaredL2, data.row(i), mean);
        total += sq[i];
    }
    counter.add(n);

    const double uniform = 0.5 / static_cast<double>(n);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = total > 0.0 ? uniform + 0.5 * sq[i] / total : 1.0 / static_cast<double>(n);
    return q;
}

namespace {

BatchView assemble(const DataMatrix& data, std::vector<std::size_t> indices, BatchStrategy strategy, Metric metric,
                   const std::vector<double>* coreset_q, EvalCounter& counter) {
    const std::size_t m = indices.size();
    BatchView view;
    view.matrix = cross_dissim_matrix(metric, data, indices, counter);
    view.weights.assign(m, 1.0);

    switch (strategy) {
        case BatchStrategy::Unif:
            break;
        case BatchStrategy::Debias:
            for (std::size_t j = 0; j < m; ++j) view.matrix(indices[j], j) = std::numeric_limits<double>::infinity();
            view.debiased = true;
            break;
        case BatchStrategy::NNIW: {
            auto counts = nearest_column_counts(view.matrix);
            for (std::size_t j = 0; j < m; ++j)
                view.weights[j] = counts[j] == 0 ? 1.0 : static_cast<double>(counts[j]);
            break;
        }
        case BatchStrategy::LWCS:
            for (std::size_t j = 0; j < m; ++j)
                view.weights[j] = 1.0 / (static_cast<double>(m) * (*coreset_q)[indices[j]]);
            break;
    }

    if (strategy == BatchStrategy::NNIW || strategy == BatchStrategy::LWCS) {
        for (std::size_t i = 0; i < view.matrix.rows(); ++i) {
            auto r = view.matrix.row(i);
            for (std::size_t j = 0; j < m; ++j) r[j] *= view.weights[j];
        }
    }
    view.indices = std::move(indices);
    return view;
}

void check_batch_size(std::size_t n, std::size_t m, BatchStrategy strategy) {
    if (m == 0) throw InvalidBatchSize("batch size must be at least 1");
    if (strategy != BatchStrategy::LWCS && m > n)
        throw InvalidBatchSize("batch size " + std::to_string(m) + " exceeds n = " + std::to_string(n));
}

}  // namespace

BatchView build_batch(const DataMatrix& data, std::vector<std::size_t> indices, BatchStrategy strategy,
                      Metric metric, EvalCounter& counter) {
    check_batch_size(data.n(), indices.size(), strategy);
    for (std::size_t r : indices)
        if (r >= data.n()) throw IndexOutOfRange("batch row " + std::to_string(r) + " out of range");
    if (strategy != BatchStrategy::LWCS) {
        std::vector<std::size_t> sorted = indices;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InvalidBatchSize("batch rows must be distinct for this strategy");
    }
    std::vector<double> q;
    if (strategy == BatchStrategy::LWCS) q = lightweight_coreset_distribution(data, counter);
    return assemble(data, std::move(indices), strategy, metric, &q, counter);
}

BatchView sample_batch(const DataMatrix& data, std::size_t m, BatchStrategy strategy, Metric metric,
                       RandomSeed seed, EvalCounter& counter) {
    check_batch_size(data.n(), m, strategy);
    auto rng = make_rng(seed, 0xba7c);
    if (strategy == BatchStrategy::LWCS) {
        auto q = lightweight_coreset_distribution(data, counter);
        std::discrete_distribution<std::size_t> draw(q.begin(), q.end());
        std::vector<std::size_t> indices(m);
        for (auto& idx : indices) idx = draw(rng);
        return assemble(data, std::move(indices), strategy, metric, &q, counter);
    }
    return assemble(data, sample_without_replacement(data.n(), m, rng), strategy, metric, nullptr, counter);
}

}  // namespace onebatch
