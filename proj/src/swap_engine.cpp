#include "onebatch/swap_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "onebatch/error.hpp"

namespace onebatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Gains below this fraction of the current total are treated as zero, so
// tied configurations do not trade places forever on round-off.
constexpr double kRoundoff = 1e-12;

// (distance, slot) ordering used for every nearest/second-nearest decision.
bool closer(double da, std::size_t la, double db, std::size_t lb) noexcept {
    return da < db || (da == db && la < lb);
}

void rank_column(const BatchView& batch, const MedoidSet& medoids, std::size_t j, NeighborCache& c) {
    std::size_t n1 = 0, n2 = 1;
    double d1 = batch.matrix(medoids[0], j);
    double d2 = batch.matrix(medoids[1], j);
    if (closer(d2, n2, d1, n1)) {
        std::swap(n1, n2);
        std::swap(d1, d2);
    }
    for (std::size_t l = 2; l < medoids.size(); ++l) {
        double d = batch.matrix(medoids[l], j);
        if (closer(d, l, d1, n1)) {
            n2 = n1;
            d2 = d1;
            n1 = l;
            d1 = d;
        } else if (closer(d, l, d2, n2)) {
            n2 = l;
            d2 = d;
        }
    }
    c.near[j] = n1;
    c.sec[j] = n2;
    c.d_near[j] = d1;
    c.d_sec[j] = d2;
}

void recompute_removal(NeighborCache& c, std::size_t k) {
    c.removal_finite.assign(k, 0.0);
    c.removal_infinite.assign(k, 0);
    for (std::size_t j = 0; j < c.near.size(); ++j) {
        // d_near - inf is kept as d_near plus one -inf term
        if (std::isinf(c.d_sec[j])) {
            ++c.removal_infinite[c.near[j]];
            c.removal_finite[c.near[j]] += c.d_near[j];
        } else {
            c.removal_finite[c.near[j]] += c.d_near[j] - c.d_sec[j];
        }
    }
}

double millis_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

MedoidSet::MedoidSet(std::vector<std::size_t> rows, std::size_t n) : rows_(std::move(rows)) {
    if (rows_.empty()) throw InvalidK("medoid set is empty");
    for (std::size_t r : rows_)
        if (r >= n) throw IndexOutOfRange("medoid row " + std::to_string(r) + " out of range");
    std::vector<std::size_t> sorted = rows_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidK("medoid rows must be distinct");
}

bool MedoidSet::contains(std::size_t row) const noexcept {
    return std::find(rows_.begin(), rows_.end(), row) != rows_.end();
}

void MedoidSet::replace(std::size_t slot, std::size_t row) {
    if (slot >= rows_.size()) throw IndexOutOfRange("medoid slot out of range");
    if (contains(row)) throw CandidateIsMedoid("row " + std::to_string(row) + " is already a medoid");
    rows_[slot] = row;
}

NeighborCache NeighborCache::build(const BatchView& batch, const MedoidSet& medoids) {
    if (medoids.size() < 2) throw InvalidK("neighbor cache needs at least two medoids");
    for (std::size_t r : medoids.rows())
        if (r >= batch.n()) throw IndexOutOfRange("medoid row outside the batch matrix");
    const std::size_t m = batch.m();
    NeighborCache c;
    c.near.resize(m);
    c.sec.resize(m);
    c.d_near.resize(m);
    c.d_sec.resize(m);
    for (std::size_t j = 0; j < m; ++j) rank_column(batch, medoids, j, c);
    recompute_removal(c, medoids.size());
    return c;
}

void NeighborCache::apply_swap(const BatchView& batch, const MedoidSet& medoids, std::size_t slot) {
    const std::size_t row = medoids[slot];
    for (std::size_t j = 0; j < near.size(); ++j) {
        if (near[j] == slot || sec[j] == slot) {
            rank_column(batch, medoids, j, *this);
            continue;
        }
        double d = batch.matrix(row, j);
        if (closer(d, slot, d_near[j], near[j])) {
            sec[j] = near[j];
            d_sec[j] = d_near[j];
            near[j] = slot;
            d_near[j] = d;
        } else if (closer(d, slot, d_sec[j], sec[j])) {
            sec[j] = slot;
            d_sec[j] = d;
        }
    }
    recompute_removal(*this, medoids.size());
}

double NeighborCache::removal_gain(std::size_t slot) const noexcept {
    return removal_infinite[slot] > 0 ? -kInf : removal_finite[slot];
}

double NeighborCache::total_near() const noexcept {
    return std::accumulate(d_near.begin(), d_near.end(), 0.0);
}

double estimated_objective(const BatchView& batch, const MedoidSet& medoids) {
    double total = 0.0;
    for (std::size_t j = 0; j < batch.m(); ++j) {
        double best = kInf;
        for (std::size_t r : medoids.rows()) best = std::min(best, batch.matrix(r, j));
        if (std::isinf(best))
            throw NonFinite("batch column " + std::to_string(j) + " has no finite distance to any medoid");
        total += best;
    }
    return total / static_cast<double>(batch.m());
}

double exact_objective(const DataMatrix& data, const MedoidSet& medoids, Metric metric, EvalCounter& counter) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double best = kInf;
        for (std::size_t r : medoids.rows()) best = std::min(best, dissim(metric, data.row(i), data.row(r), counter));
        total += best;
    }
    return total / static_cast<double>(data.n());
}

std::vector<double> swap_gains(const BatchView& batch, const MedoidSet& medoids, const NeighborCache& cache,
                               std::size_t candidate_row) {
    if (candidate_row >= batch.n()) throw IndexOutOfRange("candidate row out of range");
    if (medoids.contains(candidate_row))
        throw CandidateIsMedoid("row " + std::to_string(candidate_row) + " is already a medoid");

    const std::size_t k = medoids.size();
    std::vector<double> finite = cache.removal_finite;
    std::vector<std::ptrdiff_t> infinite(cache.removal_infinite.begin(), cache.removal_infinite.end());
    double shared = 0.0;

    auto dist = batch.matrix.row(candidate_row);
    for (std::size_t j = 0; j < dist.size(); ++j) {
        const double dij = dist[j];
        const double dn = cache.d_near[j];
        const double ds = cache.d_sec[j];
        const std::size_t l = cache.near[j];
        if (dij < dn) {
            shared += dn - dij;
            if (std::isinf(ds)) {
                --infinite[l];
                finite[l] -= dn;
            } else {
                finite[l] += ds - dn;
            }
        } else if (dij < ds) {
            if (std::isinf(ds)) {
                --infinite[l];
                finite[l] -= dij;
            } else {
                finite[l] += ds - dij;
            }
        }
    }

    std::vector<double> gains(k);
    for (std::size_t l = 0; l < k; ++l) gains[l] = infinite[l] > 0 ? -kInf : shared + finite[l];
    return gains;
}

SwapGain swap_gain_scan(const BatchView& batch, const MedoidSet& medoids, const NeighborCache& cache,
                        std::size_t candidate_row) {
    auto gains = swap_gains(batch, medoids, cache, candidate_row);
    std::size_t best = 0;
    for (std::size_t l = 1; l < gains.size(); ++l)
        if (gains[l] > gains[best]) best = l;
    return {best, gains[best]};
}

std::size_t run_swap_pass(const BatchView& batch, MedoidSet& medoids, NeighborCache& cache,
                          const PassOptions& options) {
    const std::size_t n = batch.n();
    double total = cache.total_near();
    std::size_t swaps = 0;

    auto apply = [&](std::size_t candidate, const SwapGain& g) {
        const double est_before = total / static_cast<double>(batch.m());
        const std::size_t removed = medoids[g.slot];
        medoids.replace(g.slot, candidate);
        cache.apply_swap(batch, medoids, g.slot);
        total = cache.total_near();
        ++swaps;
        if (options.observer)
            options.observer(
                SwapEvent{options.pass_index, candidate, g.slot, removed, g.gain, est_before, medoids, cache});
    };

    std::optional<std::pair<std::size_t, SwapGain>> best;
    for (std::size_t i = 0; i < n; ++i) {
        if (medoids.contains(i)) continue;
        SwapGain g = swap_gain_scan(batch, medoids, cache, i);
        if (!(g.gain > (options.epsilon + kRoundoff) * total)) continue;
        if (options.eager) {
            apply(i, g);
        } else if (!best || g.gain > best->second.gain) {
            best.emplace(i, g);
        }
    }
    if (best) apply(best->first, best->second);
    return swaps;
}

std::size_t one_medoid(const BatchView& batch) {
    std::size_t best = 0;
    double best_sum = kInf;
    for (std::size_t i = 0; i < batch.n(); ++i) {
        auto r = batch.matrix.row(i);
        double s = std::accumulate(r.begin(), r.end(), 0.0);
        if (s < best_sum) {
            best_sum = s;
            best = i;
        }
    }
    return best;
}

LocalSearchOutcome local_search(const BatchView& batch, MedoidSet start, const LocalSearchOptions& options) {
    LocalSearchOutcome out;
    if (start.size() == 1) {
        if (batch.debiased) throw DebiasRequiresKAtLeast2("k = 1 is undefined on a debiased batch");
        std::size_t row = one_medoid(batch);
        out.swaps = row == start[0] ? 0 : 1;
        out.medoids = MedoidSet({row}, batch.n());
        out.est_objective = estimated_objective(batch, out.medoids);
        out.passes = 1;
        out.converged = true;
        return out;
    }

    NeighborCache cache = NeighborCache::build(batch, start);
    out.medoids = std::move(start);
    for (std::size_t t = 0; t < options.max_passes; ++t) {
        PassOptions pass{options.eager, options.epsilon, t, options.observer};
        std::size_t swaps = run_swap_pass(batch, out.medoids, cache, pass);
        out.swaps += swaps;
        ++out.passes;
        if (swaps == 0) {
            out.converged = true;
            break;
        }
    }
    out.est_objective = cache.total_near() / static_cast<double>(batch.m());
    return out;
}

RunResult one_batch_pam(const DataMatrix& data, const OneBatchOptions& options) {
    const std::size_t n = data.n();
    const std::size_t k = options.k;
    if (k < 1 || k > n) throw InvalidK("k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
    if (k == 1 && options.strategy == BatchStrategy::Debias)
        throw DebiasRequiresKAtLeast2("the debias variant needs k >= 2");
    if (!(options.epsilon >= 0.0)) throw InvalidConfig("epsilon must be non-negative");
    const std::size_t m = options.batch_size.value_or(default_batch_size(n, k));

    RunResult result;
    result.algorithm = "onebatchpam";
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();

    BatchView batch = sample_batch(data, m, options.strategy, options.metric, options.seed, counter);
    auto rng = make_rng(options.seed, 1);
    MedoidSet init(sample_without_replacement(n, k, rng), n);
    auto outcome = local_search(batch, std::move(init),
                                {options.max_passes, options.epsilon, options.eager, options.observer});
    result.wall_millis = millis_since(start);

    result.medoids = std::move(outcome.medoids);
    result.est_objective = outcome.est_objective;
    result.swaps = outcome.swaps;
    result.passes = outcome.passes;
    result.batch_size = m;
    if (options.evaluate_exact) result.exact_objective = exact_objective(data, result.medoids, options.metric, counter);
    result.dissim_evals = counter.count();
    return result;
}

RunResult faster_pam(const DataMatrix& data, const FasterPamOptions& options) {
    const std::size_t n = data.n();
    const std::size_t k = options.k;
    if (k < 1 || k > n) throw InvalidK("k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");

    RunResult result;
    result.algorithm = "fasterpam";
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    BatchView batch = build_batch(data, std::move(all), BatchStrategy::Unif, options.metric, counter);
    auto rng = make_rng(options.seed, 1);
    MedoidSet init(sample_without_replacement(n, k, rng), n);
    auto outcome = local_search(batch, std::move(init), {options.max_passes, options.epsilon, true, options.observer});
    result.wall_millis = millis_since(start);

    result.medoids = std::move(outcome.medoids);
    result.est_objective = outcome.est_objective;
    result.exact_objective = outcome.est_objective;
    result.swaps = outcome.swaps;
    result.passes = outcome.passes;
    result.batch_size = n;
    result.dissim_evals = counter.count();
    return result;
}

}  // namespace onebatch
