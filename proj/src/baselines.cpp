#include "onebatch/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "onebatch/error.hpp"

namespace onebatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double millis_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void check_k(std::size_t k, std::size_t n) {
    if (k < 1 || k > n) throw InvalidK("k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
}

// Index drawn with probability proportional to weight. Zero weights are
// never drawn; when every weight is zero the draw is uniform over `fallback`.
std::size_t draw_proportional(std::span<const double> weights, std::span<const std::size_t> fallback,
                              std::mt19937_64& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) {
        std::uniform_int_distribution<std::size_t> pick(0, fallback.size() - 1);
        return fallback[pick(rng)];
    }
    std::uniform_real_distribution<double> u01(0.0, total);
    const double u = u01(rng);
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        cum += weights[i];
        last_positive = i;
        if (u < cum) return i;
    }
    return last_positive;
}

std::vector<std::size_t> rows_not_in(std::size_t n, std::span<const std::size_t> chosen) {
    std::vector<bool> taken(n, false);
    for (std::size_t c : chosen) taken[c] = true;
    std::vector<std::size_t> out;
    out.reserve(n - chosen.size());
    for (std::size_t i = 0; i < n; ++i)
        if (!taken[i]) out.push_back(i);
    return out;
}

struct Seeding {
    std::vector<std::size_t> centers;
    std::vector<std::vector<double>> columns;  // d(x_i, center t) for every center whose column was computed
    std::vector<double> nearest;               // min over computed columns
};

// k-means++ proper. Shared by kmeanspp_seed and ls_kmeanspp so that both
// consume the random stream identically.
Seeding dp_seed(const DataMatrix& data, std::size_t k, Metric metric, double exponent, std::mt19937_64& rng,
                EvalCounter& counter) {
    const std::size_t n = data.n();
    Seeding s;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    s.centers.push_back(first(rng));
    s.nearest.assign(n, kInf);

    std::vector<double> mass(n);
    while (true) {
        const std::size_t c = s.centers.back();
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = dissim(metric, data.row(i), data.row(c), counter);
            s.nearest[i] = std::min(s.nearest[i], col[i]);
        }
        s.columns.push_back(std::move(col));

        for (std::size_t i = 0; i < n; ++i) mass[i] = std::pow(s.nearest[i], exponent);
        for (std::size_t r : s.centers) mass[r] = 0.0;
        s.centers.push_back(draw_proportional(mass, rows_not_in(n, s.centers), rng));
        if (s.centers.size() == k) break;
    }
    return s;
}

}  // namespace

RunResult random_select(const DataMatrix& data, const RandomOptions& options) {
    check_k(options.k, data.n());
    RunResult result;
    result.algorithm = "random";
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();
    auto rng = make_rng(options.seed, 1);
    result.medoids = MedoidSet(sample_without_replacement(data.n(), options.k, rng), data.n());
    result.wall_millis = millis_since(start);
    if (options.evaluate_exact) result.exact_objective = exact_objective(data, result.medoids, options.metric, counter);
    result.dissim_evals = counter.count();
    return result;
}

RunResult clara(const DataMatrix& data, const ClaraOptions& options) {
    const std::size_t n = data.n();
    check_k(options.k, n);
    if (options.repetitions < 1) throw InvalidConfig("CLARA needs at least one repetition");
    const std::size_t s = std::min(n, options.subsample_size.value_or(80 + 4 * options.k));
    if (s < options.k) throw InvalidConfig("CLARA subsample size smaller than k");

    RunResult result;
    result.algorithm = "clara";
    result.batch_size = s;
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();
    auto rng = make_rng(options.seed, 2);

    double best = kInf;
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        auto rows = sample_without_replacement(n, s, rng);
        RunResult sub = faster_pam(data.select_rows(rows),
                                   {options.k, options.metric, options.max_passes, 0.0, RandomSeed{rng()}, {}});
        counter.add(sub.dissim_evals);
        std::vector<std::size_t> mapped;
        for (std::size_t r : sub.medoids.rows()) mapped.push_back(rows[r]);
        MedoidSet candidate(std::move(mapped), n);
        double objective = exact_objective(data, candidate, options.metric, counter);
        result.objective_trace.push_back(objective);
        result.swaps += sub.swaps;
        result.passes += sub.passes;
        if (objective < best) {
            best = objective;
            result.medoids = std::move(candidate);
        }
    }
    result.wall_millis = millis_since(start);
    result.exact_objective = best;
    result.dissim_evals = counter.count();
    return result;
}

RunResult alternate(const DataMatrix& data, const AlternateOptions& options) {
    const std::size_t n = data.n();
    const std::size_t k = options.k;
    check_k(k, n);

    RunResult result;
    result.algorithm = "alternate";
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();
    auto rng = make_rng(options.seed, 1);
    std::vector<std::size_t> medoids = sample_without_replacement(n, k, rng);

    std::vector<std::size_t> label(n);
    auto assign = [&] {
        std::vector<std::size_t> slot_of(n, k);
        for (std::size_t l = 0; l < k; ++l) slot_of[medoids[l]] = l;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = kInf;
            std::size_t best_l = 0;
            for (std::size_t l = 0; l < k; ++l) {
                double d = dissim(options.metric, data.row(i), data.row(medoids[l]), counter);
                if (d < best) {
                    best = d;
                    best_l = l;
                }
            }
            // A medoid row stays in its own cluster even when a duplicate
            // point ties with it, so no cluster is ever empty.
            if (slot_of[i] < k) best_l = slot_of[i];
            label[i] = best_l;
            total += best;
        }
        result.objective_trace.push_back(total / static_cast<double>(n));
    };

    assign();
    for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t i = 0; i < n; ++i) members[label[i]].push_back(i);

        bool changed = false;
        for (std::size_t l = 0; l < k; ++l) {
            const auto& c = members[l];
            if (c.empty()) continue;
            std::size_t best_row = medoids[l];
            double best_cost = kInf;
            for (std::size_t a : c) {
                double cost = 0.0;
                for (std::size_t b : c) cost += dissim(options.metric, data.row(a), data.row(b), counter);
                if (cost < best_cost || (cost == best_cost && a == medoids[l])) {
                    best_cost = cost;
                    best_row = a;
                }
            }
            if (best_row != medoids[l]) {
                medoids[l] = best_row;
                changed = true;
                ++result.swaps;
            }
        }
        ++result.passes;
        if (!changed) break;
        assign();
    }
    result.wall_millis = millis_since(start);
    result.medoids = MedoidSet(std::move(medoids), n);
    result.exact_objective = result.objective_trace.back();
    result.dissim_evals = counter.count();
    return result;
}

double resolve_exponent(const SeedingOptions& options) {
    if (options.exponent) {
        if (!(*options.exponent > 0.0)) throw InvalidConfig("seeding exponent must be positive");
        return *options.exponent;
    }
    switch (options.metric) {
        case Metric::L2:
        case Metric::SquaredL2: return 2.0;
        default: return 1.0;
    }
}

RunResult kmeanspp_seed(const DataMatrix& data, const SeedingOptions& options) {
    check_k(options.k, data.n());
    const double exponent = resolve_exponent(options);
    RunResult result;
    result.algorithm = "kmeanspp";
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();
    auto rng = make_rng(options.seed, 1);

    std::vector<std::size_t> centers;
    if (options.k == 1) {
        std::uniform_int_distribution<std::size_t> first(0, data.n() - 1);
        centers.push_back(first(rng));
    } else {
        centers = dp_seed(data, options.k, options.metric, exponent, rng, counter).centers;
    }
    result.wall_millis = millis_since(start);
    result.medoids = MedoidSet(std::move(centers), data.n());
    if (options.evaluate_exact) result.exact_objective = exact_objective(data, result.medoids, options.metric, counter);
    result.dissim_evals = counter.count();
    return result;
}

RunResult kmc2_seed(const DataMatrix& data, const SeedingOptions& options) {
    const std::size_t n = data.n();
    const std::size_t k = options.k;
    check_k(k, n);
    if (options.chain_length < 1) throw InvalidConfig("kmc2 chain length must be at least 1");
    const double exponent = resolve_exponent(options);

    RunResult result;
    result.algorithm = "kmc2";
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();
    auto rng = make_rng(options.seed, 1);

    std::vector<std::size_t> centers;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(first(rng));

    auto mass = [&](std::size_t row) {
        double best = kInf;
        for (std::size_t c : centers) best = std::min(best, dissim(options.metric, data.row(row), data.row(c), counter));
        return std::pow(best, exponent);
    };

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    while (centers.size() < k) {
        auto pool = rows_not_in(n, centers);
        std::uniform_int_distribution<std::size_t> propose(0, pool.size() - 1);
        std::size_t x = pool[propose(rng)];
        double dx = mass(x);
        for (std::size_t step = 1; step < options.chain_length; ++step) {
            std::size_t y = pool[propose(rng)];
            double dy = mass(y);
            if (dx == 0.0 || u01(rng) * dx < dy) {
                x = y;
                dx = dy;
            }
        }
        centers.push_back(x);
    }
    result.wall_millis = millis_since(start);
    result.medoids = MedoidSet(std::move(centers), n);
    if (options.evaluate_exact) result.exact_objective = exact_objective(data, result.medoids, options.metric, counter);
    result.dissim_evals = counter.count();
    return result;
}

RunResult ls_kmeanspp(const DataMatrix& data, const SeedingOptions& options) {
    const std::size_t n = data.n();
    const std::size_t k = options.k;
    check_k(k, n);
    const double exponent = resolve_exponent(options);

    RunResult result;
    result.algorithm = "lskmeanspp";
    EvalCounter counter;
    auto start = std::chrono::steady_clock::now();
    auto rng = make_rng(options.seed, 1);

    Seeding s;
    if (k == 1) {
        std::uniform_int_distribution<std::size_t> first(0, n - 1);
        s.centers.push_back(first(rng));
    } else {
        s = dp_seed(data, k, options.metric, exponent, rng, counter);
    }
    // Distances to the last center were not needed for seeding itself.
    {
        const std::size_t c = s.centers.back();
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = dissim(options.metric, data.row(i), data.row(c), counter);
        s.columns.push_back(std::move(col));
    }
    auto& cols = s.columns;

    std::vector<double> nearest(n);
    auto refresh = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = kInf;
            for (std::size_t l = 0; l < k; ++l) best = std::min(best, cols[l][i]);
            nearest[i] = best;
            total += best;
        }
        return total;
    };

    double current = refresh();
    result.objective_trace.push_back(current / static_cast<double>(n));
    std::vector<double> mass(n);
    for (std::size_t step = 0; step < options.ls_steps && k < n; ++step) {
        for (std::size_t i = 0; i < n; ++i) mass[i] = std::pow(nearest[i], exponent);
        for (std::size_t r : s.centers) mass[r] = 0.0;
        const std::size_t cand = draw_proportional(mass, rows_not_in(n, s.centers), rng);

        std::vector<double> cand_col(n);
        for (std::size_t i = 0; i < n; ++i) cand_col[i] = dissim(options.metric, data.row(i), data.row(cand), counter);

        double best_total = current;
        std::optional<std::size_t> best_slot;
        for (std::size_t l = 0; l < k; ++l) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = cand_col[i];
                for (std::size_t o = 0; o < k; ++o)
                    if (o != l) d = std::min(d, cols[o][i]);
                total += d;
            }
            if (total < best_total) {
                best_total = total;
                best_slot = l;
            }
        }
        if (best_slot) {
            s.centers[*best_slot] = cand;
            cols[*best_slot] = std::move(cand_col);
            current = refresh();
            ++result.swaps;
        }
        ++result.passes;
        result.objective_trace.push_back(current / static_cast<double>(n));
    }
    result.wall_millis = millis_since(start);
    result.medoids = MedoidSet(std::move(s.centers), n);
    result.exact_objective = current / static_cast<double>(n);
    result.dissim_evals = counter.count();
    return result;
}

}  // namespace onebatch
