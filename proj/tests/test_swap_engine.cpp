#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "onebatch/baselines.hpp"
#include "onebatch/error.hpp"
#include "onebatch/swap_engine.hpp"
#include "oracle.hpp"

using namespace onebatch;

namespace {

BatchView full_batch(const DataMatrix& d, BatchStrategy s = BatchStrategy::Unif) {
    std::vector<std::size_t> all(d.n());
    std::iota(all.begin(), all.end(), std::size_t{0});
    EvalCounter c;
    return build_batch(d, std::move(all), s, Metric::L1, c);
}

BatchView manual_batch(std::vector<std::vector<double>> rows) {
    BatchView b;
    b.matrix = DenseMatrix(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) b.matrix(i, j) = rows[i][j];
    b.weights.assign(rows.front().size(), 1.0);
    b.indices.assign(rows.front().size(), 0);
    return b;
}

std::vector<std::size_t> to_vec(const MedoidSet& m) { return {m.rows().begin(), m.rows().end()}; }

}  // namespace

TEST(MedoidSet, Validation) {
    EXPECT_THROW(MedoidSet({}, 3), InvalidK);
    EXPECT_THROW(MedoidSet({1, 1}, 3), InvalidK);
    EXPECT_THROW(MedoidSet({3}, 3), IndexOutOfRange);
    MedoidSet m({0, 2}, 3);
    EXPECT_THROW(m.replace(0, 2), CandidateIsMedoid);
    m.replace(0, 1);
    EXPECT_EQ(m[0], 1u);
}

TEST(EstimatedObjective, HandValues) {
    DataMatrix d(3, 1, {0, 1, 5});
    auto b = full_batch(d);
    EXPECT_DOUBLE_EQ(estimated_objective(b, MedoidSet({1}, 3)), 5.0 / 3.0);
    EXPECT_EQ(estimated_objective(b, MedoidSet({0, 1, 2}, 3)), 0.0);
    EXPECT_DOUBLE_EQ(estimated_objective(b.scaled(2.0), MedoidSet({1}, 3)), 10.0 / 3.0);
}

TEST(EstimatedObjective, DebiasedSingleMedoidIsNonFinite) {
    DataMatrix d(3, 1, {0, 1, 5});
    EvalCounter c;
    auto b = build_batch(d, {0, 1, 2}, BatchStrategy::Debias, Metric::L1, c);
    EXPECT_THROW(estimated_objective(b, MedoidSet({1}, 3)), NonFinite);
    EXPECT_TRUE(std::isfinite(estimated_objective(b, MedoidSet({0, 1}, 3))));
}

TEST(ExactObjective, HandValuesAndCount) {
    DataMatrix d(3, 1, {0, 1, 5});
    EvalCounter c;
    EXPECT_DOUBLE_EQ(exact_objective(d, MedoidSet({1}, 3), Metric::L1, c), 5.0 / 3.0);
    EXPECT_EQ(c.count(), 3u);
    EXPECT_EQ(exact_objective(d, MedoidSet({0, 1, 2}, 3), Metric::L1, c), 0.0);
    EXPECT_EQ(c.count(), 12u);
    DataMatrix one(1, 2, {4, 4});
    EXPECT_EQ(exact_objective(one, MedoidSet({0}, 1), Metric::L1, c), 0.0);
}

TEST(NeighborCache, InvariantsOnRandomInstance) {
    auto d = oracle::random_points(60, 3, 7);
    auto b = full_batch(d);
    MedoidSet m({3, 17, 42, 5}, 60);
    auto c = NeighborCache::build(b, m);
    std::vector<double> g(4, 0.0);
    for (std::size_t j = 0; j < 60; ++j) {
        EXPECT_LE(c.d_near[j], c.d_sec[j]);
        EXPECT_NE(c.near[j], c.sec[j]);
        EXPECT_EQ(c.d_near[j], b.matrix(m[c.near[j]], j));
        double lo = INFINITY;
        for (std::size_t l = 0; l < 4; ++l) lo = std::min(lo, b.matrix(m[l], j));
        EXPECT_EQ(c.d_near[j], lo);
        g[c.near[j]] += c.d_near[j] - c.d_sec[j];
    }
    for (std::size_t l = 0; l < 4; ++l) {
        EXPECT_DOUBLE_EQ(c.removal_gain(l), g[l]);
        EXPECT_LE(c.removal_gain(l), 0.0);
    }
    EXPECT_THROW(NeighborCache::build(b, MedoidSet({1}, 60)), InvalidK);
}

TEST(SwapGainScan, SingleColumnHandTrace) {
    // Medoid rows 0 and 1 sit at 5 and 9 from the only batch column; the
    // candidate (row 2) sits at 7.
    auto b = manual_batch({{5}, {9}, {7}});
    MedoidSet m({0, 1}, 3);
    auto c = NeighborCache::build(b, m);
    EXPECT_EQ(c.removal_gain(0), -4.0);
    auto gains = swap_gains(b, m, c, 2);
    EXPECT_EQ(gains[0], -2.0);
    EXPECT_EQ(gains[1], 0.0);
    auto best = swap_gain_scan(b, m, c, 2);
    EXPECT_EQ(best.slot, 1u);
    EXPECT_EQ(best.gain, 0.0);
}

TEST(SwapGainScan, DuplicateOfMedoidHasZeroSelfReplacementGain) {
    DataMatrix d(4, 1, {0, 0, 10, 11});
    auto b = full_batch(d);
    MedoidSet m({0, 2}, 4);
    auto c = NeighborCache::build(b, m);
    auto gains = swap_gains(b, m, c, 1);
    EXPECT_EQ(gains[0], 0.0);
    EXPECT_LE(swap_gain_scan(b, m, c, 1).gain, 0.0);
}

TEST(SwapGainScan, RejectsMedoidCandidate) {
    DataMatrix d(3, 1, {0, 1, 5});
    auto b = full_batch(d);
    MedoidSet m({0, 1}, 3);
    auto c = NeighborCache::build(b, m);
    EXPECT_THROW(swap_gain_scan(b, m, c, 1), CandidateIsMedoid);
}

TEST(SwapGainScan, MatchesBruteForceEveryCandidateAndSlot) {
    auto d = oracle::random_points(50, 2, 11);
    auto b = full_batch(d);
    std::vector<std::size_t> med{4, 20, 33};
    MedoidSet m(med, 50);
    auto c = NeighborCache::build(b, m);
    const double before = oracle::batch_sum(d, b.indices, b.weights, false, med);
    for (std::size_t i = 0; i < 50; ++i) {
        if (m.contains(i)) continue;
        auto gains = swap_gains(b, m, c, i);
        for (std::size_t l = 0; l < 3; ++l) {
            double after = oracle::batch_sum(d, b.indices, b.weights, false, oracle::swapped(med, l, i));
            EXPECT_TRUE(oracle::close_rel(gains[l], before - after, before)) << i << " " << l;
        }
    }
}

TEST(SwapGainScan, DebiasedTwoMedoidsWithInfiniteSecondDistance) {
    // With k = 2, a batch column whose own row is a medoid has d_sec = +inf.
    auto d = oracle::random_points(30, 2, 12);
    EvalCounter ec;
    auto b = build_batch(d, {0, 1, 2, 3, 4, 5, 6, 7}, BatchStrategy::Debias, Metric::L1, ec);
    std::vector<std::size_t> med{2, 19};
    MedoidSet m(med, 30);
    auto c = NeighborCache::build(b, m);
    EXPECT_EQ(c.removal_gain(1), -INFINITY);
    const double before = oracle::batch_sum(d, b.indices, b.weights, true, med);
    for (std::size_t i = 0; i < 30; ++i) {
        if (m.contains(i)) continue;
        auto gains = swap_gains(b, m, c, i);
        for (std::size_t l = 0; l < 2; ++l) {
            double after = oracle::batch_sum(d, b.indices, b.weights, true, oracle::swapped(med, l, i));
            EXPECT_TRUE(oracle::close_rel(gains[l], before - after, before)) << i << " " << l;
        }
    }
}

TEST(RunSwapPass, ThreeBlobNinePointInstance) {
    // Rows 0-2 form blob A, rows {3,4,6} blob B, rows {5,7,8} blob C. All
    // medoids start in A; a brute-force eager pass takes exactly two swaps.
    DataMatrix d(9, 1, {0, 1, 2, 101, 100, 201, 102, 200, 202});
    auto b = full_batch(d);
    MedoidSet m({0, 1, 2}, 9);
    auto c = NeighborCache::build(b, m);
    std::vector<std::tuple<std::size_t, std::size_t, double>> events;
    PassOptions opt;
    opt.observer = [&](const SwapEvent& e) { events.emplace_back(e.candidate, e.slot, e.gain); };
    EXPECT_EQ(run_swap_pass(b, m, c, opt), 2u);
    EXPECT_EQ(to_vec(m), (std::vector<std::size_t>{3, 1, 5}));
    ASSERT_EQ(events.size(), 2u);
    EXPECT_EQ(events[0], std::make_tuple(std::size_t{3}, std::size_t{0}, 591.0));
    EXPECT_EQ(events[1], std::make_tuple(std::size_t{5}, std::size_t{2}, 297.0));
    EXPECT_EQ(c, NeighborCache::build(b, m));
    // Local optimum reached: the next pass is empty.
    EXPECT_EQ(run_swap_pass(b, m, c), 0u);
}

TEST(RunSwapPass, AllPointsMedoidsMeansNoCandidates) {
    DataMatrix d(4, 1, {0, 3, 7, 8});
    auto b = full_batch(d);
    MedoidSet m({0, 1, 2, 3}, 4);
    auto c = NeighborCache::build(b, m);
    EXPECT_EQ(run_swap_pass(b, m, c), 0u);
}

TEST(RunSwapPass, BestImprovementModeTakesOneSwap) {
    DataMatrix d(9, 1, {0, 1, 2, 101, 100, 201, 102, 200, 202});
    auto b = full_batch(d);
    MedoidSet m({0, 1, 2}, 9);
    auto c = NeighborCache::build(b, m);
    PassOptions opt;
    opt.eager = false;
    EXPECT_EQ(run_swap_pass(b, m, c, opt), 1u);
    // Best single swap over the whole pass: brute force picks the best (i, l).
    double best = -INFINITY;
    std::vector<std::size_t> start{0, 1, 2};
    double base = oracle::batch_sum(d, b.indices, b.weights, false, start);
    std::vector<std::size_t> best_set;
    for (std::size_t i = 3; i < 9; ++i)
        for (std::size_t l = 0; l < 3; ++l) {
            auto s = oracle::swapped(start, l, i);
            double g = base - oracle::batch_sum(d, b.indices, b.weights, false, s);
            if (g > best) best = g, best_set = s;
        }
    EXPECT_EQ(to_vec(m), best_set);
}

TEST(RunSwapPass, EpsilonBlocksSmallImprovements) {
    DataMatrix d(9, 1, {0, 1, 2, 101, 100, 201, 102, 200, 202});
    auto b = full_batch(d);
    MedoidSet m({0, 1, 2}, 9);
    auto c = NeighborCache::build(b, m);
    PassOptions opt;
    opt.epsilon = 1e9;
    EXPECT_EQ(run_swap_pass(b, m, c, opt), 0u);
    EXPECT_EQ(to_vec(m), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(OneMedoid, Examples) {
    DataMatrix d(3, 1, {0, 1, 5});
    auto b = full_batch(d);
    EXPECT_EQ(one_medoid(b), 1u);
    EXPECT_EQ(one_medoid(full_batch(DataMatrix(1, 1, {2}))), 0u);
    // Column 2 (the point at 5) weighted 100: the argmin moves to row 2.
    BatchView w = b;
    w.weights[2] = 100.0;
    for (std::size_t i = 0; i < 3; ++i) w.matrix(i, 2) *= 100.0;
    EXPECT_EQ(one_medoid(w), 2u);
}

TEST(OneBatchPam, CacheCoherenceAndMonotoneEstimate) {
    auto d = oracle::random_points(120, 3, 21);
    OneBatchOptions o;
    o.k = 5;
    o.batch_size = 40;
    o.strategy = BatchStrategy::NNIW;
    o.seed = RandomSeed{3};
    EvalCounter scratch;
    auto batch = sample_batch(d, 40, o.strategy, o.metric, o.seed, scratch);
    std::size_t swaps_seen = 0;
    o.observer = [&](const SwapEvent& e) {
        ++swaps_seen;
        EXPECT_EQ(e.cache, NeighborCache::build(batch, e.medoids));
        double after = estimated_objective(batch, e.medoids);
        EXPECT_GT(e.gain, 0.0);
        EXPECT_TRUE(oracle::close_rel(after, e.est_before - e.gain / 40.0, e.est_before));
        auto rows = e.medoids.rows();
        std::vector<std::size_t> sorted(rows.begin(), rows.end());
        std::sort(sorted.begin(), sorted.end());
        EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
    };
    auto r = one_batch_pam(d, o);
    EXPECT_EQ(swaps_seen, r.swaps);
    EXPECT_GT(r.swaps, 0u);
}

TEST(OneBatchPam, FullBatchStopsAtExactLocalOptimum) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto d = oracle::random_points(80, 2, 100 + seed);
        OneBatchOptions o;
        o.k = 4;
        o.strategy = BatchStrategy::Unif;
        o.batch_size = 80;
        o.max_passes = 100;
        o.seed = RandomSeed{seed};
        o.evaluate_exact = true;
        auto r = one_batch_pam(d, o);
        ASSERT_LT(r.passes, 100u);
        auto med = to_vec(r.medoids);
        double cur = oracle::exact_mean(d, med);
        EXPECT_NEAR(*r.exact_objective, cur, 1e-12);
        for (std::size_t i = 0; i < 80; ++i) {
            if (r.medoids.contains(i)) continue;
            for (std::size_t l = 0; l < 4; ++l) EXPECT_GE(oracle::exact_mean(d, oracle::swapped(med, l, i)), cur - 1e-12);
        }
    }
}

TEST(OneBatchPam, KEqualsN) {
    auto d = oracle::random_points(6, 2, 1);
    OneBatchOptions o;
    o.k = 6;
    o.batch_size = 6;
    auto r = one_batch_pam(d, o);
    EXPECT_EQ(*r.est_objective, 0.0);
    EXPECT_EQ(r.swaps, 0u);
}

TEST(OneBatchPam, BudgetIndependentOfPasses) {
    auto d = oracle::random_points(300, 3, 2);
    for (std::size_t passes : {1u, 3u, 10u}) {
        for (auto s : {BatchStrategy::Unif, BatchStrategy::Debias, BatchStrategy::NNIW}) {
            OneBatchOptions o;
            o.k = 6;
            o.strategy = s;
            o.batch_size = 50;
            o.max_passes = passes;
            auto r = one_batch_pam(d, o);
            EXPECT_EQ(r.dissim_evals, 300u * 50u);
            o.evaluate_exact = true;
            EXPECT_EQ(one_batch_pam(d, o).dissim_evals, 300u * 50u + 300u * 6u);
        }
        OneBatchOptions o;
        o.k = 6;
        o.strategy = BatchStrategy::LWCS;
        o.batch_size = 50;
        o.max_passes = passes;
        EXPECT_EQ(one_batch_pam(d, o).dissim_evals, 300u + 300u * 50u);
    }
}

TEST(OneBatchPam, AutoBatchSizeAndDeterminism) {
    auto d = oracle::random_points(500, 2, 3);
    OneBatchOptions o;
    o.k = 3;
    o.seed = RandomSeed{77};
    auto a = one_batch_pam(d, o);
    auto b = one_batch_pam(d, o);
    EXPECT_EQ(a.batch_size, std::min<std::size_t>(500, default_batch_size(500, 3)));
    EXPECT_EQ(a.medoids, b.medoids);
    EXPECT_EQ(a.est_objective, b.est_objective);
}

TEST(OneBatchPam, Errors) {
    auto d = oracle::random_points(10, 2, 3);
    OneBatchOptions o;
    o.k = 0;
    EXPECT_THROW(one_batch_pam(d, o), InvalidK);
    o.k = 11;
    EXPECT_THROW(one_batch_pam(d, o), InvalidK);
    o.k = 1;
    o.strategy = BatchStrategy::Debias;
    EXPECT_THROW(one_batch_pam(d, o), DebiasRequiresKAtLeast2);
    o.strategy = BatchStrategy::Unif;
    o.batch_size = 11;
    EXPECT_THROW(one_batch_pam(d, o), InvalidBatchSize);
}

TEST(OneBatchPam, SingleMedoid) {
    DataMatrix d(3, 1, {0, 1, 5});
    OneBatchOptions o;
    o.k = 1;
    o.batch_size = 3;
    o.strategy = BatchStrategy::Unif;
    auto r = one_batch_pam(d, o);
    EXPECT_EQ(r.medoids[0], 1u);
    EXPECT_DOUBLE_EQ(*r.est_objective, 5.0 / 3.0);
}

TEST(FasterPam, Examples) {
    DataMatrix d(3, 1, {0, 1, 5});
    auto r = faster_pam(d, {1, Metric::L1, 10, 0.0, {}, {}});
    EXPECT_EQ(r.medoids[0], 1u);
    EXPECT_DOUBLE_EQ(*r.exact_objective, 5.0 / 3.0);
    EXPECT_EQ(r.dissim_evals, 9u);

    DataMatrix two(2, 1, {0, 4});
    auto r2 = faster_pam(two, {2, Metric::L1, 10, 0.0, {}, {}});
    EXPECT_EQ(*r2.exact_objective, 0.0);
}

TEST(FasterPam, NeverWorseThanItsRandomStart) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto d = oracle::random_points(150, 3, seed);
        auto r = faster_pam(d, {4, Metric::L1, 10, 0.0, RandomSeed{seed}, {}});
        EXPECT_EQ(r.dissim_evals, 150u * 150u);
        auto start = random_select(d, {4, Metric::L1, RandomSeed{seed}, true});
        EXPECT_LE(*r.exact_objective, *start.exact_objective);
        EXPECT_NEAR(*r.exact_objective, oracle::exact_mean(d, to_vec(r.medoids)), 1e-12);
    }
}

TEST(LocalSearch, WeightScaleInvariance) {
    auto d = oracle::random_points(100, 2, 8);
    EvalCounter c;
    auto b = sample_batch(d, 30, BatchStrategy::NNIW, Metric::L1, RandomSeed{1}, c);
    MedoidSet start({1, 2, 3, 4}, 100);
    auto run = [&](const BatchView& view) {
        std::vector<std::pair<std::size_t, std::size_t>> seq;
        LocalSearchOptions o;
        o.observer = [&](const SwapEvent& e) { seq.emplace_back(e.candidate, e.slot); };
        auto out = local_search(view, start, o);
        return std::make_pair(seq, out.medoids);
    };
    auto base = run(b);
    EXPECT_EQ(run(b.scaled(0.5)), base);
    EXPECT_EQ(run(b.scaled(3.0)), base);
}
