#include <gtest/gtest.h>

#include <random>

#include "onebatch/dissimilarity.hpp"
#include "onebatch/error.hpp"

using namespace onebatch;

TEST(Dissim, HandValues) {
    EvalCounter c;
    std::vector<double> o{0, 0}, p{3, 4};
    EXPECT_DOUBLE_EQ(dissim(Metric::L1, o, p, c), 7.0);
    EXPECT_DOUBLE_EQ(dissim(Metric::L2, o, p, c), 5.0);
    EXPECT_DOUBLE_EQ(dissim(Metric::SquaredL2, o, p, c), 25.0);
    EXPECT_EQ(c.count(), 3u);
}

TEST(Dissim, SelfIsZeroForEveryKind) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    EvalCounter c;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(1 + rng() % 7);
        for (double& v : x) v = z(rng);
        for (Metric m : {Metric::L1, Metric::L2, Metric::SquaredL2, Metric::Cosine})
            EXPECT_EQ(dissim(m, x, x, c), 0.0);
    }
}

TEST(Dissim, Errors) {
    EvalCounter c;
    std::vector<double> a{1, 2}, b{1, 2, 3}, zero{0, 0};
    EXPECT_THROW(dissim(Metric::L1, a, b, c), DimensionMismatch);
    EXPECT_THROW(dissim(Metric::Cosine, a, zero, c), ZeroVector);
    EXPECT_EQ(c.count(), 0u);
}

TEST(Dissim, SymmetryNonNegativityTriangle) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 3.0);
    EvalCounter c;
    for (int t = 0; t < 500; ++t) {
        std::size_t p = 1 + rng() % 5;
        std::vector<double> x(p), y(p), w(p);
        for (std::size_t f = 0; f < p; ++f) x[f] = z(rng), y[f] = z(rng), w[f] = z(rng);
        for (Metric m : {Metric::L1, Metric::L2, Metric::SquaredL2, Metric::Cosine}) {
            double dxy = dissim(m, x, y, c);
            EXPECT_EQ(dxy, dissim(m, y, x, c));
            EXPECT_GE(dxy, 0.0);
        }
        for (Metric m : {Metric::L1, Metric::L2}) {
            double lhs = dissim(m, x, y, c);
            double rhs = dissim(m, x, w, c) + dissim(m, w, y, c);
            EXPECT_LE(lhs, rhs * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST(CrossDissimMatrix, HandExampleAndCount) {
    DataMatrix d(3, 1, {0, 1, 5});
    EvalCounter c;
    std::vector<std::size_t> cols{0, 2};
    auto m = cross_dissim_matrix(Metric::L1, d, cols, c);
    ASSERT_EQ(m.rows(), 3u);
    ASSERT_EQ(m.cols(), 2u);
    EXPECT_EQ(m(0, 0), 0);
    EXPECT_EQ(m(0, 1), 5);
    EXPECT_EQ(m(1, 0), 1);
    EXPECT_EQ(m(1, 1), 4);
    EXPECT_EQ(m(2, 0), 5);
    EXPECT_EQ(m(2, 1), 0);
    EXPECT_EQ(c.count(), 6u);
}

TEST(CrossDissimMatrix, FullColumnsSymmetricZeroDiagonal) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    std::vector<double> v(100 * 3);
    for (double& x : v) x = z(rng);
    DataMatrix d(100, 3, v);
    std::vector<std::size_t> all(100);
    std::iota(all.begin(), all.end(), 0);
    EvalCounter c;
    auto m = cross_dissim_matrix(Metric::L2, d, all, c);
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_EQ(m(i, i), 0.0);
        for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(m(i, j), m(j, i));
    }
    EXPECT_EQ(c.count(), 10000u);

    EvalCounter c7;
    std::vector<std::size_t> seven{0, 5, 9, 13, 50, 77, 99};
    cross_dissim_matrix(Metric::L1, d, seven, c7);
    EXPECT_EQ(c7.count(), 700u);

    std::vector<std::size_t> bad{100};
    EXPECT_THROW(cross_dissim_matrix(Metric::L1, d, bad, c7), IndexOutOfRange);
}

TEST(Metric, NamesRoundTrip) {
    for (Metric m : {Metric::L1, Metric::L2, Metric::SquaredL2, Metric::Cosine})
        EXPECT_EQ(parse_metric(metric_name(m)), m);
    EXPECT_THROW(parse_metric("manhattan"), InvalidConfig);
}
