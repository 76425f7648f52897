#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace cc = curveclust;
using cc::testing::pair_enumeration;
using cc::testing::random_labels;

TEST(Score, TableRowIdentities)
{
    const cc::ModelScore s = cc::make_score(548.54, 7, 128);
    EXPECT_NEAR(s.aic, -1083.08, 1e-9);
    EXPECT_NEAR(s.bic, -1063.12, 0.05);
    EXPECT_NEAR(s.bic, -2 * 548.54 + 7 * std::log(128.0), 1e-12);
    EXPECT_EQ(s.likelihood, "hard");
}

TEST(Score, ZeroCase)
{
    const cc::ModelScore s = cc::make_score(0.0, 0, 1);
    EXPECT_EQ(s.aic, 0.0);
    EXPECT_EQ(s.bic, 0.0);
}

TEST(Score, DoublingParametersAddsTwicePToAic)
{
    for (int p : {1, 5, 40}) {
        const double a = cc::make_score(-12.5, p, 300).aic;
        const double b = cc::make_score(-12.5, 2 * p, 300).aic;
        EXPECT_NEAR(b - a, 2.0 * p, 1e-12);
    }
}

TEST(Score, RejectsBadCounts)
{
    EXPECT_THROW(cc::make_score(1.0, -1, 10), std::invalid_argument);
    EXPECT_THROW(cc::make_score(1.0, 3, 0), std::invalid_argument);
}

TEST(RandIndex, Examples)
{
    const std::vector<int> a = {0, 0, 1, 1};
    const std::vector<int> b = {0, 1, 0, 1};
    EXPECT_NEAR(cc::rand_index(a, b), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(cc::rand_index(a, a), 1.0);
}

TEST(JaccardIndex, Examples)
{
    const std::vector<int> a = {0, 0, 1, 1};
    const std::vector<int> b = {0, 1, 0, 1};
    EXPECT_EQ(cc::jaccard_index(a, b), 0.0);
    EXPECT_EQ(cc::jaccard_index(a, a), 1.0);
    const std::vector<int> singletons = {0, 1, 2, 3, 4};
    EXPECT_EQ(cc::jaccard_index(singletons, singletons), 1.0);
    EXPECT_EQ(cc::jaccard_index(singletons, {5, 6, 7, 8, 9}), 1.0);
}

TEST(PairIndices, RejectBadInput)
{
    EXPECT_THROW(cc::rand_index({0, 1}, {0, 1, 2}), std::invalid_argument);
    EXPECT_THROW(cc::jaccard_index({0}, {0}), std::invalid_argument);
}

TEST(PairIndices, MatchPairEnumeration)
{
    cc::Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(80);
        const auto a = random_labels(n, 1 + static_cast<int>(rng.index(6)), rng);
        const auto b = random_labels(n, 1 + static_cast<int>(rng.index(6)), rng);
        const auto [rand, jaccard] = pair_enumeration(a, b);
        EXPECT_NEAR(cc::rand_index(a, b), rand, 1e-12);
        EXPECT_NEAR(cc::jaccard_index(a, b), jaccard, 1e-12);
    }
}

TEST(PairIndices, SymmetricAndSelfIdentical)
{
    cc::Rng rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.index(60);
        const auto a = random_labels(n, 4, rng);
        const auto b = random_labels(n, 3, rng);
        EXPECT_EQ(cc::rand_index(a, b), cc::rand_index(b, a));
        EXPECT_EQ(cc::jaccard_index(a, b), cc::jaccard_index(b, a));
        EXPECT_EQ(cc::rand_index(a, a), 1.0);
        EXPECT_EQ(cc::jaccard_index(a, a), 1.0);
        const double r = cc::rand_index(a, b);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
    }
}

TEST(PairIndices, InvariantUnderLabelPermutation)
{
    cc::Rng rng(33);
    const auto a = random_labels(70, 4, rng);
    const auto b = random_labels(70, 5, rng);
    const std::vector<int> perm = {3, 0, 4, 1, 2};
    std::vector<int> renamed(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) renamed[i] = 10 * perm[static_cast<std::size_t>(b[i])] - 7;
    EXPECT_DOUBLE_EQ(cc::rand_index(a, b), cc::rand_index(a, renamed));
    EXPECT_DOUBLE_EQ(cc::jaccard_index(a, b), cc::jaccard_index(a, renamed));
}
