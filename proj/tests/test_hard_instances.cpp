#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gausstree/gausstree.hpp"
#include "test_util.hpp"

using namespace gausstree;

namespace {

double nonrealizable_kl_formula(double t) {
    return (27 * t * t * t * t + 24 * t * t * t + 6 * t * t) / (28 * t * t + 24 * t + 8);
}

} // namespace

TEST(MiTestPair, Constants) {
    const auto p = mi_test_pair(0.2);
    EXPECT_EQ(p.first.cov(), SymMatrix::identity(2));
    EXPECT_NEAR(gaussian_mi(p.second, {0}, {1}), 0.5 * std::log(1.2), 1e-14);
    EXPECT_EQ(gaussian_mi(p.first, {0}, {1}), 0.0);
    EXPECT_NEAR(gaussian_kl(p.first, p.second), 0.1, 1e-12);
    EXPECT_THROW(mi_test_pair(0.0), std::invalid_argument);
    EXPECT_THROW(mi_test_pair(1.0), std::invalid_argument);
}

TEST(AdditiveEstimationPair, Constants) {
    const auto p = additive_estimation_pair(0.1);
    EXPECT_NEAR(determinant(p.first.cov()), 1.0, 1e-14);
    EXPECT_NEAR(determinant(p.second.cov()), 1.0, 1e-14);
    EXPECT_NEAR(gaussian_kl(p.first, p.second), 0.02, 1e-12);
    EXPECT_NEAR(gaussian_kl(p.second, p.first), 0.02, 1e-12);
    // MI of Y = s X + V is 1/2 ln(1 + s^2).
    EXPECT_NEAR(gaussian_mi(p.first, {0}, {1}), 0.15374234987398032023, 1e-14);
    EXPECT_NEAR(gaussian_mi(p.second, {0}, {1}), 0.074210002559136638991, 1e-14);
    const auto same = additive_estimation_pair(0.0);
    EXPECT_EQ(gaussian_kl(same.first, same.second), 0.0);
    EXPECT_THROW(additive_estimation_pair(-0.1), std::invalid_argument);
}

TEST(RealizableBlock, Constants) {
    const auto r1 = realizable_block(0.1, 1, 1);
    const auto r2 = realizable_block(0.1, 1, 2);
    EXPECT_NEAR(determinant(r1.cov()), 3.0, 1e-12);
    EXPECT_NEAR(determinant(r2.cov()), 3.0, 1e-12);
    EXPECT_NEAR(gaussian_kl(r1, r2), 0.1, 1e-12);
    EXPECT_NEAR(gaussian_kl(r2, r1), 0.1, 1e-12);
    EXPECT_GT(gaussian_mi(r1, {0}, {2}), 0.1 / 16.0);
    EXPECT_EQ(maximum_spanning_tree(pairwise_oracle_mi(r1.cov())), Tree(3, {{0, 2}, {1, 2}}));
    EXPECT_EQ(maximum_spanning_tree(pairwise_oracle_mi(r2.cov())), Tree(3, {{0, 1}, {1, 2}}));
    EXPECT_THROW(realizable_block(0.1, 0, 1), std::invalid_argument);
    EXPECT_THROW(realizable_block(0.1, 1, 3), std::invalid_argument);
}

TEST(RealizableBlock, ChainVariantIsTreeStructured) {
    for (double eps : {0.1, 0.03, 0.5}) {
        const auto r1 = realizable_block(eps, 1, 1, RealizableVariant::Chain, 0.5);
        const auto r2 = realizable_block(eps, 1, 2, RealizableVariant::Chain, 0.5);
        EXPECT_NEAR(gaussian_cmi(r1, {0}, {1}, {2}), 0.0, 1e-12);
        EXPECT_NEAR(gaussian_cmi(r2, {0}, {2}, {1}), 0.0, 1e-12);
        EXPECT_NEAR(kl_via_decomposition(r1, Tree(3, {{0, 2}, {1, 2}})), 0.0, 1e-12);
        EXPECT_NEAR(kl_via_decomposition(r2, Tree(3, {{0, 1}, {1, 2}})), 0.0, 1e-12);
        EXPECT_EQ(maximum_spanning_tree(pairwise_oracle_mi(r1.cov())), Tree(3, {{0, 2}, {1, 2}}));
    }
}

TEST(NonRealizableBlock, Constants) {
    const auto r1 = nonrealizable_block(0.1, 1, 1);
    const auto r2 = nonrealizable_block(0.1, 1, 2);
    EXPECT_NEAR(determinant(r1.cov()), 5.34, 1e-12);
    EXPECT_NEAR(gaussian_kl(r1, r2), nonrealizable_kl_formula(0.1), 1e-12);
    EXPECT_NEAR(gaussian_kl(r1, r2), 0.0081179775280898876404, 1e-15);
    const double xy = gaussian_mi(r1, {0}, {1});
    const double xz = gaussian_mi(r1, {0}, {2});
    const double yz = gaussian_mi(r1, {1}, {2});
    EXPECT_GT(yz, xz);
    EXPECT_GT(xz, xy);
    EXPECT_NEAR(xy, 0.195131693620186, 1e-13);
    EXPECT_NEAR(xz, 0.210778578003904, 1e-13);
    EXPECT_NEAR(yz, 0.231630912972958, 1e-13);
}

TEST(HardInstances, ClosedFormsAtRandomSettings) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> eps_dist(0.001, 0.999);
    std::uniform_int_distribution<std::size_t> n_dist(1, 50);
    for (int rep = 0; rep < 50; ++rep) {
        const double eps = eps_dist(rng);
        const std::size_t n = n_dist(rng);
        const double t = eps / static_cast<double>(n);
        const auto r1 = realizable_block(eps, n, 1);
        const auto r2 = realizable_block(eps, n, 2);
        EXPECT_NEAR(determinant(r1.cov()), 3.0, 1e-10);
        EXPECT_NEAR(determinant(r2.cov()), 3.0, 1e-10);
        EXPECT_NEAR(gaussian_kl(r1, r2), t, 1e-10);
        EXPECT_NEAR(gaussian_kl(r2, r1), t, 1e-10);
        const auto n1 = nonrealizable_block(eps, n, 1);
        const auto n2 = nonrealizable_block(eps, n, 2);
        EXPECT_NEAR(determinant(n1.cov()), 14 * t * t + 12 * t + 4, 1e-10);
        EXPECT_NEAR(determinant(n2.cov()), 14 * t * t + 12 * t + 4, 1e-10);
        EXPECT_NEAR(gaussian_kl(n1, n2), nonrealizable_kl_formula(t), 1e-10);
        const auto mi = mi_test_pair(eps);
        EXPECT_NEAR(gaussian_kl(mi.first, mi.second), eps / 2.0, 1e-10);
        const auto add = additive_estimation_pair(eps);
        EXPECT_NEAR(gaussian_kl(add.first, add.second), 2 * eps * eps, 1e-10);
        EXPECT_NEAR(gaussian_kl(add.second, add.first), 2 * eps * eps, 1e-10);
        EXPECT_NEAR(determinant(add.first.cov()), 1.0, 1e-10);
    }
}

TEST(ComposeBlocks, BlockDiagonalAndKlAdditive) {
    BlockSpec a;
    a.bits = {1, 0, 1};
    a.epsilon = 0.3;
    a.n = 3;
    BlockSpec b = a;
    b.bits = {0, 0, 0};
    const auto da = compose_blocks(a);
    const auto db = compose_blocks(b);
    EXPECT_EQ(da.dim(), 9u);
    EXPECT_NEAR(gaussian_kl(da, db), 0.2, 1e-10);
    EXPECT_NEAR(gaussian_mi(da, {0, 1, 2}, {3, 4, 5, 6, 7, 8}), 0.0, 1e-10);
    EXPECT_NEAR(gaussian_kl(da, compose_blocks(a)), 0.0, 1e-12);

    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 40; ++rep) {
        BlockSpec p;
        p.kind = rep % 2 ? BlockKind::Realizable : BlockKind::NonRealizable;
        p.epsilon = 0.05 + 0.01 * rep;
        p.n = 4;
        BlockSpec q = p;
        double expected = 0.0;
        for (int blk = 0; blk < 4; ++blk) {
            p.bits.push_back(static_cast<std::uint8_t>(rng() & 1));
            q.bits.push_back(static_cast<std::uint8_t>(rng() & 1));
            if (p.bits.back() != q.bits.back()) {
                const int w1 = p.bits.back() ? 1 : 2;
                const int w2 = q.bits.back() ? 1 : 2;
                expected += p.kind == BlockKind::Realizable
                                ? gaussian_kl(realizable_block(p.epsilon, 4, w1), realizable_block(p.epsilon, 4, w2))
                                : gaussian_kl(nonrealizable_block(p.epsilon, 4, w1),
                                              nonrealizable_block(p.epsilon, 4, w2));
            }
        }
        EXPECT_NEAR(gaussian_kl(compose_blocks(p), compose_blocks(q)), expected, 1e-9);
    }
}

TEST(ComposeBlocks, Validation) {
    BlockSpec s;
    EXPECT_THROW(compose_blocks(s), std::invalid_argument);
    s.bits = {2};
    EXPECT_THROW(compose_blocks(s), std::invalid_argument);
    s.bits = {1};
    s.epsilon = 1.5;
    EXPECT_THROW(compose_blocks(s), std::invalid_argument);
}

TEST(GilbertVarshamov, DistanceInvariantHolds) {
    const CodeBook c = gilbert_varshamov_code(20, 4, 16, 1);
    EXPECT_GE(c.words.size(), 16u);
    for (std::size_t i = 0; i < c.words.size(); ++i) {
        EXPECT_EQ(c.words[i].size(), 20u);
        for (std::size_t j = i + 1; j < c.words.size(); ++j) {
            EXPECT_GE(hamming_distance(c.words[i], c.words[j]), 4u);
        }
    }
    for (std::size_t n : {5u, 10u, 23u, 40u}) {
        const CodeBook d = gilbert_varshamov_code(n, default_code_distance(n), 8, n);
        for (std::size_t i = 0; i < d.words.size(); ++i) {
            for (std::size_t j = i + 1; j < d.words.size(); ++j) {
                EXPECT_GE(hamming_distance(d.words[i], d.words[j]), (n + 4) / 5);
            }
        }
    }
}

TEST(GilbertVarshamov, AllWordsAdmissibleAtDistanceOne) {
    const CodeBook c = gilbert_varshamov_code(5, 1, 32, 3);
    std::set<std::vector<std::uint8_t>> distinct(c.words.begin(), c.words.end());
    EXPECT_EQ(distinct.size(), 32u);
    const CodeBook z = gilbert_varshamov_code(5, 0, 20, 3);
    std::set<std::vector<std::uint8_t>> distinct_z(z.words.begin(), z.words.end());
    EXPECT_EQ(distinct_z.size(), 20u);
}

TEST(GilbertVarshamov, Errors) {
    EXPECT_THROW(gilbert_varshamov_code(4, 1, 2, 0), std::invalid_argument);
    EXPECT_THROW(gilbert_varshamov_code(5, 1, 33, 0), std::invalid_argument);
    EXPECT_THROW(gilbert_varshamov_code(5, 1, 0, 0), std::invalid_argument);
    try {
        (void)gilbert_varshamov_code(5, 5, 3, 0); // at most two words can be at distance 5
        FAIL();
    } catch (const TargetUnreachable& e) {
        EXPECT_LE(e.achieved(), 2u);
        EXPECT_GE(e.achieved(), 1u);
    }
    EXPECT_THROW(hamming_distance({1, 0}, {1}), LengthMismatch);
}
