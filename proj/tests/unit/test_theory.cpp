// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "random_fixtures.hpp"
#include "vtprune/error.hpp"
#include "vtprune/theory.hpp"

namespace vtprune::theory {
namespace {

Basis identity_basis(std::size_t d) {
    Basis b{d, d, std::vector<double>(d * d, 0.0)};
    for (std::size_t i = 0; i < d; ++i) b.data[i * d + i] = 1.0;
    return b;
}

template <typename F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Internal;
}

TEST(Diversity, IdenticalPairUsesNSquaredNormalization) {
    // Two identical tokens: each ordered pair contributes 1, and the sum over
    // i != j is divided by N^2, giving 2 / 4.
    TokenMatrix v(2, 3, {1, 2, 3, 1, 2, 3});
    EXPECT_NEAR(diversity_measure(v, identity_basis(3)), 0.5, 1e-12);
    EXPECT_NEAR(diversity_measure(v, identity_basis(3), KernelForm::ShiftedCosine), 0.5, 1e-12);
}

TEST(Diversity, OrthogonalProjectionsGiveZero) {
    TokenMatrix v(2, 2, {1, 0, 0, 1});
    EXPECT_NEAR(diversity_measure(v, identity_basis(2)), 0.0, 1e-12);
}

TEST(Diversity, MatchesDoubleLoopOracle) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const auto [w_v, w_t] = orthogonal_bases(12, 4, 3, trial);
        const auto v = testing::gaussian_matrix(6, 12, rng);
        EXPECT_NEAR(diversity_measure(v, w_v), static_cast<double>(oracle::diversity(v, w_v)), 1e-9);
        const auto t = testing::gaussian_matrix(5, 12, rng);
        EXPECT_NEAR(cross_redundancy_measure(v, t, w_t), static_cast<double>(oracle::redundancy(v, t, w_t)), 1e-9);
    }
}

TEST(Redundancy, Examples) {
    TokenMatrix v(2, 2, {1, 0, 0, 2});
    EXPECT_NEAR(cross_redundancy_measure(v, v, identity_basis(2)), 0.5, 1e-12);
    TokenMatrix same(3, 2, {1, 1, 1, 1, 2, 2});
    EXPECT_NEAR(cross_redundancy_measure(same, same, identity_basis(2)), 1.0, 1e-12);
    TokenMatrix text(1, 2, {0, 1});
    TokenMatrix vis(2, 2, {1, 0, -3, 0});
    EXPECT_NEAR(cross_redundancy_measure(vis, text, identity_basis(2)), 0.0, 1e-12);
}

TEST(Measures, DegenerateProjection) {
    const auto [w_v, w_t] = orthogonal_bases(6, 2, 2, 3);
    // A token with no component in W_V's span.
    TokenMatrix zero(2, 6);
    EXPECT_EQ(kind_of([&] { diversity_measure(zero, w_v); }), ErrorKind::DegenerateVector);
    EXPECT_EQ(kind_of([&] { diversity_measure(TokenMatrix(1, 6, {1, 0, 0, 0, 0, 0}), w_v); }),
              ErrorKind::DimensionMismatch);
}

TEST(Measures, RangeProperty) {
    std::mt19937_64 rng(2);
    const auto [w_v, w_t] = orthogonal_bases(16, 5, 5, 9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = testing::gaussian_matrix(2 + trial % 10, 16, rng);
        const auto t = testing::gaussian_matrix(1 + trial % 5, 16, rng);
        const double d = diversity_measure(v, w_v);
        const double r = cross_redundancy_measure(v, t, w_t);
        EXPECT_GE(d, -1.0);
        EXPECT_LE(d, 1.0);
        EXPECT_GE(r, -1.0);
        EXPECT_LE(r, 1.0);
    }
}

TEST(Bases, OrthonormalAndMutuallyOrthogonal) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto [w_v, w_t] = orthogonal_bases(32, 8, 8, seed);
        EXPECT_NO_THROW(check_bases(w_v, w_t));
    }
    EXPECT_THROW(orthogonal_bases(8, 5, 4, 0), Error);
}

TEST(Bases, ViolationAborts) {
    auto trial = orthogonal_trial(8, 4, 16, 4, 4, 1);
    trial.w_t = trial.w_v;
    EXPECT_EQ(kind_of([&] { covariance_experiment(trial, 200); }), ErrorKind::OrthogonalityViolated);
    auto skewed = orthogonal_trial(8, 4, 16, 4, 4, 1);
    skewed.w_v.data[0] += 1e-6;
    EXPECT_EQ(kind_of([&] { covariance_experiment(skewed, 200); }), ErrorKind::OrthogonalityViolated);
}

TEST(Covariance, MinimumTrials) {
    const auto trial = orthogonal_trial(8, 4, 16, 4, 4, 1);
    EXPECT_EQ(kind_of([&] { covariance_experiment(trial, 99); }), ErrorKind::InvalidPlan);
}

TEST(Covariance, SampleCovarianceUnbiased) {
    const std::vector<MeasurePair> pairs{{1, 2}, {2, 4}, {3, 6}};
    // mean (2, 4); sum of products 1*2 + 0 + 1*2 = 4; / (n - 1) = 2.
    EXPECT_DOUBLE_EQ(sample_covariance(pairs), 2.0);
}

TEST(Covariance, ReproducibleAndThreadIndependent) {
    auto trial = orthogonal_trial(16, 8, 32, 8, 8, 42);
    const auto a = draw_measures(trial, 2000);
    const auto b = draw_measures(trial, 2000);
    EXPECT_EQ(a, b);
    trial.threads = 4;
    EXPECT_EQ(draw_measures(trial, 2000), a);
    trial.threads = 3;
    const auto r3 = covariance_experiment(trial, 1000);
    trial.threads = 1;
    const auto r1 = covariance_experiment(trial, 1000);
    EXPECT_EQ(r3.sample_cov, r1.sample_cov);
    EXPECT_EQ(r3.standard_error, r1.standard_error);
    auto other = trial;
    other.seed = 43;
    EXPECT_NE(draw_measures(other, 10), draw_measures(trial, 10));
}

TEST(Covariance, OrthogonalBasesUncorrelated) {
    const auto trial = orthogonal_trial(16, 8, 32, 8, 8, 7);
    const auto r = covariance_experiment(trial, 20000);
    EXPECT_LE(std::abs(r.sample_cov), 3.0 * r.standard_error);
}

TEST(Covariance, NegativeControlCorrelated) {
    const auto trial = correlated_control(16, 8, 32, 8, 7);
    const auto r = covariance_experiment(trial, 2000);
    EXPECT_GT(std::abs(r.sample_cov), 3.0 * r.standard_error);
}

TEST(Covariance, StandardErrorShrinksAsInverseSqrt) {
    const auto trial = orthogonal_trial(16, 8, 32, 8, 8, 11);
    const auto small = covariance_experiment(trial, 100);
    const auto large = covariance_experiment(trial, 100000);
    const double ratio = small.standard_error / large.standard_error;
    const double expected = std::sqrt(1000.0);
    EXPECT_GT(ratio, expected / 2.0);
    EXPECT_LT(ratio, expected * 2.0);
}

}  // namespace
}  // namespace vtprune::theory
