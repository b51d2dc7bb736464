// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "random_fixtures.hpp"
#include "vtprune/error.hpp"
#include "vtprune/kcenter.hpp"

namespace vtprune {
namespace {

TokenMatrix circle(const std::vector<double>& degrees) {
    TokenMatrix m(degrees.size(), 2);
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const double rad = degrees[i] * std::numbers::pi / 180.0;
        m(i, 0) = static_cast<float>(std::cos(rad));
        m(i, 1) = static_cast<float>(std::sin(rad));
    }
    return m;
}

// Smallest gap between the winning candidate and the runner-up over all
// greedy steps, evaluated in long double. Instances with tiny gaps are not
// tie-free and are skipped by properties that perturb the input.
long double min_step_gap(const TokenMatrix& m, const std::vector<std::size_t>& order) {
    long double gap = 1e9L;
    std::vector<char> selected(m.rows(), 0);
    selected[order[0]] = 1;
    for (std::size_t step = 1; step < order.size(); ++step) {
        std::vector<long double> values;
        for (std::size_t v = 0; v < m.rows(); ++v) {
            if (selected[v]) continue;
            long double worst = -2;
            for (std::size_t s = 0; s < step; ++s) worst = std::max(worst, oracle::cosine(m.row(v), m.row(order[s])));
            values.push_back(worst);
        }
        std::sort(values.begin(), values.end());
        if (values.size() > 1) gap = std::min(gap, values[1] - values[0]);
        selected[order[step]] = 1;
    }
    return gap;
}

TEST(GreedyKCenter, SingleCenter) {
    std::mt19937_64 rng(1);
    const auto m = testing::gaussian_matrix(10, 4, rng);
    const auto r = greedy_kcenter(m, 7, 1);
    EXPECT_EQ(r.indices, (std::vector<std::size_t>{7}));
    EXPECT_TRUE(r.trace.empty());
}

TEST(GreedyKCenter, UnitCircleOrder) {
    const auto m = circle({0, 10, 90, 180});
    const std::vector<std::size_t> want{0, 3, 2, 1};  // 0, 180, 90, 10 degrees
    EXPECT_EQ(greedy_kcenter(m, 0, 4).indices, want);
    EXPECT_EQ(oracle_greedy(m, 0, 4).indices, want);
    const auto r = greedy_kcenter(m, 0, 4);
    ASSERT_EQ(r.trace.size(), 3u);
    EXPECT_NEAR(r.trace[0].max_similarity, -1.0, 1e-6);
    EXPECT_NEAR(r.trace[1].max_similarity, 0.0, 1e-6);
    EXPECT_NEAR(r.trace[2].max_similarity, std::cos(10.0 * std::numbers::pi / 180.0), 1e-6);
}

TEST(GreedyKCenter, AllTiesLowestIndex) {
    TokenMatrix m(5, 3);
    for (std::size_t i = 0; i < 5; ++i) m(i, 0) = m(i, 1) = m(i, 2) = 1.5f;
    EXPECT_EQ(greedy_kcenter(m, 0, 3).indices, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(greedy_kcenter(m, 3, 3).indices, (std::vector<std::size_t>{3, 0, 1}));
}

TEST(GreedyKCenter, Errors) {
    std::mt19937_64 rng(2);
    const auto m = testing::gaussian_matrix(6, 3, rng);
    auto kind = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Internal;
    };
    EXPECT_EQ(kind([&] { greedy_kcenter(m, 0, 0); }), ErrorKind::InvalidK);
    EXPECT_EQ(kind([&] { greedy_kcenter(m, 0, 7); }), ErrorKind::InvalidK);
    EXPECT_EQ(kind([&] { greedy_kcenter(m, 6, 2); }), ErrorKind::InvalidK);
    TokenMatrix z = m;
    std::fill(z.row(4).begin(), z.row(4).end(), 0.0f);
    EXPECT_EQ(kind([&] { greedy_kcenter(z, 0, 3); }), ErrorKind::DegenerateVector);
    const auto big = testing::gaussian_matrix(kOracleMaxTokens + 1, 2, rng);
    EXPECT_EQ(kind([&] { oracle_greedy(big, 0, 2); }), ErrorKind::InstanceTooLarge);
    const auto thirteen = testing::gaussian_matrix(13, 2, rng);
    EXPECT_EQ(kind([&] { optimal_kcenter_radius(thirteen, 2); }), ErrorKind::InstanceTooLarge);
}

TEST(OracleGreedy, FullOrderContainsEverything) {
    std::mt19937_64 rng(3);
    const auto m = testing::gaussian_matrix(20, 5, rng);
    auto r = oracle_greedy(m, 4, 20);
    EXPECT_EQ(r.indices[0], 4u);
    std::sort(r.indices.begin(), r.indices.end());
    std::vector<std::size_t> all(20);
    std::iota(all.begin(), all.end(), 0);
    EXPECT_EQ(r.indices, all);
}

TEST(GreedyKCenterProperty, EqualsOracleOnRandomInstances) {
    std::mt19937_64 rng(2024);
    std::size_t runs = 0;
    for (int inst = 0; inst < 220; ++inst) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
        const auto m = testing::gaussian_matrix(n, d, rng);
        const std::size_t pivot = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        const auto full = oracle_greedy(m, pivot, n);
        for (std::size_t k = 1; k <= n; ++k) {
            const auto g = greedy_kcenter(m, pivot, k);
            ASSERT_EQ(g.indices.size(), k);
            ASSERT_TRUE(std::equal(g.indices.begin(), g.indices.end(), full.indices.begin()))
                << "instance " << inst << " n=" << n << " d=" << d << " k=" << k;
            ++runs;
        }
        // Spot check a direct oracle call at one k as well.
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng);
        EXPECT_EQ(oracle_greedy(m, pivot, k), greedy_kcenter(m, pivot, k));
    }
    EXPECT_GT(runs, 200u);
}

TEST(GreedyKCenterProperty, RawDotModeEqualsOracle) {
    std::mt19937_64 rng(77);
    const KCenterOptions raw{SimilarityMode::RawDot};
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = 2 + inst % 40;
        const auto m = testing::gaussian_matrix(n, 1 + inst % 9, rng);
        EXPECT_EQ(greedy_kcenter(m, 0, n, raw).indices, oracle_greedy(m, 0, n, raw).indices);
    }
}

TEST(GreedyKCenterProperty, DistinctPivotFirstMonotoneTrace) {
    std::mt19937_64 rng(5);
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 2 + inst % 60;
        const auto m = testing::gaussian_matrix(n, 1 + inst % 12, rng);
        const std::size_t pivot = inst % n;
        const auto r = greedy_kcenter(m, pivot, n);
        EXPECT_EQ(r.indices[0], pivot);
        auto sorted = r.indices;
        std::sort(sorted.begin(), sorted.end());
        EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
        ASSERT_EQ(r.trace.size(), n - 1);
        for (std::size_t t = 0; t < r.trace.size(); ++t) {
            EXPECT_EQ(r.trace[t].index, r.indices[t + 1]);
            EXPECT_GE(r.trace[t].max_similarity, -1.0f);
            EXPECT_LE(r.trace[t].max_similarity, 1.0f);
            if (t > 0) {
                EXPECT_GE(r.trace[t].max_similarity, r.trace[t - 1].max_similarity);
            }
        }
    }
}

TEST(GreedyKCenterProperty, PermutationEquivariance) {
    std::mt19937_64 rng(6);
    int checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 3 + inst % 40;
        const auto m = testing::gaussian_matrix(n, 2 + inst % 10, rng);
        const std::size_t k = 1 + inst % n;
        const auto base = greedy_kcenter(m, 0, k);
        if (min_step_gap(m, base.indices) < 1e-5L) continue;
        std::vector<std::size_t> perm(n);  // new row i = old row perm[i]
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::size_t> inverse(n);
        TokenMatrix p(n, m.cols());
        for (std::size_t i = 0; i < n; ++i) {
            inverse[perm[i]] = i;
            std::copy(m.row(perm[i]).begin(), m.row(perm[i]).end(), p.row(i).begin());
        }
        const auto moved = greedy_kcenter(p, inverse[0], k);
        for (std::size_t t = 0; t < k; ++t) EXPECT_EQ(perm[moved.indices[t]], base.indices[t]);
        ++checked;
    }
    EXPECT_GT(checked, 80);
}

TEST(GreedyKCenterProperty, PositiveRescalingInvariance) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> scale(0.01f, 100.0f);
    int checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 3 + inst % 40;
        auto m = testing::gaussian_matrix(n, 2 + inst % 10, rng);
        const auto base = greedy_kcenter(m, 1 % n, n);
        if (min_step_gap(m, base.indices) < 1e-5L) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const float c = scale(rng);
            for (auto& v : m.row(i)) v *= c;
        }
        EXPECT_EQ(greedy_kcenter(m, 1 % n, n).indices, base.indices);
        ++checked;
    }
    EXPECT_GT(checked, 80);
}

TEST(OptimalRadius, Examples) {
    const auto square = circle({0, 90, 180, 270});
    EXPECT_NEAR(optimal_kcenter_radius(square, 2), std::sqrt(2.0), 1e-6);
    EXPECT_EQ(optimal_kcenter_radius(square, 4), 0.0);
    TokenMatrix same(6, 3);
    for (std::size_t i = 0; i < 6; ++i) same(i, 0) = static_cast<float>(i + 1);
    for (std::size_t k = 1; k <= 5; ++k) EXPECT_NEAR(optimal_kcenter_radius(same, k), 0.0, 1e-12);
    EXPECT_NEAR(chordal_distance(square, 0, 2), 2.0, 1e-7);
}

TEST(GreedyKCenterProperty, TwoApproximation) {
    std::mt19937_64 rng(8);
    for (int set = 0; set < 50; ++set) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
        const auto m = testing::gaussian_matrix(n, 2 + set % 6, rng);
        for (std::size_t k = 1; k <= std::min<std::size_t>(n, 5); ++k) {
            const auto g = greedy_kcenter(m, set % n, k);
            const double r = covering_radius(m, g.indices);
            const double opt = optimal_kcenter_radius(m, k);
            EXPECT_LE(opt, r + 1e-12);
            EXPECT_LE(r, 2.0 * opt + 1e-9) << "set " << set << " n=" << n << " k=" << k;
        }
    }
}

TEST(GreedyKCenter, DeskScaleRuns) {
    std::mt19937_64 rng(9);
    const auto m = testing::gaussian_matrix(2880, 256, rng);
    const auto r = greedy_kcenter(m, 0, 288);
    EXPECT_EQ(r.indices.size(), 288u);
}

}  // namespace
}  // namespace vtprune
