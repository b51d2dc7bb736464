// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vtprune/tensors.hpp"

// Monte Carlo check that intra-modal diversity and cross-modal redundancy are
// uncorrelated when the two modalities live in orthogonal sub-spaces.
namespace vtprune::theory {

// ambient x rank column basis, double precision.
struct Basis {
    std::size_t ambient = 0;
    std::size_t rank = 0;
    std::vector<double> data;  // row-major

    double operator()(std::size_t i, std::size_t j) const noexcept { return data[i * rank + j]; }
    // W^T v
    std::vector<double> project(std::span<const float> v) const;
};

inline constexpr double kOrthogonalityTolerance = 1e-10;

// Columns orthonormal within tolerance, and W_V^T W_T == 0 when
// `require_cross` is set. Throws OrthogonalityViolated.
void check_bases(const Basis& w_v, const Basis& w_t, bool require_cross = true);

// Two mutually orthogonal column-orthonormal bases of R^ambient, from
// Gram-Schmidt over a seeded Gaussian matrix. rank_v + rank_t <= ambient.
std::pair<Basis, Basis> orthogonal_bases(std::size_t ambient, std::size_t rank_v, std::size_t rank_t,
                                         std::uint64_t seed);

enum class KernelForm {
    Cosine,         // cos in [-1, 1]
    ShiftedCosine,  // (1 + cos) / 2 in [0, 1]
};

enum class TokenGenerator {
    Isotropic,        // v, t ~ N(0, I)
    SharedDirection,  // v, t = s u + N(0, I) with per-trial u, s; correlated control
};

// (1 / N^2) sum_{i != j} kappa(W_V^T v_i, W_V^T v_j).
double diversity_measure(const TokenMatrix& visual, const Basis& w_v, KernelForm kernel = KernelForm::Cosine);

// (1 / N) sum_i rho(W_T^T v_i, T), rho = mean kernel value against the
// projected text tokens W_T^T t_j.
double cross_redundancy_measure(const TokenMatrix& visual, const TokenMatrix& text, const Basis& w_t,
                                KernelForm kernel = KernelForm::Cosine);

struct LemmaTrial {
    std::size_t visual_tokens = 16;
    std::size_t text_tokens = 8;
    Basis w_v;
    Basis w_t;
    KernelForm kernel = KernelForm::Cosine;
    TokenGenerator generator = TokenGenerator::Isotropic;
    std::uint64_t seed = 0;
    bool require_orthogonal = true;
    std::size_t bootstrap_resamples = 1000;
    std::size_t threads = 1;
};

LemmaTrial orthogonal_trial(std::size_t visual_tokens, std::size_t text_tokens, std::size_t ambient,
                            std::size_t rank_v, std::size_t rank_t, std::uint64_t seed);

// W_T := W_V with tokens sharing a per-trial direction: both measures move
// together, so the covariance is clearly positive.
LemmaTrial correlated_control(std::size_t visual_tokens, std::size_t text_tokens, std::size_t ambient,
                              std::size_t rank, std::uint64_t seed);

struct MeasurePair {
    double diversity = 0.0;
    double redundancy = 0.0;

    bool operator==(const MeasurePair&) const = default;
};

// Measures for trials [0, num_trials); trial i draws from its own stream, so
// the result does not depend on trial.threads.
std::vector<MeasurePair> draw_measures(const LemmaTrial& trial, std::size_t num_trials);

double sample_covariance(std::span<const MeasurePair> pairs);
double bootstrap_standard_error(std::span<const MeasurePair> pairs, std::size_t resamples, std::uint64_t seed);

struct CovarianceResult {
    std::size_t trials = 0;
    double sample_cov = 0.0;
    double standard_error = 0.0;
    double mean_diversity = 0.0;
    double mean_redundancy = 0.0;
};

inline constexpr std::size_t kMinTrials = 100;

// Throws OrthogonalityViolated (when required) and InvalidPlan for
// num_trials < kMinTrials.
CovarianceResult covariance_experiment(const LemmaTrial& trial, std::size_t num_trials);

}  // namespace vtprune::theory
