// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vtprune/tensors.hpp"

namespace vtprune {

enum class SimilarityMode {
    Cosine,  // normalized similarity
    RawDot,  // unnormalized V V_c^T update, for fidelity experiments
};

struct SelectionStep {
    std::size_t index = 0;
    // Max similarity of `index` to the retention set just before it joined.
    float max_similarity = 0.0f;

    bool operator==(const SelectionStep&) const = default;
};

struct RetentionSet {
    // indices[0] is the pivot; the rest follow in selection order.
    std::vector<std::size_t> indices;
    // One entry per expansion step (indices[1..]).
    std::vector<SelectionStep> trace;

    bool operator==(const RetentionSet&) const = default;
};

struct KCenterOptions {
    SimilarityMode similarity = SimilarityMode::Cosine;
};

// Greedy k-center expansion from `pivot`: each step adds the unselected token
// whose maximum similarity to the current set is smallest (lowest index on
// ties). Keeps one running max-similarity vector, O(n k d) time.
RetentionSet greedy_kcenter(const TokenMatrix& tokens, std::size_t pivot, std::size_t k,
                            const KCenterOptions& options = {});

inline constexpr std::size_t kOracleMaxTokens = 512;

// Same contract as greedy_kcenter, recomputing every candidate's max
// similarity against every selected token at each step.
RetentionSet oracle_greedy(const TokenMatrix& tokens, std::size_t pivot, std::size_t k,
                           const KCenterOptions& options = {});

// Chordal distance between the unit-normalized rows i and j.
double chordal_distance(const TokenMatrix& tokens, std::size_t i, std::size_t j);

// Largest chordal distance from any token to its nearest center.
double covering_radius(const TokenMatrix& tokens, std::span<const std::size_t> centers);

inline constexpr std::size_t kExhaustiveMaxTokens = 12;
inline constexpr std::size_t kExhaustiveMaxK = 5;

// Minimum covering radius over all k-subsets (exhaustive; n <= 12, k <= 5).
double optimal_kcenter_radius(const TokenMatrix& tokens, std::size_t k);

}  // namespace vtprune
