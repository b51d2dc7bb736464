// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vtprune {

using Vector = std::vector<float>;

// Norms at or below this are treated as zero vectors.
inline constexpr double kDegenerateNorm = 1e-12;

// Dense row-major n x d matrix of 32-bit values. Used for token embeddings
// and for the projection weights that accompany them.
class TokenMatrix {
public:
    TokenMatrix() = default;
    // Zero-filled. cols must be >= 1.
    TokenMatrix(std::size_t rows, std::size_t cols);
    // Takes ownership of `data`; throws ShapeMismatch on a length mismatch and
    // NonFiniteData on NaN/Inf.
    TokenMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t cols() const noexcept { return m_cols; }
    bool empty() const noexcept { return m_rows == 0; }

    std::span<const float> row(std::size_t i) const noexcept { return {m_data.data() + i * m_cols, m_cols}; }
    std::span<float> row(std::size_t i) noexcept { return {m_data.data() + i * m_cols, m_cols}; }

    float operator()(std::size_t i, std::size_t j) const noexcept { return m_data[i * m_cols + j]; }
    float& operator()(std::size_t i, std::size_t j) noexcept { return m_data[i * m_cols + j]; }

    std::span<const float> data() const noexcept { return m_data; }
    std::span<float> data() noexcept { return m_data; }

    bool operator==(const TokenMatrix&) const = default;

private:
    std::size_t m_rows = 0;
    std::size_t m_cols = 0;
    std::vector<float> m_data;
};

using WeightMatrix = TokenMatrix;

// Throws NonFiniteData naming the first offending flat index.
void require_finite(std::span<const float> values);

double squared_norm(std::span<const float> a);

// Cosine similarity clamped to [-1, 1]. Symmetric bit for bit.
// Throws DimensionMismatch or DegenerateVector.
float cosine_similarity(std::span<const float> a, std::span<const float> b);

// Euclidean norm of every row; throws DegenerateVector naming the row when a
// norm is <= kDegenerateNorm.
std::vector<double> row_norms(const TokenMatrix& m);

// Cosine similarity of every row to row `pivot_index`.
Vector similarity_row(const TokenMatrix& m, std::size_t pivot_index);

// Max-subtracted softmax, evaluated in double.
Vector softmax_row(std::span<const float> scores);

}  // namespace vtprune
