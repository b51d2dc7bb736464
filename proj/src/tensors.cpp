// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/tensors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vtprune/error.hpp"
#include "vtprune/kernels.hpp"

namespace vtprune {

TokenMatrix::TokenMatrix(std::size_t rows, std::size_t cols) : m_rows(rows), m_cols(cols), m_data(rows * cols, 0.0f) {
    if (cols == 0) {
        throw Error(ErrorKind::ShapeMismatch, "matrix must have at least one column");
    }
}

TokenMatrix::TokenMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : m_rows(rows), m_cols(cols), m_data(std::move(data)) {
    if (cols == 0) {
        throw Error(ErrorKind::ShapeMismatch, "matrix must have at least one column");
    }
    if (m_data.size() != rows * cols) {
        throw Error(ErrorKind::ShapeMismatch, "matrix data holds " + std::to_string(m_data.size()) +
                                                  " values, expected " + std::to_string(rows) + "x" +
                                                  std::to_string(cols));
    }
    require_finite(m_data);
}

void require_finite(std::span<const float> values) {
    const auto it = std::find_if(values.begin(), values.end(), [](float x) { return !std::isfinite(x); });
    if (it != values.end()) {
        throw Error(ErrorKind::NonFiniteData,
                    "non-finite value at flat index " + std::to_string(std::distance(values.begin(), it)));
    }
}

double squared_norm(std::span<const float> a) { return kernels::active().dot(a.data(), a.data(), a.size()); }

float cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "cosine of vectors with dims " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    const auto& k = kernels::active();
    const double na = std::sqrt(k.dot(a.data(), a.data(), a.size()));
    const double nb = std::sqrt(k.dot(b.data(), b.data(), b.size()));
    if (na <= kDegenerateNorm || nb <= kDegenerateNorm) {
        throw Error(ErrorKind::DegenerateVector, "cosine of a zero-norm vector");
    }
    const double c = k.dot(a.data(), b.data(), a.size()) / (na * nb);
    return static_cast<float>(std::clamp(c, -1.0, 1.0));
}

std::vector<double> row_norms(const TokenMatrix& m) {
    const auto& k = kernels::active();
    std::vector<double> norms(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        norms[i] = std::sqrt(k.dot(r.data(), r.data(), r.size()));
        if (norms[i] <= kDegenerateNorm) {
            throw Error(ErrorKind::DegenerateVector, "row " + std::to_string(i) + " has zero norm");
        }
    }
    return norms;
}

Vector similarity_row(const TokenMatrix& m, std::size_t pivot_index) {
    if (pivot_index >= m.rows()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "pivot " + std::to_string(pivot_index) + " out of range for " + std::to_string(m.rows()) + " rows");
    }
    const auto norms = row_norms(m);
    std::vector<double> dots(m.rows());
    kernels::active().gemv(m.data().data(), m.rows(), m.cols(), m.row(pivot_index).data(), dots.data());
    Vector out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out[i] = static_cast<float>(std::clamp(dots[i] / (norms[i] * norms[pivot_index]), -1.0, 1.0));
    }
    return out;
}

Vector softmax_row(std::span<const float> scores) {
    if (scores.empty()) {
        throw Error(ErrorKind::DimensionMismatch, "softmax of an empty vector");
    }
    require_finite(scores);
    const double peak = *std::max_element(scores.begin(), scores.end());
    std::vector<double> e(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        e[i] = std::exp(static_cast<double>(scores[i]) - peak);
        total += e[i];
    }
    Vector out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = static_cast<float>(e[i] / total);
    }
    return out;
}

}  // namespace vtprune
