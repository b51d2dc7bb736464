// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

namespace vtprune::kernels::scalar {

double dot(const float* a, const float* b, std::size_t n) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

double sum(const float* a, std::size_t n) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]);
    }
    return acc;
}

void gemv(const float* matrix, std::size_t rows, std::size_t cols, const float* v, double* out) noexcept {
    for (std::size_t r = 0; r < rows; ++r) {
        out[r] = dot(matrix + r * cols, v, cols);
    }
}

}  // namespace vtprune::kernels::scalar
