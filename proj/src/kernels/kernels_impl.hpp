// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace vtprune::kernels {

namespace scalar {
double dot(const float* a, const float* b, std::size_t n) noexcept;
double sum(const float* a, std::size_t n) noexcept;
void gemv(const float* matrix, std::size_t rows, std::size_t cols, const float* v, double* out) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const float* a, const float* b, std::size_t n) noexcept;
double sum(const float* a, std::size_t n) noexcept;
void gemv(const float* matrix, std::size_t rows, std::size_t cols, const float* v, double* out) noexcept;
}  // namespace avx2

namespace neon {
double dot(const float* a, const float* b, std::size_t n) noexcept;
double sum(const float* a, std::size_t n) noexcept;
void gemv(const float* matrix, std::size_t rows, std::size_t cols, const float* v, double* out) noexcept;
}  // namespace neon

}  // namespace vtprune::kernels
