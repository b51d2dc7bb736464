// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace vtprune::kernels::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Dots of `Rows` rows against one vector. The per-row operation order is
// identical for every Rows, so dot() and gemv() agree bit for bit.
template <std::size_t Rows>
inline void dot_rows(const float* const* rows, const float* v, std::size_t n, double* out) noexcept {
    __m256d acc[Rows][4];
    for (std::size_t r = 0; r < Rows; ++r) {
        for (auto& a : acc[r]) {
            a = _mm256_setzero_pd();
        }
    }
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const __m256 v0 = _mm256_loadu_ps(v + i);
        const __m256 v1 = _mm256_loadu_ps(v + i + 8);
        const __m256d vd0 = _mm256_cvtps_pd(_mm256_castps256_ps128(v0));
        const __m256d vd1 = _mm256_cvtps_pd(_mm256_extractf128_ps(v0, 1));
        const __m256d vd2 = _mm256_cvtps_pd(_mm256_castps256_ps128(v1));
        const __m256d vd3 = _mm256_cvtps_pd(_mm256_extractf128_ps(v1, 1));
        for (std::size_t r = 0; r < Rows; ++r) {
            const __m256 a0 = _mm256_loadu_ps(rows[r] + i);
            const __m256 a1 = _mm256_loadu_ps(rows[r] + i + 8);
            acc[r][0] = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(a0)), vd0, acc[r][0]);
            acc[r][1] = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(a0, 1)), vd1, acc[r][1]);
            acc[r][2] = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(a1)), vd2, acc[r][2]);
            acc[r][3] = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(a1, 1)), vd3, acc[r][3]);
        }
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d vd = _mm256_cvtps_pd(_mm_loadu_ps(v + i));
        for (std::size_t r = 0; r < Rows; ++r) {
            acc[r][0] = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm_loadu_ps(rows[r] + i)), vd, acc[r][0]);
        }
    }
    for (std::size_t r = 0; r < Rows; ++r) {
        const __m256d total = _mm256_add_pd(_mm256_add_pd(acc[r][0], acc[r][1]), _mm256_add_pd(acc[r][2], acc[r][3]));
        double s = hsum(total);
        for (std::size_t j = i; j < n; ++j) {
            s += static_cast<double>(rows[r][j]) * static_cast<double>(v[j]);
        }
        out[r] = s;
    }
}

}  // namespace

double dot(const float* a, const float* b, std::size_t n) noexcept {
    double out = 0.0;
    dot_rows<1>(&a, b, n, &out);
    return out;
}

double sum(const float* a, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 x = _mm256_loadu_ps(a + i);
        acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(x)));
        acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(x, 1)));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        s += static_cast<double>(a[i]);
    }
    return s;
}

void gemv(const float* matrix, std::size_t rows, std::size_t cols, const float* v, double* out) noexcept {
    std::size_t r = 0;
    for (; r + 2 <= rows; r += 2) {
        const float* pair[2] = {matrix + r * cols, matrix + (r + 1) * cols};
        dot_rows<2>(pair, v, cols, out + r);
    }
    if (r < rows) {
        const float* last = matrix + r * cols;
        dot_rows<1>(&last, v, cols, out + r);
    }
}

}  // namespace vtprune::kernels::avx2
