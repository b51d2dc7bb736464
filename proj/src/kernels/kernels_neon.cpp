// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace vtprune::kernels::neon {

double dot(const float* a, const float* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t x = vld1q_f32(a + i);
        const float32x4_t y = vld1q_f32(b + i);
        acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(x)), vcvt_f64_f32(vget_low_f32(y)));
        acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(x), vcvt_high_f64_f32(y));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return s;
}

double sum(const float* a, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t x = vld1q_f32(a + i);
        acc0 = vaddq_f64(acc0, vcvt_f64_f32(vget_low_f32(x)));
        acc1 = vaddq_f64(acc1, vcvt_high_f64_f32(x));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        s += static_cast<double>(a[i]);
    }
    return s;
}

void gemv(const float* matrix, std::size_t rows, std::size_t cols, const float* v, double* out) noexcept {
    for (std::size_t r = 0; r < rows; ++r) {
        out[r] = dot(matrix + r * cols, v, cols);
    }
}

}  // namespace vtprune::kernels::neon
