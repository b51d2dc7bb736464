// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "vtprune/layout.hpp"
#include "vtprune/tensors.hpp"

namespace vtprune {

// [CLS]-to-visual attention: `groups` softmax rows of `group_size` entries.
// Images use a single group; videos use one group per frame.
struct ClsAttention {
    std::size_t groups = 1;
    std::size_t group_size = 0;
    Vector scores;

    std::span<const float> group(std::size_t g) const noexcept {
        return {scores.data() + g * group_size, group_size};
    }

    // Throws DimensionMismatch / RowSumViolation / NonFiniteData.
    void validate() const;
};

// Single-query attention softmax(q K^T / sqrt(d)) with q = z_cls W_Q,
// K = Z_v W_K. W_Q and W_K are d x d.
ClsAttention cls_attention(std::span<const float> z_cls, const TokenMatrix& visual, const WeightMatrix& w_q,
                           const WeightMatrix& w_k);

// Video variant: one [CLS] row per frame, each frame normalized separately
// over its own tokens_per_frame visual rows.
ClsAttention cls_attention_per_frame(const TokenMatrix& cls_per_frame, const TokenMatrix& visual,
                                     const WeightMatrix& w_q, const WeightMatrix& w_k);

// Pivot token (index into the visual tokens). Plain images take the global
// argmax, AnyRes images the argmax over the thumbnail, videos the best
// frame-wise maximum p = frame * tokens_per_frame + offset. Ties go to the
// lowest index.
std::size_t select_pivot(const ClsAttention& attention, const InputLayout& layout);

}  // namespace vtprune
