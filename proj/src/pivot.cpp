// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/pivot.hpp"

#include <cmath>
#include <string>

#include "vtprune/error.hpp"
#include "vtprune/kernels.hpp"

namespace vtprune {

namespace {

void require_square(const WeightMatrix& w, std::size_t d, const char* name) {
    if (w.rows() != d || w.cols() != d) {
        throw Error(ErrorKind::DimensionMismatch, std::string(name) + " is " + std::to_string(w.rows()) + "x" +
                                                      std::to_string(w.cols()) + ", expected " + std::to_string(d) +
                                                      "x" + std::to_string(d));
    }
}

// q K^T = Z_v (W_K q^T): fold the key projection into a single d-vector so
// the visual rows only need one dot product each.
std::vector<float> key_folded_query(std::span<const float> z_cls, const WeightMatrix& w_q, const WeightMatrix& w_k) {
    const std::size_t d = z_cls.size();
    std::vector<double> q(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        const double zi = z_cls[i];
        const auto wrow = w_q.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            q[j] += zi * static_cast<double>(wrow[j]);
        }
    }
    std::vector<float> u(d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto wrow = w_k.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            acc += static_cast<double>(wrow[j]) * q[j];
        }
        u[i] = static_cast<float>(acc);
    }
    return u;
}

Vector scaled_softmax(const std::vector<double>& dots, double scale) {
    Vector logits(dots.size());
    for (std::size_t i = 0; i < dots.size(); ++i) {
        logits[i] = static_cast<float>(dots[i] * scale);
    }
    return softmax_row(logits);
}

}  // namespace

void ClsAttention::validate() const {
    if (groups == 0 || group_size == 0 || scores.size() != groups * group_size) {
        throw Error(ErrorKind::DimensionMismatch, "CLS attention holds " + std::to_string(scores.size()) +
                                                      " scores for " + std::to_string(groups) + " groups of " +
                                                      std::to_string(group_size));
    }
    require_finite(scores);
    for (std::size_t g = 0; g < groups; ++g) {
        double total = 0.0;
        for (float s : group(g)) {
            if (s < 0.0f) {
                throw Error(ErrorKind::RowSumViolation, "negative CLS attention in group " + std::to_string(g));
            }
            total += s;
        }
        if (std::abs(total - 1.0) > 1e-4) {
            throw Error(ErrorKind::RowSumViolation,
                        "CLS attention group " + std::to_string(g) + " sums to " + std::to_string(total));
        }
    }
}

ClsAttention cls_attention(std::span<const float> z_cls, const TokenMatrix& visual, const WeightMatrix& w_q,
                           const WeightMatrix& w_k) {
    const std::size_t d = z_cls.size();
    if (d == 0 || visual.cols() != d) {
        throw Error(ErrorKind::DimensionMismatch, "CLS vector dim " + std::to_string(d) + " vs visual dim " +
                                                      std::to_string(visual.cols()));
    }
    if (visual.rows() == 0) {
        throw Error(ErrorKind::DimensionMismatch, "no visual tokens");
    }
    require_square(w_q, d, "W_Q");
    require_square(w_k, d, "W_K");
    const auto u = key_folded_query(z_cls, w_q, w_k);
    std::vector<double> dots(visual.rows());
    kernels::active().gemv(visual.data().data(), visual.rows(), d, u.data(), dots.data());
    return {1, visual.rows(), scaled_softmax(dots, 1.0 / std::sqrt(static_cast<double>(d)))};
}

ClsAttention cls_attention_per_frame(const TokenMatrix& cls_per_frame, const TokenMatrix& visual,
                                     const WeightMatrix& w_q, const WeightMatrix& w_k) {
    const std::size_t frames = cls_per_frame.rows();
    const std::size_t d = cls_per_frame.cols();
    if (frames == 0 || visual.rows() % frames != 0 || visual.rows() == 0) {
        throw Error(ErrorKind::DimensionMismatch, std::to_string(visual.rows()) + " visual rows do not split into " +
                                                      std::to_string(frames) + " frames");
    }
    if (visual.cols() != d) {
        throw Error(ErrorKind::DimensionMismatch,
                    "CLS dim " + std::to_string(d) + " vs visual dim " + std::to_string(visual.cols()));
    }
    require_square(w_q, d, "W_Q");
    require_square(w_k, d, "W_K");
    const std::size_t per_frame = visual.rows() / frames;
    ClsAttention out{frames, per_frame, {}};
    out.scores.reserve(visual.rows());
    std::vector<double> dots(per_frame);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t f = 0; f < frames; ++f) {
        const auto u = key_folded_query(cls_per_frame.row(f), w_q, w_k);
        kernels::active().gemv(visual.row(f * per_frame).data(), per_frame, d, u.data(), dots.data());
        const auto probs = scaled_softmax(dots, scale);
        out.scores.insert(out.scores.end(), probs.begin(), probs.end());
    }
    return out;
}

std::size_t select_pivot(const ClsAttention& attention, const InputLayout& layout) {
    const std::size_t total = attention.groups * attention.group_size;
    if (attention.scores.size() != total || total != layout.visual_count) {
        throw Error(ErrorKind::DimensionMismatch, "CLS attention has " + std::to_string(attention.scores.size()) +
                                                      " scores for " + std::to_string(layout.visual_count) +
                                                      " visual tokens");
    }
    IndexRange candidates{0, total};
    switch (layout.kind) {
    case InputKind::PlainImage:
        if (attention.groups != 1) {
            throw Error(ErrorKind::DimensionMismatch, "image CLS attention must be a single row");
        }
        break;
    case InputKind::AnyResImage:
        if (layout.thumbnail.empty()) {
            throw Error(ErrorKind::EmptyThumbnail, "AnyRes layout declares an empty thumbnail range");
        }
        candidates = layout.thumbnail;
        break;
    case InputKind::Video:
        if (attention.groups != layout.frames || attention.group_size != layout.tokens_per_frame) {
            throw Error(ErrorKind::DimensionMismatch, "video CLS attention is " + std::to_string(attention.groups) +
                                                          "x" + std::to_string(attention.group_size) +
                                                          ", layout expects " + std::to_string(layout.frames) + "x" +
                                                          std::to_string(layout.tokens_per_frame));
        }
        break;
    }
    // Frame-major flat order makes the video argmax over (frame, offset)
    // identical to a flat argmax with p = frame * t + offset.
    std::size_t best = candidates.begin;
    for (std::size_t i = candidates.begin + 1; i < candidates.end; ++i) {
        if (attention.scores[i] > attention.scores[best]) {
            best = i;
        }
    }
    return best;
}

}  // namespace vtprune
