// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace vtprune {

// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
    bool empty() const noexcept { return end <= begin; }
    bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
    bool operator==(const IndexRange&) const = default;
};

// System / visual / text partitions of an LLM input sequence. The three
// ranges may appear in any order but must tile [0, total()) exactly.
struct SequencePartitions {
    IndexRange system;
    IndexRange visual;
    IndexRange text;

    std::size_t total() const noexcept { return system.size() + visual.size() + text.size(); }
    void validate() const;
    bool operator==(const SequencePartitions&) const = default;

    // Ordered S, V, T with the given lengths.
    static SequencePartitions contiguous(std::size_t system_len, std::size_t visual_len, std::size_t text_len);
};

enum class InputKind { PlainImage, AnyResImage, Video };

std::string_view to_string(InputKind kind) noexcept;
std::optional<InputKind> parse_input_kind(std::string_view name) noexcept;

struct InputLayout {
    InputKind kind = InputKind::PlainImage;
    std::size_t visual_count = 0;

    // AnyResImage: ranges over visual-token indices [0, visual_count).
    IndexRange thumbnail;
    std::vector<IndexRange> crops;

    // Video.
    std::size_t frames = 0;
    std::size_t tokens_per_frame = 0;

    SequencePartitions sequence;
    // Partitions of the sequence the attention traces were recorded on, when
    // that differs from `sequence` (e.g. traces taken after Stage 1).
    std::optional<SequencePartitions> trace_sequence;

    // Throws InvalidLayout describing the first violated invariant.
    void validate() const;

    const SequencePartitions& stage2_partitions() const noexcept {
        return trace_sequence ? *trace_sequence : sequence;
    }

    bool operator==(const InputLayout&) const = default;

    static InputLayout plain_image(std::size_t system_len, std::size_t visual_len, std::size_t text_len);
    static InputLayout anyres_image(std::size_t system_len, IndexRange thumbnail, std::vector<IndexRange> crops,
                                    std::size_t text_len);
    static InputLayout video(std::size_t system_len, std::size_t frames, std::size_t tokens_per_frame,
                             std::size_t text_len);
};

inline constexpr double kDefaultTau = 0.03;

struct CompressionPlan {
    std::optional<std::size_t> retain_k;
    std::optional<double> retain_ratio;
    double tau = kDefaultTau;
    // Decoder layers probed by Stage 2 (0-based, strictly increasing).
    std::vector<std::size_t> schedule;

    // Throws InvalidPlan. num_layers bounds the schedule when given.
    void validate(std::optional<std::size_t> num_layers = std::nullopt) const;
    bool operator==(const CompressionPlan&) const = default;
};

// Number of tokens to retain out of `visual_count`; always in [1, visual_count].
std::size_t resolve_k(const CompressionPlan& plan, std::size_t visual_count);

// Probe layers at depths L/2, 5L/8, 6L/8, 7L/8 (floored, deduplicated).
std::vector<std::size_t> layer_schedule(std::size_t num_layers);

}  // namespace vtprune
