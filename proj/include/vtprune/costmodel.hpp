// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vtprune {

// Transformer stack dimensions for one inference stage.
struct StageConfig {
    std::uint64_t layers = 1;      // T
    std::uint64_t hidden = 1;      // d
    std::uint64_t ffn = 1;         // m
    std::uint64_t input_len = 1;   // n
    std::uint64_t output_len = 0;  // L, decoding only

    // Throws InvalidPlan if T, d, m or n is zero.
    void validate() const;
    bool operator==(const StageConfig&) const = default;
};

// T (4 n d^2 + 2 n^2 d + 2 n d m). Throws Overflow past 64 bits.
std::uint64_t flops_prefill_exact(const StageConfig& cfg);
// T (4 L d^2 + 2 L d m + d L (2n + L - 1)); zero when L == 0.
std::uint64_t flops_decode_exact(const StageConfig& cfg);

double flops_prefill(const StageConfig& cfg);
double flops_decode(const StageConfig& cfg);

struct ModelPreset {
    std::string name;
    StageConfig encoder;  // input_len = tokens per encoder pass
    StageConfig llm;      // input_len / output_len filled per query
    std::uint64_t encoder_passes = 1;
};

// Built-in presets: "llava-next-7b", "llava-next-13b".
std::span<const ModelPreset> model_presets() noexcept;
// Throws Usage naming the known presets when `name` is unknown.
const ModelPreset& find_preset(std::string_view name);

// Token counts after pruning, used for savings.
struct PruningEffect {
    std::uint64_t reduced_input = 0;             // L + k + N
    std::optional<std::uint64_t> drop_layer;     // all visual tokens gone after this layer
    std::uint64_t text_only_input = 0;           // L + N
};

struct FlopsSavings {
    std::uint64_t full_input = 0;
    std::uint64_t reduced_input = 0;
    double reduced_prefilling = 0.0;
    // 1 - prefill(reduced) / prefill(full).
    double fraction = 0.0;
    std::optional<std::uint64_t> drop_layer;
    double staged_prefilling = 0.0;
    double staged_fraction = 0.0;

    bool operator==(const FlopsSavings&) const = default;
};

struct FlopsReport {
    double encoding = 0.0;
    double prefilling = 0.0;
    double decoding = 0.0;
    // Normalized to encoding = 1.
    double prefill_ratio = 0.0;
    double decode_ratio = 0.0;
    std::optional<FlopsSavings> savings;

    bool operator==(const FlopsReport&) const = default;
};

FlopsReport stage_ratio_report(const StageConfig& encoder, const StageConfig& llm, std::uint64_t encoder_passes = 1,
                               const std::optional<PruningEffect>& pruning = std::nullopt);

}  // namespace vtprune
