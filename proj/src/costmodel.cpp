// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/costmodel.hpp"

#include <array>
#include <string>

#include "vtprune/error.hpp"

namespace vtprune {

namespace {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw Error(ErrorKind::Overflow, "FLOPs count exceeds 64 bits");
    }
    return out;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw Error(ErrorKind::Overflow, "FLOPs count exceeds 64 bits");
    }
    return out;
}

// Vision encoder: CLIP ViT-L/14 at 336 px (576 patches + [CLS]).
constexpr StageConfig kClipVitL336{24, 1024, 4096, 577, 0};

const std::array<ModelPreset, 2> kPresets{{
    {"llava-next-7b", kClipVitL336, {32, 4096, 11008, 3000, 20}, 1},
    {"llava-next-13b", kClipVitL336, {40, 5120, 13824, 3000, 20}, 1},
}};

}  // namespace

void StageConfig::validate() const {
    if (layers == 0 || hidden == 0 || ffn == 0 || input_len == 0) {
        throw Error(ErrorKind::InvalidPlan, "stage config needs layers, hidden, ffn and input length >= 1");
    }
}

std::uint64_t flops_prefill_exact(const StageConfig& cfg) {
    cfg.validate();
    const auto n = cfg.input_len;
    const auto d = cfg.hidden;
    const auto m = cfg.ffn;
    const auto per_layer = add(add(mul(4, mul(n, mul(d, d))), mul(2, mul(mul(n, n), d))), mul(2, mul(mul(n, d), m)));
    return mul(cfg.layers, per_layer);
}

std::uint64_t flops_decode_exact(const StageConfig& cfg) {
    cfg.validate();
    const auto steps = cfg.output_len;
    if (steps == 0) {
        return 0;
    }
    const auto n = cfg.input_len;
    const auto d = cfg.hidden;
    const auto m = cfg.ffn;
    const auto attention = mul(mul(d, steps), add(mul(2, n), steps - 1));
    const auto per_layer = add(add(mul(4, mul(steps, mul(d, d))), mul(2, mul(mul(steps, d), m))), attention);
    return mul(cfg.layers, per_layer);
}

double flops_prefill(const StageConfig& cfg) { return static_cast<double>(flops_prefill_exact(cfg)); }

double flops_decode(const StageConfig& cfg) { return static_cast<double>(flops_decode_exact(cfg)); }

std::span<const ModelPreset> model_presets() noexcept { return kPresets; }

const ModelPreset& find_preset(std::string_view name) {
    for (const auto& p : kPresets) {
        if (p.name == name) {
            return p;
        }
    }
    std::string known;
    for (const auto& p : kPresets) {
        known += (known.empty() ? "" : ", ") + p.name;
    }
    throw Error(ErrorKind::Usage, "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

FlopsReport stage_ratio_report(const StageConfig& encoder, const StageConfig& llm, std::uint64_t encoder_passes,
                               const std::optional<PruningEffect>& pruning) {
    if (encoder_passes == 0) {
        throw Error(ErrorKind::InvalidPlan, "encoder_passes must be >= 1");
    }
    FlopsReport r;
    r.encoding = static_cast<double>(mul(encoder_passes, flops_prefill_exact(encoder)));
    r.prefilling = flops_prefill(llm);
    r.decoding = flops_decode(llm);
    r.prefill_ratio = r.prefilling / r.encoding;
    r.decode_ratio = r.decoding / r.encoding;
    if (pruning) {
        if (pruning->reduced_input == 0 || pruning->reduced_input > llm.input_len) {
            throw Error(ErrorKind::InvalidPlan, "reduced input length must lie in [1, " +
                                                    std::to_string(llm.input_len) + "]");
        }
        FlopsSavings s;
        s.full_input = llm.input_len;
        s.reduced_input = pruning->reduced_input;
        StageConfig reduced = llm;
        reduced.input_len = pruning->reduced_input;
        s.reduced_prefilling = flops_prefill(reduced);
        s.fraction = 1.0 - s.reduced_prefilling / r.prefilling;
        s.drop_layer = pruning->drop_layer;
        s.staged_prefilling = s.reduced_prefilling;
        if (pruning->drop_layer && *pruning->drop_layer + 1 < llm.layers && pruning->text_only_input > 0) {
            StageConfig head = reduced;
            head.layers = *pruning->drop_layer + 1;
            StageConfig tail = llm;
            tail.layers = llm.layers - head.layers;
            tail.input_len = pruning->text_only_input;
            s.staged_prefilling = flops_prefill(head) + flops_prefill(tail);
        }
        s.staged_fraction = 1.0 - s.staged_prefilling / r.prefilling;
        r.savings = s;
    }
    return r;
}

}  // namespace vtprune
