// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "vtprune/layout.hpp"
#include "vtprune/tensors.hpp"

namespace vtprune {

inline constexpr double kRowSumTolerance = 1e-4;

// Head-averaged attention per decoder layer. Prompt matrices are P x P with
// P = partitions.total(); decode rows are R x K with K >= P, the columns past
// P being keys of previously generated tokens. Masked entries are stored as 0.
struct AttentionTrace {
    std::map<std::size_t, TokenMatrix> prompt;
    std::map<std::size_t, TokenMatrix> decode;

    // Shape plus row-stochastic checks; throws ShapeMismatch / RowSumViolation.
    void validate(const SequencePartitions& partitions) const;
};

// Every row must be non-negative and sum to 1 within kRowSumTolerance.
// Throws RowSumViolation naming `what` and the row.
void require_row_stochastic(const TokenMatrix& m, const std::string& what);

struct CrossModalRatios {
    double text_to_visual = 0.0;
    double visual_to_text = 0.0;

    bool operator==(const CrossModalRatios&) const = default;
};

// Share of text-query attention landing on visual keys and of visual-query
// attention landing on text keys, over prompt keys S u V u T.
CrossModalRatios attention_ratios(const TokenMatrix& attention, const SequencePartitions& partitions);

struct LayerProbe {
    std::size_t layer = 0;
    CrossModalRatios ratios;

    bool operator==(const LayerProbe&) const = default;
};

struct PruneDecision {
    std::optional<std::size_t> drop_layer;
    std::vector<LayerProbe> probed;
    double tau = kDefaultTau;

    bool operator==(const PruneDecision&) const = default;
};

// Probes plan.schedule in order and stops at the first layer where both
// ratios are below plan.tau. Throws MissingLayer if any scheduled layer has
// no prompt matrix.
PruneDecision decide_drop_layer(const AttentionTrace& trace, const SequencePartitions& partitions,
                                const CompressionPlan& plan);

struct DecodeAttention {
    std::size_t layer = 0;
    std::size_t rows = 0;
    double to_system = 0.0;
    double to_visual = 0.0;
    double to_text = 0.0;

    // Mass on previously generated tokens.
    double to_generated() const noexcept { return 1.0 - to_system - to_visual - to_text; }
    bool operator==(const DecodeAttention&) const = default;
};

// Mean per-row attention fractions of output-token queries, per layer.
// Throws NoDecodeRows when the trace has none.
std::vector<DecodeAttention> decoding_attention_report(const AttentionTrace& trace,
                                                       const SequencePartitions& partitions);

}  // namespace vtprune
