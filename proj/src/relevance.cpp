// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vtprune/error.hpp"
#include "vtprune/kernels.hpp"

namespace vtprune {

namespace {

double range_sum(std::span<const float> row, const IndexRange& cols) {
    if (cols.empty()) {
        return 0.0;
    }
    return kernels::active().sum(row.data() + cols.begin, cols.size());
}

struct PartitionMass {
    double system = 0.0;
    double visual = 0.0;
    double text = 0.0;

    double prompt() const noexcept { return system + visual + text; }
};

PartitionMass query_mass(const TokenMatrix& m, const IndexRange& queries, const SequencePartitions& p) {
    PartitionMass mass;
    for (std::size_t i = queries.begin; i < queries.end; ++i) {
        const auto row = m.row(i);
        mass.system += range_sum(row, p.system);
        mass.visual += range_sum(row, p.visual);
        mass.text += range_sum(row, p.text);
    }
    return mass;
}

}  // namespace

void require_row_stochastic(const TokenMatrix& m, const std::string& what) {
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        const auto neg = std::find_if(row.begin(), row.end(), [](float x) { return x < 0.0f; });
        if (neg != row.end()) {
            throw Error(ErrorKind::RowSumViolation, what + ": row " + std::to_string(i) + " has a negative entry at column " +
                                                        std::to_string(std::distance(row.begin(), neg)));
        }
        const double total = k.sum(row.data(), row.size());
        if (std::abs(total - 1.0) > kRowSumTolerance) {
            throw Error(ErrorKind::RowSumViolation,
                        what + ": row " + std::to_string(i) + " sums to " + std::to_string(total));
        }
    }
}

void AttentionTrace::validate(const SequencePartitions& partitions) const {
    const std::size_t total = partitions.total();
    for (const auto& [layer, m] : prompt) {
        const std::string what = "attention layer " + std::to_string(layer);
        if (m.rows() != total || m.cols() != total) {
            throw Error(ErrorKind::ShapeMismatch, what + " is " + std::to_string(m.rows()) + "x" +
                                                      std::to_string(m.cols()) + ", sequence length is " +
                                                      std::to_string(total));
        }
        require_row_stochastic(m, what);
    }
    for (const auto& [layer, m] : decode) {
        const std::string what = "decode rows of layer " + std::to_string(layer);
        if (m.cols() < total) {
            throw Error(ErrorKind::ShapeMismatch, what + " have " + std::to_string(m.cols()) +
                                                      " key columns, fewer than the " + std::to_string(total) +
                                                      " prompt tokens");
        }
        require_row_stochastic(m, what);
    }
}

CrossModalRatios attention_ratios(const TokenMatrix& attention, const SequencePartitions& partitions) {
    if (partitions.text.empty() || partitions.visual.empty()) {
        throw Error(ErrorKind::EmptyPartition, "cross-modal ratios need non-empty text and visual partitions");
    }
    const std::size_t total = partitions.total();
    if (attention.rows() != total || attention.cols() < total) {
        throw Error(ErrorKind::ShapeMismatch, "attention matrix is " + std::to_string(attention.rows()) + "x" +
                                                  std::to_string(attention.cols()) + ", sequence length is " +
                                                  std::to_string(total));
    }
    const auto from_text = query_mass(attention, partitions.text, partitions);
    const auto from_visual = query_mass(attention, partitions.visual, partitions);
    CrossModalRatios r;
    if (from_text.prompt() > 0.0) {
        r.text_to_visual = from_text.visual / from_text.prompt();
    }
    if (from_visual.prompt() > 0.0) {
        r.visual_to_text = from_visual.text / from_visual.prompt();
    }
    return r;
}

PruneDecision decide_drop_layer(const AttentionTrace& trace, const SequencePartitions& partitions,
                                const CompressionPlan& plan) {
    for (std::size_t layer : plan.schedule) {
        if (!trace.prompt.contains(layer)) {
            throw Error(ErrorKind::MissingLayer, "trace has no attention matrix for scheduled layer " +
                                                     std::to_string(layer));
        }
    }
    PruneDecision decision;
    decision.tau = plan.tau;
    for (std::size_t layer : plan.schedule) {
        const auto ratios = attention_ratios(trace.prompt.at(layer), partitions);
        decision.probed.push_back({layer, ratios});
        if (ratios.text_to_visual < plan.tau && ratios.visual_to_text < plan.tau) {
            decision.drop_layer = layer;
            break;
        }
    }
    return decision;
}

std::vector<DecodeAttention> decoding_attention_report(const AttentionTrace& trace,
                                                       const SequencePartitions& partitions) {
    if (trace.decode.empty()) {
        throw Error(ErrorKind::NoDecodeRows, "trace carries no decode-step query rows");
    }
    std::vector<DecodeAttention> out;
    for (const auto& [layer, rows] : trace.decode) {
        if (rows.rows() == 0) {
            throw Error(ErrorKind::NoDecodeRows, "layer " + std::to_string(layer) + " has an empty decode block");
        }
        if (rows.cols() < partitions.total()) {
            throw Error(ErrorKind::ShapeMismatch, "decode rows of layer " + std::to_string(layer) +
                                                      " are narrower than the prompt");
        }
        const auto mass = query_mass(rows, {0, rows.rows()}, partitions);
        const double n = static_cast<double>(rows.rows());
        out.push_back({layer, rows.rows(), mass.system / n, mass.visual / n, mass.text / n});
    }
    return out;
}

}  // namespace vtprune
