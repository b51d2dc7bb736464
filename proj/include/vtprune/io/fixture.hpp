// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vtprune/io/manifest.hpp"

namespace vtprune::io {

// Synthetic but structurally faithful manifest: Gaussian embeddings, random
// CLS projections, and block-structured attention whose cross-modal share
// decays with depth.
struct FixtureOptions {
    InputKind kind = InputKind::AnyResImage;
    std::size_t visual_count = 2880;
    std::size_t crops = 4;               // AnyRes: thumbnail + crops of equal size
    std::size_t frames = 8;              // Video
    std::size_t embed_dim = 4096;
    std::size_t encoder_dim = 64;
    std::size_t system_len = 35;
    std::size_t text_len = 40;
    double retain_ratio = 0.10;
    std::size_t num_layers = 32;
    // Cross-modal share at each default-schedule layer.
    std::vector<double> cross_modal = {0.08, 0.02, 0.01, 0.005};
    // Decode-row attention to visual tokens at each default-schedule layer.
    std::vector<double> decode_visual = {0.10, 0.04, 0.02, 0.01};
    bool with_trace = true;
    bool with_decode = true;
    std::uint64_t seed = 0;
};

// Writes manifest.json plus payloads into `dir` (created if needed) and
// returns the manifest path.
std::filesystem::path write_fixture(const std::filesystem::path& dir, const FixtureOptions& options);

// Row-stochastic P x P matrix with uniform mass inside each partition: text
// and visual queries put `cross` on the other modality and `system_share` on
// the system prompt; system queries stay within S.
TokenMatrix block_attention(const SequencePartitions& p, double cross, double system_share);

// R x (P + generated) decode rows with the given per-partition shares; the
// remainder goes to `generated` trailing key columns.
TokenMatrix block_decode_rows(const SequencePartitions& p, std::size_t rows, std::size_t generated, double to_system,
                              double to_visual, double to_text);

}  // namespace vtprune::io
