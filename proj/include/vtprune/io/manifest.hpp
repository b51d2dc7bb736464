// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vtprune/io/canonical_json.hpp"
#include "vtprune/layout.hpp"
#include "vtprune/relevance.hpp"
#include "vtprune/tensors.hpp"

namespace vtprune::io {

inline constexpr int kManifestFormatVersion = 1;

enum class TensorRole {
    VisualEmbeddings,  // [M, d_llm]  tokens Stage 1 selects from
    ClsVector,         // [d] or [frames, d]
    Wq,                // [d, d]
    Wk,                // [d, d]
    EncoderTokens,     // [M, d]  vision-encoder keys; defaults to VisualEmbeddings
    ClsAttention,      // [M] or [frames, tokens_per_frame], already head-reduced
    AttentionLayer,    // [P, P]  one decoder layer of prompt attention
    DecodeRows,        // [R, K]  output-token query rows, K >= P
};

std::string_view to_string(TensorRole role) noexcept;

struct TensorEntry {
    std::string name;
    TensorRole role = TensorRole::VisualEmbeddings;
    std::string dtype = "f32le";
    std::vector<std::size_t> shape;
    std::string file;
    std::optional<std::size_t> layer;

    std::size_t element_count() const noexcept;
    bool operator==(const TensorEntry&) const = default;
};

struct CostSpec {
    std::string preset = "llava-next-7b";
    std::uint64_t decode_len = 20;
    std::uint64_t encoder_passes = 1;

    bool operator==(const CostSpec&) const = default;
};

struct ManifestDocument {
    int format_version = kManifestFormatVersion;
    std::vector<TensorEntry> entries;
    InputLayout layout;
    // retain_k / retain_ratio may both be unset here and supplied by flags.
    CompressionPlan plan;
    bool default_schedule = true;
    std::optional<std::size_t> num_layers;
    CostSpec cost;

    bool operator==(const ManifestDocument&) const = default;
};

Json to_json(const ManifestDocument& doc);
// Throws ParseError naming the offending key or entry.
ManifestDocument manifest_from_json(const Json& json);

Json to_json(const InputLayout& layout);
InputLayout layout_from_json(const Json& json);

struct LoadedManifest {
    std::filesystem::path path;
    ManifestDocument document;

    std::optional<TokenMatrix> visual_embeddings;
    std::optional<TokenMatrix> encoder_tokens;
    std::optional<TokenMatrix> cls_vector;  // one row per [CLS] query
    std::optional<TokenMatrix> wq;
    std::optional<TokenMatrix> wk;
    std::optional<TokenMatrix> cls_attention;
    AttentionTrace trace;
};

// Parses, checks every entry's shape against its role and the layout, reads
// the payloads, and validates finiteness and row-stochastic attention.
// Throws ParseError, ShapeMismatch, NonFiniteData, RowSumViolation or
// InvalidLayout, each naming the entry.
LoadedManifest load_manifest(const std::filesystem::path& path);

// Raw little-endian float32, row-major, no header.
std::vector<float> read_tensor_file(const std::filesystem::path& path, std::size_t expected_count,
                                    const std::string& entry_name);
void write_tensor_file(const std::filesystem::path& path, std::span<const float> values);

void save_manifest(const std::filesystem::path& path, const ManifestDocument& doc);

}  // namespace vtprune::io
