// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vtprune/io/manifest.hpp"
#include "vtprune/io/report.hpp"
#include "vtprune/kcenter.hpp"

namespace vtprune::io {

enum class PipelineMode { Select, Decide, Full };

std::string_view to_string(PipelineMode mode) noexcept;

// Command-line overrides; unset fields fall back to the manifest.
struct PipelineFlags {
    std::optional<double> retain_ratio;
    std::optional<std::size_t> retain_k;
    std::optional<double> tau;
    // Set when --schedule is given; an empty vector means "default".
    std::optional<std::vector<std::size_t>> schedule;
    std::optional<std::size_t> num_layers;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> decode_len;
    SimilarityMode similarity = SimilarityMode::Cosine;
    std::uint64_t seed = 0;
};

// Manifest plan with flag overrides applied and the schedule resolved.
CompressionPlan effective_plan(const ManifestDocument& doc, const PipelineFlags& flags);

// Pivot -> greedy k-center (Select, Full), drop-layer decision (Decide,
// Full; skipped with a warning in Full when the manifest has no trace),
// then FLOPs and savings.
RunReport run_pipeline(const LoadedManifest& manifest, PipelineMode mode, const PipelineFlags& flags);

}  // namespace vtprune::io
