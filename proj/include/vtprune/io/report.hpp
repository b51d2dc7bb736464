// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vtprune/costmodel.hpp"
#include "vtprune/io/canonical_json.hpp"
#include "vtprune/kcenter.hpp"
#include "vtprune/layout.hpp"
#include "vtprune/relevance.hpp"

namespace vtprune::io {

inline constexpr const char* kEngineVersion = "0.1.0";

struct ConfigEcho {
    std::string manifest;
    InputKind kind = InputKind::PlainImage;
    std::size_t visual_count = 0;
    std::optional<std::size_t> retain_k;
    std::optional<double> retain_ratio;
    std::optional<std::size_t> resolved_k;
    double tau = kDefaultTau;
    std::vector<std::size_t> schedule;
    std::string similarity = "cosine";
    std::string preset;
    std::uint64_t decode_len = 0;

    bool operator==(const ConfigEcho&) const = default;
};

struct RunReport {
    std::string engine_version = kEngineVersion;
    std::string command;
    std::uint64_t seed = 0;
    std::string kernel_isa;
    ConfigEcho config;
    std::optional<std::size_t> pivot;
    std::optional<RetentionSet> retention;
    std::optional<PruneDecision> decision;
    std::vector<DecodeAttention> decode_attention;
    std::optional<FlopsReport> flops;
    std::vector<std::string> warnings;

    bool operator==(const RunReport&) const = default;
};

Json to_json(const RunReport& report);
// Throws ParseError.
RunReport report_from_json(const Json& json);

// Canonical JSON text; identical reports give identical bytes.
std::string write_report_json(const RunReport& report);
// One row per probed layer, then decode and summary rows.
std::string write_report_csv(const RunReport& report);

Json to_json(const FlopsReport& flops);

}  // namespace vtprune::io
