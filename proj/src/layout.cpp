// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/layout.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "vtprune/error.hpp"

namespace vtprune {

namespace {

std::string describe(const IndexRange& r) {
    return "[" + std::to_string(r.begin) + ", " + std::to_string(r.end) + ")";
}

void require_well_formed(const IndexRange& r, std::string_view name) {
    if (r.end < r.begin) {
        throw Error(ErrorKind::InvalidLayout, std::string(name) + " range " + describe(r) + " ends before it begins");
    }
}

}  // namespace

void SequencePartitions::validate() const {
    require_well_formed(system, "system");
    require_well_formed(visual, "visual");
    require_well_formed(text, "text");
    std::array<IndexRange, 3> parts{system, visual, text};
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
    std::size_t cursor = 0;
    for (const auto& p : parts) {
        if (p.empty()) {
            continue;
        }
        if (p.begin != cursor) {
            throw Error(ErrorKind::InvalidLayout, "sequence partitions must tile [0, " + std::to_string(total()) +
                                                      ") without gaps or overlap; range " + describe(p) +
                                                      " starts at " + std::to_string(p.begin) + ", expected " +
                                                      std::to_string(cursor));
        }
        cursor = p.end;
    }
}

SequencePartitions SequencePartitions::contiguous(std::size_t system_len, std::size_t visual_len,
                                                  std::size_t text_len) {
    return {{0, system_len}, {system_len, system_len + visual_len},
            {system_len + visual_len, system_len + visual_len + text_len}};
}

std::string_view to_string(InputKind kind) noexcept {
    switch (kind) {
    case InputKind::PlainImage: return "plain_image";
    case InputKind::AnyResImage: return "anyres_image";
    case InputKind::Video: return "video";
    }
    return "unknown";
}

std::optional<InputKind> parse_input_kind(std::string_view name) noexcept {
    if (name == "plain_image") return InputKind::PlainImage;
    if (name == "anyres_image") return InputKind::AnyResImage;
    if (name == "video") return InputKind::Video;
    return std::nullopt;
}

void InputLayout::validate() const {
    sequence.validate();
    if (sequence.visual.size() != visual_count) {
        throw Error(ErrorKind::InvalidLayout, "visual range " + describe(sequence.visual) + " holds " +
                                                  std::to_string(sequence.visual.size()) + " tokens, visual_count is " +
                                                  std::to_string(visual_count));
    }
    if (trace_sequence) {
        trace_sequence->validate();
    }
    switch (kind) {
    case InputKind::PlainImage: break;
    case InputKind::AnyResImage: {
        require_well_formed(thumbnail, "thumbnail");
        std::vector<IndexRange> parts{thumbnail};
        for (const auto& c : crops) {
            require_well_formed(c, "crop");
            parts.push_back(c);
        }
        std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
        std::size_t cursor = 0;
        for (const auto& p : parts) {
            if (p.empty()) {
                continue;
            }
            if (p.begin != cursor) {
                throw Error(ErrorKind::InvalidLayout,
                            "thumbnail and crop ranges must tile the visual tokens; range " + describe(p) +
                                " starts at " + std::to_string(p.begin) + ", expected " + std::to_string(cursor));
            }
            cursor = p.end;
        }
        if (cursor != visual_count) {
            throw Error(ErrorKind::InvalidLayout, "thumbnail and crops cover " + std::to_string(cursor) + " of " +
                                                      std::to_string(visual_count) + " visual tokens");
        }
        break;
    }
    case InputKind::Video:
        if (frames == 0 || tokens_per_frame == 0 || frames * tokens_per_frame != visual_count) {
            throw Error(ErrorKind::InvalidLayout, "video layout needs frames * tokens_per_frame == visual_count, got " +
                                                      std::to_string(frames) + " * " +
                                                      std::to_string(tokens_per_frame) + " vs " +
                                                      std::to_string(visual_count));
        }
        break;
    }
}

InputLayout InputLayout::plain_image(std::size_t system_len, std::size_t visual_len, std::size_t text_len) {
    InputLayout l;
    l.kind = InputKind::PlainImage;
    l.visual_count = visual_len;
    l.sequence = SequencePartitions::contiguous(system_len, visual_len, text_len);
    return l;
}

InputLayout InputLayout::anyres_image(std::size_t system_len, IndexRange thumbnail, std::vector<IndexRange> crops,
                                      std::size_t text_len) {
    InputLayout l;
    l.kind = InputKind::AnyResImage;
    l.thumbnail = thumbnail;
    l.visual_count = thumbnail.size();
    for (const auto& c : crops) {
        l.visual_count += c.size();
    }
    l.crops = std::move(crops);
    l.sequence = SequencePartitions::contiguous(system_len, l.visual_count, text_len);
    return l;
}

InputLayout InputLayout::video(std::size_t system_len, std::size_t frames, std::size_t tokens_per_frame,
                               std::size_t text_len) {
    InputLayout l;
    l.kind = InputKind::Video;
    l.frames = frames;
    l.tokens_per_frame = tokens_per_frame;
    l.visual_count = frames * tokens_per_frame;
    l.sequence = SequencePartitions::contiguous(system_len, l.visual_count, text_len);
    return l;
}

void CompressionPlan::validate(std::optional<std::size_t> num_layers) const {
    if (retain_k.has_value() == retain_ratio.has_value()) {
        throw Error(ErrorKind::InvalidPlan, "exactly one of retain_k and retain_ratio must be set");
    }
    if (retain_k && *retain_k < 1) {
        throw Error(ErrorKind::InvalidPlan, "retain_k must be >= 1");
    }
    if (retain_ratio && !(*retain_ratio > 0.0 && *retain_ratio <= 1.0)) {
        throw Error(ErrorKind::InvalidPlan, "retain_ratio must lie in (0, 1], got " + std::to_string(*retain_ratio));
    }
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw Error(ErrorKind::InvalidPlan, "tau must lie in [0, 1], got " + std::to_string(tau));
    }
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (i > 0 && schedule[i] <= schedule[i - 1]) {
            throw Error(ErrorKind::InvalidPlan, "schedule must be strictly increasing");
        }
        if (num_layers && schedule[i] >= *num_layers) {
            throw Error(ErrorKind::InvalidPlan, "schedule layer " + std::to_string(schedule[i]) + " >= layer count " +
                                                    std::to_string(*num_layers));
        }
    }
}

std::size_t resolve_k(const CompressionPlan& plan, std::size_t visual_count) {
    if (plan.retain_k.has_value() == plan.retain_ratio.has_value()) {
        throw Error(ErrorKind::InvalidPlan, "exactly one of retain_k and retain_ratio must be set");
    }
    if (visual_count == 0) {
        throw Error(ErrorKind::InvalidPlan, "no visual tokens to retain from");
    }
    if (plan.retain_k) {
        if (*plan.retain_k == 0) {
            throw Error(ErrorKind::InvalidPlan, "retain_k must be >= 1");
        }
        return std::min(*plan.retain_k, visual_count);
    }
    const double ratio = *plan.retain_ratio;
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw Error(ErrorKind::InvalidPlan, "retain_ratio must lie in (0, 1], got " + std::to_string(ratio));
    }
    const auto rounded = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(visual_count) + 0.5));
    return std::clamp<std::size_t>(rounded, 1, visual_count);
}

std::vector<std::size_t> layer_schedule(std::size_t num_layers) {
    if (num_layers < 8) {
        throw Error(ErrorKind::TooShallow,
                    "layer schedule needs at least 8 decoder layers, got " + std::to_string(num_layers));
    }
    std::vector<std::size_t> out;
    for (std::size_t eighths : {4u, 5u, 6u, 7u}) {
        const std::size_t layer = eighths * num_layers / 8;
        if (out.empty() || out.back() != layer) {
            out.push_back(layer);
        }
    }
    return out;
}

}  // namespace vtprune
