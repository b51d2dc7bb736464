// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/io/fixture.hpp"

#include <cmath>
#include <random>

#include "vtprune/error.hpp"

namespace vtprune::io {

namespace {

void spread(std::span<float> row, const IndexRange& cols, double mass) {
    if (cols.empty()) {
        return;
    }
    const auto share = static_cast<float>(mass / static_cast<double>(cols.size()));
    for (std::size_t j = cols.begin; j < cols.end; ++j) {
        row[j] += share;
    }
}

std::vector<float> gaussian(std::size_t count, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<float> out(count);
    for (auto& x : out) {
        x = static_cast<float>(normal(rng));
    }
    return out;
}

}  // namespace

TokenMatrix block_attention(const SequencePartitions& p, double cross, double system_share) {
    const std::size_t total = p.total();
    TokenMatrix m(total, total);
    const double sys = p.system.empty() ? 0.0 : system_share;
    for (std::size_t i = 0; i < total; ++i) {
        auto row = m.row(i);
        if (p.system.contains(i)) {
            spread(row, p.system, 1.0);
        } else if (p.text.contains(i)) {
            const double to_visual = p.visual.empty() ? 0.0 : cross;
            spread(row, p.system, sys);
            spread(row, p.visual, to_visual);
            spread(row, p.text, 1.0 - sys - to_visual);
        } else {
            const double to_text = p.text.empty() ? 0.0 : cross;
            spread(row, p.system, sys);
            spread(row, p.text, to_text);
            spread(row, p.visual, 1.0 - sys - to_text);
        }
    }
    return m;
}

TokenMatrix block_decode_rows(const SequencePartitions& p, std::size_t rows, std::size_t generated, double to_system,
                              double to_visual, double to_text) {
    if (generated == 0) {
        throw Error(ErrorKind::Internal, "decode rows need at least one generated-token column");
    }
    const std::size_t total = p.total();
    TokenMatrix m(rows, total + generated);
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = m.row(r);
        spread(row, p.system, to_system);
        spread(row, p.visual, to_visual);
        spread(row, p.text, to_text);
        spread(row, {total, total + generated}, 1.0 - to_system - to_visual - to_text);
    }
    return m;
}

std::filesystem::path write_fixture(const std::filesystem::path& dir, const FixtureOptions& o) {
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(o.seed);

    ManifestDocument doc;
    switch (o.kind) {
    case InputKind::PlainImage: doc.layout = InputLayout::plain_image(o.system_len, o.visual_count, o.text_len); break;
    case InputKind::AnyResImage: {
        const std::size_t tile = o.visual_count / (o.crops + 1);
        if (tile == 0 || tile * (o.crops + 1) != o.visual_count) {
            throw Error(ErrorKind::InvalidLayout, "visual_count must split evenly into thumbnail + crops");
        }
        std::vector<IndexRange> crops;
        for (std::size_t c = 1; c <= o.crops; ++c) {
            crops.push_back({c * tile, (c + 1) * tile});
        }
        doc.layout = InputLayout::anyres_image(o.system_len, {0, tile}, std::move(crops), o.text_len);
        break;
    }
    case InputKind::Video:
        if (o.frames == 0 || o.visual_count % o.frames != 0) {
            throw Error(ErrorKind::InvalidLayout, "visual_count must split evenly into frames");
        }
        doc.layout = InputLayout::video(o.system_len, o.frames, o.visual_count / o.frames, o.text_len);
        break;
    }
    doc.plan.retain_ratio = o.retain_ratio;
    doc.num_layers = o.num_layers;
    doc.layout.validate();

    auto add = [&](const std::string& name, TensorRole role, std::vector<std::size_t> shape, std::span<const float> v,
                   std::optional<std::size_t> layer = std::nullopt) {
        const std::string file = name + ".f32";
        write_tensor_file(dir / file, v);
        doc.entries.push_back({name, role, "f32le", std::move(shape), file, layer});
    };

    const auto embeddings = gaussian(o.visual_count * o.embed_dim, 1.0, rng);
    add("visual_embeddings", TensorRole::VisualEmbeddings, {o.visual_count, o.embed_dim}, embeddings);
    const auto encoder = gaussian(o.visual_count * o.encoder_dim, 1.0, rng);
    add("encoder_tokens", TensorRole::EncoderTokens, {o.visual_count, o.encoder_dim}, encoder);
    const std::size_t cls_rows = o.kind == InputKind::Video ? o.frames : 1;
    const auto cls = gaussian(cls_rows * o.encoder_dim, 1.0, rng);
    if (o.kind == InputKind::Video) {
        add("cls_vector", TensorRole::ClsVector, {cls_rows, o.encoder_dim}, cls);
    } else {
        add("cls_vector", TensorRole::ClsVector, {o.encoder_dim}, cls);
    }
    const double w_scale = 1.0 / std::sqrt(static_cast<double>(o.encoder_dim));
    const auto wq = gaussian(o.encoder_dim * o.encoder_dim, w_scale, rng);
    add("wq", TensorRole::Wq, {o.encoder_dim, o.encoder_dim}, wq);
    const auto wk = gaussian(o.encoder_dim * o.encoder_dim, w_scale, rng);
    add("wk", TensorRole::Wk, {o.encoder_dim, o.encoder_dim}, wk);

    if (o.with_trace) {
        // Traces are taken after Stage 1, over the retained visual tokens.
        CompressionPlan plan;
        plan.retain_ratio = o.retain_ratio;
        const std::size_t k = resolve_k(plan, o.visual_count);
        const auto partitions = SequencePartitions::contiguous(o.system_len, k, o.text_len);
        doc.layout.trace_sequence = partitions;
        const auto schedule = layer_schedule(o.num_layers);
        for (std::size_t i = 0; i < schedule.size(); ++i) {
            const double cross = o.cross_modal.at(std::min(i, o.cross_modal.size() - 1));
            const auto attn = block_attention(partitions, cross, 0.3);
            const std::string name = "attention_layer_" + std::to_string(schedule[i]);
            add(name, TensorRole::AttentionLayer, {attn.rows(), attn.cols()}, attn.data(), schedule[i]);
            if (o.with_decode) {
                const double visual = o.decode_visual.at(std::min(i, o.decode_visual.size() - 1));
                const auto rows = block_decode_rows(partitions, 4, 3, 0.2, visual, 0.6);
                add("decode_rows_" + std::to_string(schedule[i]), TensorRole::DecodeRows, {rows.rows(), rows.cols()},
                    rows.data(), schedule[i]);
            }
        }
    }
    const auto path = dir / "manifest.json";
    save_manifest(path, doc);
    return path;
}

}  // namespace vtprune::io
