// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/io/pipeline.hpp"

#include "vtprune/costmodel.hpp"
#include "vtprune/error.hpp"
#include "vtprune/kernels.hpp"
#include "vtprune/pivot.hpp"

namespace vtprune::io {

namespace {

std::size_t layer_count(const ManifestDocument& doc, const PipelineFlags& flags) {
    if (flags.num_layers) {
        return *flags.num_layers;
    }
    if (doc.num_layers) {
        return *doc.num_layers;
    }
    return find_preset(flags.preset.value_or(doc.cost.preset)).llm.layers;
}

ClsAttention stage1_attention(const LoadedManifest& m) {
    const auto& layout = m.document.layout;
    if (m.cls_attention) {
        ClsAttention a;
        a.groups = layout.kind == InputKind::Video ? layout.frames : 1;
        a.group_size = layout.visual_count / a.groups;
        a.scores.assign(m.cls_attention->data().begin(), m.cls_attention->data().end());
        a.validate();
        return a;
    }
    if (!m.cls_vector || !m.wq || !m.wk) {
        throw Error(ErrorKind::MissingInput,
                    "pivot selection needs either a cls_attention entry or cls_vector, wq and wk entries");
    }
    const TokenMatrix& keys = m.encoder_tokens ? *m.encoder_tokens : *m.visual_embeddings;
    if (layout.kind == InputKind::Video && m.cls_vector->rows() == layout.frames) {
        return cls_attention_per_frame(*m.cls_vector, keys, *m.wq, *m.wk);
    }
    if (layout.kind == InputKind::Video) {
        // One shared [CLS] query, still normalized per frame.
        TokenMatrix per_frame(layout.frames, m.cls_vector->cols());
        for (std::size_t f = 0; f < layout.frames; ++f) {
            std::copy(m.cls_vector->row(0).begin(), m.cls_vector->row(0).end(), per_frame.row(f).begin());
        }
        return cls_attention_per_frame(per_frame, keys, *m.wq, *m.wk);
    }
    return cls_attention(m.cls_vector->row(0), keys, *m.wq, *m.wk);
}

}  // namespace

std::string_view to_string(PipelineMode mode) noexcept {
    switch (mode) {
    case PipelineMode::Select: return "select";
    case PipelineMode::Decide: return "decide";
    case PipelineMode::Full: return "pipeline";
    }
    return "unknown";
}

CompressionPlan effective_plan(const ManifestDocument& doc, const PipelineFlags& flags) {
    if (flags.retain_ratio && flags.retain_k) {
        throw Error(ErrorKind::Usage, "--ratio and --k are mutually exclusive");
    }
    CompressionPlan plan = doc.plan;
    if (flags.retain_ratio) {
        plan.retain_ratio = flags.retain_ratio;
        plan.retain_k.reset();
    }
    if (flags.retain_k) {
        plan.retain_k = flags.retain_k;
        plan.retain_ratio.reset();
    }
    if (flags.tau) {
        plan.tau = *flags.tau;
    }
    const std::size_t layers = layer_count(doc, flags);
    bool use_default = doc.default_schedule;
    if (flags.schedule) {
        use_default = flags.schedule->empty();
        if (!use_default) {
            plan.schedule = *flags.schedule;
        }
    }
    if (use_default) {
        plan.schedule = layer_schedule(layers);
    }
    return plan;
}

RunReport run_pipeline(const LoadedManifest& m, PipelineMode mode, const PipelineFlags& flags) {
    const auto& doc = m.document;
    const auto& layout = doc.layout;
    const bool stage1 = mode != PipelineMode::Decide;
    const bool stage2 = mode != PipelineMode::Select;

    CompressionPlan plan = effective_plan(doc, flags);
    const std::size_t layers = layer_count(doc, flags);
    if (stage1) {
        plan.validate(layers);
    } else {
        CompressionPlan probe_only = plan;
        probe_only.retain_k = 1;
        probe_only.retain_ratio.reset();
        probe_only.validate(layers);
    }

    RunReport report;
    report.command = std::string(to_string(mode));
    report.seed = flags.seed;
    report.kernel_isa = std::string(kernels::isa_name(kernels::active().isa));
    report.config.manifest = m.path.filename().string();
    report.config.kind = layout.kind;
    report.config.visual_count = layout.visual_count;
    report.config.retain_k = plan.retain_k;
    report.config.retain_ratio = plan.retain_ratio;
    report.config.tau = plan.tau;
    report.config.schedule = plan.schedule;
    report.config.similarity = flags.similarity == SimilarityMode::Cosine ? "cosine" : "dot";
    report.config.preset = flags.preset.value_or(doc.cost.preset);
    report.config.decode_len = flags.decode_len.value_or(doc.cost.decode_len);

    std::optional<std::size_t> k;
    if (stage1) {
        if (!m.visual_embeddings) {
            throw Error(ErrorKind::MissingInput, "stage 1 needs a visual_embeddings entry");
        }
        k = resolve_k(plan, layout.visual_count);
        report.config.resolved_k = k;
        const auto attention = stage1_attention(m);
        report.pivot = select_pivot(attention, layout);
        report.retention = greedy_kcenter(*m.visual_embeddings, *report.pivot, *k, {flags.similarity});
    }

    if (stage2) {
        const auto& partitions = layout.stage2_partitions();
        if (m.trace.prompt.empty()) {
            if (mode == PipelineMode::Decide) {
                throw Error(ErrorKind::MissingInput, "decide needs attention_layer entries");
            }
            report.warnings.push_back("stage 2 skipped: manifest has no attention trace");
        } else {
            report.decision = decide_drop_layer(m.trace, partitions, plan);
            if (stage1 && layout.trace_sequence && layout.trace_sequence->visual.size() != *k) {
                report.warnings.push_back("trace_sequence holds " +
                                          std::to_string(layout.trace_sequence->visual.size()) +
                                          " visual tokens but stage 1 retained " + std::to_string(*k));
            }
        }
        if (!m.trace.decode.empty()) {
            report.decode_attention = decoding_attention_report(m.trace, partitions);
        }
    }

    const auto& preset = find_preset(report.config.preset);
    StageConfig llm = preset.llm;
    llm.layers = layers;
    llm.input_len = layout.sequence.total();
    llm.output_len = report.config.decode_len;
    if (llm.input_len > 0) {
        std::optional<PruningEffect> pruning;
        if (k) {
            PruningEffect effect;
            effect.reduced_input = layout.sequence.system.size() + *k + layout.sequence.text.size();
            effect.text_only_input = layout.sequence.system.size() + layout.sequence.text.size();
            if (report.decision) {
                effect.drop_layer = report.decision->drop_layer;
            }
            pruning = effect;
        }
        report.flops = stage_ratio_report(preset.encoder, llm, doc.cost.encoder_passes, pruning);
    }
    return report;
}

}  // namespace vtprune::io
