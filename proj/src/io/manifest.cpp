// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/io/manifest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "vtprune/error.hpp"

namespace vtprune::io {

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::ParseError, where + ": " + what);
}

void allow_keys(const Json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) {
        parse_error(where, "expected an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            parse_error(where, "unknown key '" + key + "'");
        }
    }
}

const Json& require(const Json& obj, const std::string& where, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        parse_error(where, std::string("missing key '") + key + "'");
    }
    return *it;
}

std::size_t as_count(const Json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        parse_error(where, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

double as_real(const Json& v, const std::string& where) {
    if (!v.is_number()) {
        parse_error(where, "expected a number");
    }
    return v.get<double>();
}

std::string as_string(const Json& v, const std::string& where) {
    if (!v.is_string()) {
        parse_error(where, "expected a string");
    }
    return v.get<std::string>();
}

Json range_json(const IndexRange& r) { return Json::array({r.begin, r.end}); }

IndexRange range_from(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) {
        parse_error(where, "expected [begin, end]");
    }
    IndexRange r{as_count(v[0], where), as_count(v[1], where)};
    if (r.end < r.begin) {
        parse_error(where, "range ends before it begins");
    }
    return r;
}

Json partitions_json(const SequencePartitions& p) {
    Json j = Json::object();
    j["system"] = range_json(p.system);
    j["visual"] = range_json(p.visual);
    j["text"] = range_json(p.text);
    return j;
}

SequencePartitions partitions_from(const Json& j, const std::string& where) {
    allow_keys(j, where, {"system", "visual", "text"});
    return {range_from(require(j, where, "system"), where + ".system"),
            range_from(require(j, where, "visual"), where + ".visual"),
            range_from(require(j, where, "text"), where + ".text")};
}

std::optional<TensorRole> parse_role(std::string_view s, std::optional<std::size_t>& layer_from_name) {
    static constexpr std::pair<std::string_view, TensorRole> kRoles[] = {
        {"visual_embeddings", TensorRole::VisualEmbeddings}, {"cls_vector", TensorRole::ClsVector},
        {"wq", TensorRole::Wq},
        {"wk", TensorRole::Wk},
        {"encoder_tokens", TensorRole::EncoderTokens},
        {"cls_attention", TensorRole::ClsAttention},
        {"attention_layer", TensorRole::AttentionLayer},
        {"decode_rows", TensorRole::DecodeRows},
    };
    for (const auto& [name, role] : kRoles) {
        if (s == name) {
            return role;
        }
    }
    constexpr std::string_view prefix = "attention_layer_";
    if (s.starts_with(prefix) && s.size() > prefix.size()) {
        const auto digits = s.substr(prefix.size());
        if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            layer_from_name = std::stoull(std::string(digits));
            return TensorRole::AttentionLayer;
        }
    }
    return std::nullopt;
}

std::string entry_label(const TensorEntry& e) { return "entry '" + e.name + "' (" + std::string(to_string(e.role)) + ")"; }

std::string shape_text(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        s += (i ? ", " : "") + std::to_string(shape[i]);
    }
    return s + "]";
}

[[noreturn]] void shape_error(const TensorEntry& e, const std::string& expected) {
    throw Error(ErrorKind::ShapeMismatch, entry_label(e) + " has shape " + shape_text(e.shape) + ", expected " + expected);
}

TokenMatrix as_matrix(const TensorEntry& e, std::vector<float> values) {
    const std::size_t rows = e.shape.size() == 1 ? 1 : e.shape[0];
    const std::size_t cols = e.shape.size() == 1 ? e.shape[0] : e.shape[1];
    return TokenMatrix(rows, cols, std::move(values));
}

}  // namespace

std::string_view to_string(TensorRole role) noexcept {
    switch (role) {
    case TensorRole::VisualEmbeddings: return "visual_embeddings";
    case TensorRole::ClsVector: return "cls_vector";
    case TensorRole::Wq: return "wq";
    case TensorRole::Wk: return "wk";
    case TensorRole::EncoderTokens: return "encoder_tokens";
    case TensorRole::ClsAttention: return "cls_attention";
    case TensorRole::AttentionLayer: return "attention_layer";
    case TensorRole::DecodeRows: return "decode_rows";
    }
    return "unknown";
}

std::size_t TensorEntry::element_count() const noexcept {
    std::size_t n = shape.empty() ? 0 : 1;
    for (auto s : shape) {
        n *= s;
    }
    return n;
}

Json to_json(const InputLayout& layout) {
    Json j = Json::object();
    j["kind"] = std::string(to_string(layout.kind));
    j["visual_count"] = layout.visual_count;
    if (layout.kind == InputKind::AnyResImage) {
        j["thumbnail"] = range_json(layout.thumbnail);
        Json crops = Json::array();
        for (const auto& c : layout.crops) {
            crops.push_back(range_json(c));
        }
        j["crops"] = crops;
    }
    if (layout.kind == InputKind::Video) {
        j["frames"] = layout.frames;
        j["tokens_per_frame"] = layout.tokens_per_frame;
    }
    j["sequence"] = partitions_json(layout.sequence);
    if (layout.trace_sequence) {
        j["trace_sequence"] = partitions_json(*layout.trace_sequence);
    }
    return j;
}

InputLayout layout_from_json(const Json& j) {
    const std::string where = "layout";
    allow_keys(j, where,
               {"kind", "visual_count", "thumbnail", "crops", "frames", "tokens_per_frame", "sequence", "trace_sequence"});
    InputLayout l;
    const auto kind_name = as_string(require(j, where, "kind"), where + ".kind");
    const auto kind = parse_input_kind(kind_name);
    if (!kind) {
        parse_error(where + ".kind", "unknown kind '" + kind_name + "' (plain_image, anyres_image, video)");
    }
    l.kind = *kind;
    l.visual_count = as_count(require(j, where, "visual_count"), where + ".visual_count");
    if (l.kind == InputKind::AnyResImage) {
        l.thumbnail = range_from(require(j, where, "thumbnail"), where + ".thumbnail");
        const auto& crops = require(j, where, "crops");
        if (!crops.is_array()) {
            parse_error(where + ".crops", "expected an array of ranges");
        }
        for (std::size_t i = 0; i < crops.size(); ++i) {
            l.crops.push_back(range_from(crops[i], where + ".crops[" + std::to_string(i) + "]"));
        }
    }
    if (l.kind == InputKind::Video) {
        l.frames = as_count(require(j, where, "frames"), where + ".frames");
        l.tokens_per_frame = as_count(require(j, where, "tokens_per_frame"), where + ".tokens_per_frame");
    }
    l.sequence = partitions_from(require(j, where, "sequence"), where + ".sequence");
    if (j.contains("trace_sequence")) {
        l.trace_sequence = partitions_from(j["trace_sequence"], where + ".trace_sequence");
    }
    l.validate();
    return l;
}

Json to_json(const ManifestDocument& doc) {
    Json j = Json::object();
    j["format_version"] = doc.format_version;
    Json entries = Json::array();
    for (const auto& e : doc.entries) {
        Json je = Json::object();
        je["name"] = e.name;
        je["role"] = std::string(to_string(e.role));
        je["dtype"] = e.dtype;
        je["shape"] = e.shape;
        je["file"] = e.file;
        if (e.layer) {
            je["layer"] = *e.layer;
        }
        entries.push_back(je);
    }
    j["entries"] = entries;
    j["layout"] = to_json(doc.layout);
    Json plan = Json::object();
    if (doc.plan.retain_k) {
        plan["retain_k"] = *doc.plan.retain_k;
    }
    if (doc.plan.retain_ratio) {
        plan["retain_ratio"] = *doc.plan.retain_ratio;
    }
    plan["tau"] = doc.plan.tau;
    if (doc.default_schedule) {
        plan["schedule"] = "default";
    } else {
        plan["schedule"] = doc.plan.schedule;
    }
    if (doc.num_layers) {
        plan["num_layers"] = *doc.num_layers;
    }
    j["plan"] = plan;
    Json cost = Json::object();
    cost["preset"] = doc.cost.preset;
    cost["decode_len"] = doc.cost.decode_len;
    cost["encoder_passes"] = doc.cost.encoder_passes;
    j["cost"] = cost;
    return j;
}

ManifestDocument manifest_from_json(const Json& j) {
    allow_keys(j, "manifest", {"format_version", "entries", "layout", "plan", "cost"});
    ManifestDocument doc;
    const auto& version = require(j, "manifest", "format_version");
    if (!version.is_number_integer() || version.get<int>() != kManifestFormatVersion) {
        parse_error("manifest.format_version", "expected " + std::to_string(kManifestFormatVersion) + ", got " +
                                                   version.dump());
    }
    doc.layout = layout_from_json(require(j, "manifest", "layout"));

    const auto& entries = require(j, "manifest", "entries");
    if (!entries.is_array()) {
        parse_error("manifest.entries", "expected an array");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string where = "entries[" + std::to_string(i) + "]";
        const auto& je = entries[i];
        allow_keys(je, where, {"name", "role", "dtype", "shape", "file", "layer"});
        TensorEntry e;
        e.name = as_string(require(je, where, "name"), where + ".name");
        const std::string label = "entry '" + e.name + "'";
        const auto role_name = as_string(require(je, where, "role"), label + ".role");
        std::optional<std::size_t> layer_from_name;
        const auto role = parse_role(role_name, layer_from_name);
        if (!role) {
            parse_error(label + ".role", "unknown role '" + role_name + "'");
        }
        e.role = *role;
        e.dtype = as_string(require(je, where, "dtype"), label + ".dtype");
        if (e.dtype != "f32le") {
            parse_error(label + ".dtype", "unsupported dtype '" + e.dtype + "' (only f32le)");
        }
        const auto& shape = require(je, where, "shape");
        if (!shape.is_array() || shape.empty()) {
            parse_error(label + ".shape", "expected a non-empty array of dims");
        }
        for (const auto& dim : shape) {
            e.shape.push_back(as_count(dim, label + ".shape"));
        }
        e.file = as_string(require(je, where, "file"), label + ".file");
        if (je.contains("layer")) {
            e.layer = as_count(je["layer"], label + ".layer");
        }
        if (layer_from_name) {
            if (e.layer && *e.layer != *layer_from_name) {
                parse_error(label + ".layer", "disagrees with the layer in role '" + role_name + "'");
            }
            e.layer = layer_from_name;
        }
        const bool layered = e.role == TensorRole::AttentionLayer || e.role == TensorRole::DecodeRows;
        if (layered != e.layer.has_value()) {
            parse_error(label + ".layer", layered ? "attention and decode entries need a layer"
                                                  : "only attention and decode entries take a layer");
        }
        doc.entries.push_back(std::move(e));
    }

    if (j.contains("plan")) {
        const auto& p = j["plan"];
        allow_keys(p, "plan", {"retain_k", "retain_ratio", "tau", "schedule", "num_layers"});
        if (p.contains("retain_k")) {
            doc.plan.retain_k = as_count(p["retain_k"], "plan.retain_k");
        }
        if (p.contains("retain_ratio")) {
            doc.plan.retain_ratio = as_real(p["retain_ratio"], "plan.retain_ratio");
        }
        if (doc.plan.retain_k && doc.plan.retain_ratio) {
            throw Error(ErrorKind::InvalidPlan, "plan sets both retain_k and retain_ratio");
        }
        if (p.contains("tau")) {
            doc.plan.tau = as_real(p["tau"], "plan.tau");
        }
        if (p.contains("schedule")) {
            const auto& s = p["schedule"];
            if (s.is_string()) {
                if (s.get<std::string>() != "default") {
                    parse_error("plan.schedule", "expected \"default\" or a list of layers");
                }
            } else if (s.is_array()) {
                doc.default_schedule = false;
                for (const auto& layer : s) {
                    doc.plan.schedule.push_back(as_count(layer, "plan.schedule"));
                }
            } else {
                parse_error("plan.schedule", "expected \"default\" or a list of layers");
            }
        }
        if (p.contains("num_layers")) {
            doc.num_layers = as_count(p["num_layers"], "plan.num_layers");
        }
    }
    if (j.contains("cost")) {
        const auto& c = j["cost"];
        allow_keys(c, "cost", {"preset", "decode_len", "encoder_passes"});
        if (c.contains("preset")) {
            doc.cost.preset = as_string(c["preset"], "cost.preset");
        }
        if (c.contains("decode_len")) {
            doc.cost.decode_len = as_count(c["decode_len"], "cost.decode_len");
        }
        if (c.contains("encoder_passes")) {
            doc.cost.encoder_passes = as_count(c["encoder_passes"], "cost.encoder_passes");
        }
    }
    return doc;
}

std::vector<float> read_tensor_file(const std::filesystem::path& path, std::size_t expected_count,
                                    const std::string& entry_name) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) {
        throw Error(ErrorKind::ParseError, "entry '" + entry_name + "': cannot read " + path.string());
    }
    if (size != expected_count * sizeof(float)) {
        throw Error(ErrorKind::ShapeMismatch, "entry '" + entry_name + "': file " + path.filename().string() +
                                                  " holds " + std::to_string(size) + " bytes, shape requires " +
                                                  std::to_string(expected_count * sizeof(float)));
    }
    std::vector<float> values(expected_count);
    std::ifstream in(path, std::ios::binary);
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(size))) {
        throw Error(ErrorKind::ParseError, "entry '" + entry_name + "': short read from " + path.string());
    }
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& v : values) {
            v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
        }
    }
    const auto bad = std::find_if(values.begin(), values.end(), [](float x) { return !std::isfinite(x); });
    if (bad != values.end()) {
        throw Error(ErrorKind::NonFiniteData, "entry '" + entry_name + "': non-finite value at flat index " +
                                                  std::to_string(std::distance(values.begin(), bad)));
    }
    return values;
}

void write_tensor_file(const std::filesystem::path& path, std::span<const float> values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::ParseError, "cannot open " + path.string() + " for writing");
    }
    if constexpr (std::endian::native == std::endian::big) {
        for (float v : values) {
            const auto bits = __builtin_bswap32(std::bit_cast<std::uint32_t>(v));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    } else {
        out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    }
    if (!out) {
        throw Error(ErrorKind::ParseError, "failed writing " + path.string());
    }
}

void save_manifest(const std::filesystem::path& path, const ManifestDocument& doc) {
    std::ofstream out(path, std::ios::trunc);
    out << to_json(doc).dump(2) << "\n";
    if (!out) {
        throw Error(ErrorKind::ParseError, "failed writing " + path.string());
    }
}

LoadedManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::ParseError, "cannot open manifest " + path.string());
    }
    Json json;
    try {
        json = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
    LoadedManifest m;
    m.path = path;
    m.document = manifest_from_json(json);
    const auto& layout = m.document.layout;
    const std::size_t visual = layout.visual_count;
    const std::size_t prompt = layout.stage2_partitions().total();
    const auto base = path.parent_path();

    for (const auto& e : m.document.entries) {
        const auto& s = e.shape;
        auto require_unique = [&](const std::optional<TokenMatrix>& slot) {
            if (slot) {
                throw Error(ErrorKind::ParseError, entry_label(e) + " duplicates an earlier entry of the same role");
            }
        };
        // Shape checks precede any file access so mismatches name the entry.
        switch (e.role) {
        case TensorRole::VisualEmbeddings:
        case TensorRole::EncoderTokens:
            if (s.size() != 2 || s[0] != visual || s[1] == 0) {
                shape_error(e, "[" + std::to_string(visual) + ", d]");
            }
            break;
        case TensorRole::ClsVector:
            if (!(s.size() == 1 && s[0] > 0) && !(s.size() == 2 && s[0] > 0 && s[1] > 0)) {
                shape_error(e, "[d] or [frames, d]");
            }
            if (s.size() == 2 && s[0] != 1 && !(layout.kind == InputKind::Video && s[0] == layout.frames)) {
                shape_error(e, "[1, d] or [frames, d] for a video layout");
            }
            break;
        case TensorRole::Wq:
        case TensorRole::Wk:
            if (s.size() != 2 || s[0] != s[1] || s[0] == 0) {
                shape_error(e, "[d, d]");
            }
            break;
        case TensorRole::ClsAttention:
            if (layout.kind == InputKind::Video) {
                if (s.size() != 2 || s[0] != layout.frames || s[1] != layout.tokens_per_frame) {
                    shape_error(e, "[" + std::to_string(layout.frames) + ", " +
                                       std::to_string(layout.tokens_per_frame) + "]");
                }
            } else if (!(s.size() == 1 && s[0] == visual) && !(s.size() == 2 && s[0] == 1 && s[1] == visual)) {
                shape_error(e, "[" + std::to_string(visual) + "]");
            }
            break;
        case TensorRole::AttentionLayer:
            if (s.size() != 2 || s[0] != prompt || s[1] != prompt) {
                shape_error(e, "[" + std::to_string(prompt) + ", " + std::to_string(prompt) + "]");
            }
            break;
        case TensorRole::DecodeRows:
            if (s.size() != 2 || s[0] == 0 || s[1] < prompt) {
                shape_error(e, "[rows >= 1, keys >= " + std::to_string(prompt) + "]");
            }
            break;
        }

        auto values = read_tensor_file(base / e.file, e.element_count(), e.name);
        auto matrix = as_matrix(e, std::move(values));
        switch (e.role) {
        case TensorRole::VisualEmbeddings: require_unique(m.visual_embeddings); m.visual_embeddings = std::move(matrix); break;
        case TensorRole::EncoderTokens: require_unique(m.encoder_tokens); m.encoder_tokens = std::move(matrix); break;
        case TensorRole::ClsVector: require_unique(m.cls_vector); m.cls_vector = std::move(matrix); break;
        case TensorRole::Wq: require_unique(m.wq); m.wq = std::move(matrix); break;
        case TensorRole::Wk: require_unique(m.wk); m.wk = std::move(matrix); break;
        case TensorRole::ClsAttention: require_unique(m.cls_attention); m.cls_attention = std::move(matrix); break;
        case TensorRole::AttentionLayer:
            if (!m.trace.prompt.emplace(*e.layer, std::move(matrix)).second) {
                throw Error(ErrorKind::ParseError, entry_label(e) + " repeats layer " + std::to_string(*e.layer));
            }
            break;
        case TensorRole::DecodeRows:
            if (!m.trace.decode.emplace(*e.layer, std::move(matrix)).second) {
                throw Error(ErrorKind::ParseError, entry_label(e) + " repeats layer " + std::to_string(*e.layer));
            }
            break;
        }
    }

    // Row-stochastic checks, reported per entry.
    for (const auto& e : m.document.entries) {
        if (e.role == TensorRole::AttentionLayer) {
            require_row_stochastic(m.trace.prompt.at(*e.layer), "entry '" + e.name + "'");
        } else if (e.role == TensorRole::DecodeRows) {
            require_row_stochastic(m.trace.decode.at(*e.layer), "entry '" + e.name + "'");
        }
    }
    return m;
}

}  // namespace vtprune::io
