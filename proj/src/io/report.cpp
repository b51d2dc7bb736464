// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/io/report.hpp"

#include <sstream>

#include "vtprune/error.hpp"

namespace vtprune::io {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<T>();
}

Json savings_json(const FlopsSavings& s) {
    Json j = Json::object();
    j["full_input"] = s.full_input;
    j["reduced_input"] = s.reduced_input;
    j["reduced_prefilling"] = s.reduced_prefilling;
    j["fraction"] = s.fraction;
    j["drop_layer"] = optional_json(s.drop_layer);
    j["staged_prefilling"] = s.staged_prefilling;
    j["staged_fraction"] = s.staged_fraction;
    return j;
}

FlopsReport flops_from(const Json& j) {
    FlopsReport f;
    f.encoding = j.at("encoding").get<double>();
    f.prefilling = j.at("prefilling").get<double>();
    f.decoding = j.at("decoding").get<double>();
    f.prefill_ratio = j.at("prefill_ratio").get<double>();
    f.decode_ratio = j.at("decode_ratio").get<double>();
    if (j.contains("savings") && !j["savings"].is_null()) {
        const auto& s = j["savings"];
        FlopsSavings out;
        out.full_input = s.at("full_input").get<std::uint64_t>();
        out.reduced_input = s.at("reduced_input").get<std::uint64_t>();
        out.reduced_prefilling = s.at("reduced_prefilling").get<double>();
        out.fraction = s.at("fraction").get<double>();
        out.drop_layer = optional_from<std::uint64_t>(s, "drop_layer");
        out.staged_prefilling = s.at("staged_prefilling").get<double>();
        out.staged_fraction = s.at("staged_fraction").get<double>();
        f.savings = out;
    }
    return f;
}

}  // namespace

Json to_json(const FlopsReport& f) {
    Json j = Json::object();
    j["encoding"] = f.encoding;
    j["prefilling"] = f.prefilling;
    j["decoding"] = f.decoding;
    j["prefill_ratio"] = f.prefill_ratio;
    j["decode_ratio"] = f.decode_ratio;
    j["savings"] = f.savings ? savings_json(*f.savings) : Json(nullptr);
    return j;
}

Json to_json(const RunReport& r) {
    Json j = Json::object();
    j["engine_version"] = r.engine_version;
    j["command"] = r.command;
    j["seed"] = r.seed;
    j["kernel_isa"] = r.kernel_isa;

    Json c = Json::object();
    c["manifest"] = r.config.manifest;
    c["kind"] = std::string(to_string(r.config.kind));
    c["visual_count"] = r.config.visual_count;
    c["retain_k"] = optional_json(r.config.retain_k);
    c["retain_ratio"] = optional_json(r.config.retain_ratio);
    c["resolved_k"] = optional_json(r.config.resolved_k);
    c["tau"] = r.config.tau;
    c["schedule"] = r.config.schedule;
    c["similarity"] = r.config.similarity;
    c["preset"] = r.config.preset;
    c["decode_len"] = r.config.decode_len;
    j["config"] = c;

    j["pivot"] = optional_json(r.pivot);
    if (r.retention) {
        Json ret = Json::object();
        ret["count"] = r.retention->indices.size();
        ret["indices"] = r.retention->indices;
        Json trace = Json::array();
        for (const auto& step : r.retention->trace) {
            trace.push_back(Json::array({step.index, static_cast<double>(step.max_similarity)}));
        }
        ret["trace"] = trace;
        j["retention"] = ret;
    } else {
        j["retention"] = nullptr;
    }
    if (r.decision) {
        Json d = Json::object();
        d["drop_layer"] = optional_json(r.decision->drop_layer);
        d["tau"] = r.decision->tau;
        Json probes = Json::array();
        for (const auto& p : r.decision->probed) {
            Json pj = Json::object();
            pj["layer"] = p.layer;
            pj["text_to_visual"] = p.ratios.text_to_visual;
            pj["visual_to_text"] = p.ratios.visual_to_text;
            probes.push_back(pj);
        }
        d["probed"] = probes;
        j["decision"] = d;
    } else {
        j["decision"] = nullptr;
    }
    Json decode = Json::array();
    for (const auto& row : r.decode_attention) {
        Json dj = Json::object();
        dj["layer"] = row.layer;
        dj["rows"] = row.rows;
        dj["to_system"] = row.to_system;
        dj["to_visual"] = row.to_visual;
        dj["to_text"] = row.to_text;
        decode.push_back(dj);
    }
    j["decode_attention"] = decode;
    j["flops"] = r.flops ? to_json(*r.flops) : Json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

RunReport report_from_json(const Json& j) {
    try {
        RunReport r;
        r.engine_version = j.at("engine_version").get<std::string>();
        r.command = j.at("command").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.kernel_isa = j.at("kernel_isa").get<std::string>();
        const auto& c = j.at("config");
        r.config.manifest = c.at("manifest").get<std::string>();
        const auto kind = parse_input_kind(c.at("kind").get<std::string>());
        if (!kind) {
            throw Error(ErrorKind::ParseError, "report config.kind is not a known input kind");
        }
        r.config.kind = *kind;
        r.config.visual_count = c.at("visual_count").get<std::size_t>();
        r.config.retain_k = optional_from<std::size_t>(c, "retain_k");
        r.config.retain_ratio = optional_from<double>(c, "retain_ratio");
        r.config.resolved_k = optional_from<std::size_t>(c, "resolved_k");
        r.config.tau = c.at("tau").get<double>();
        r.config.schedule = c.at("schedule").get<std::vector<std::size_t>>();
        r.config.similarity = c.at("similarity").get<std::string>();
        r.config.preset = c.at("preset").get<std::string>();
        r.config.decode_len = c.at("decode_len").get<std::uint64_t>();
        r.pivot = optional_from<std::size_t>(j, "pivot");
        if (!j.at("retention").is_null()) {
            const auto& ret = j["retention"];
            RetentionSet set;
            set.indices = ret.at("indices").get<std::vector<std::size_t>>();
            for (const auto& step : ret.at("trace")) {
                set.trace.push_back({step.at(0).get<std::size_t>(), step.at(1).get<float>()});
            }
            r.retention = std::move(set);
        }
        if (!j.at("decision").is_null()) {
            const auto& d = j["decision"];
            PruneDecision dec;
            dec.drop_layer = optional_from<std::size_t>(d, "drop_layer");
            dec.tau = d.at("tau").get<double>();
            for (const auto& p : d.at("probed")) {
                dec.probed.push_back({p.at("layer").get<std::size_t>(),
                                      {p.at("text_to_visual").get<double>(), p.at("visual_to_text").get<double>()}});
            }
            r.decision = std::move(dec);
        }
        for (const auto& dj : j.at("decode_attention")) {
            r.decode_attention.push_back({dj.at("layer").get<std::size_t>(), dj.at("rows").get<std::size_t>(),
                                          dj.at("to_system").get<double>(), dj.at("to_visual").get<double>(),
                                          dj.at("to_text").get<double>()});
        }
        if (!j.at("flops").is_null()) {
            r.flops = flops_from(j["flops"]);
        }
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed report: ") + e.what());
    }
}

std::string write_report_json(const RunReport& report) { return canonical_dump(to_json(report)); }

std::string write_report_csv(const RunReport& r) {
    std::ostringstream out;
    out << "record,key,layer,text_to_visual,visual_to_text,value\n";
    if (r.decision) {
        for (const auto& p : r.decision->probed) {
            const bool hit = p.ratios.text_to_visual < r.decision->tau && p.ratios.visual_to_text < r.decision->tau;
            out << "probe," << (hit ? "below_tau" : "above_tau") << "," << p.layer << ","
                << format_real(p.ratios.text_to_visual) << "," << format_real(p.ratios.visual_to_text) << ",\n";
        }
    }
    for (const auto& d : r.decode_attention) {
        out << "decode,to_system," << d.layer << ",,," << format_real(d.to_system) << "\n";
        out << "decode,to_visual," << d.layer << ",,," << format_real(d.to_visual) << "\n";
        out << "decode,to_text," << d.layer << ",,," << format_real(d.to_text) << "\n";
    }
    auto summary = [&](const std::string& key, const std::string& value) {
        out << "summary," << key << ",,,," << value << "\n";
    };
    summary("command", r.command);
    summary("seed", std::to_string(r.seed));
    summary("tau", format_real(r.config.tau));
    if (r.pivot) {
        summary("pivot", std::to_string(*r.pivot));
    }
    if (r.retention) {
        summary("retained", std::to_string(r.retention->indices.size()));
    }
    if (r.decision) {
        summary("drop_layer", r.decision->drop_layer ? std::to_string(*r.decision->drop_layer) : "none");
    }
    if (r.flops) {
        summary("encoding_flops", format_real(r.flops->encoding));
        summary("prefilling_flops", format_real(r.flops->prefilling));
        summary("decoding_flops", format_real(r.flops->decoding));
        summary("prefill_ratio", format_real(r.flops->prefill_ratio));
        summary("decode_ratio", format_real(r.flops->decode_ratio));
        if (r.flops->savings) {
            summary("prefill_savings", format_real(r.flops->savings->fraction));
            summary("staged_prefill_savings", format_real(r.flops->savings->staged_fraction));
        }
    }
    for (const auto& w : r.warnings) {
        summary("warning", "\"" + w + "\"");
    }
    return out.str();
}

}  // namespace vtprune::io
