// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/io/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "vtprune/costmodel.hpp"
#include "vtprune/error.hpp"
#include "vtprune/io/fixture.hpp"
#include "vtprune/io/pipeline.hpp"
#include "vtprune/kernels.hpp"
#include "vtprune/theory.hpp"

namespace vtprune::io {

namespace {

struct OutputOptions {
    std::string format = "json";
    std::string path;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--report", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", o.path, "Write the report here instead of stdout");
}

void emit(const OutputOptions& o, const std::string& text, std::ostream& out) {
    if (o.path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.path, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) {
        throw Error(ErrorKind::Usage, "cannot write --out " + o.path);
    }
}

std::string csv_summary(const Json& flat) {
    std::string s = "key,value\n";
    for (const auto& [key, value] : flat.items()) {
        s += key + "," + (value.is_number_float() ? format_real(value.get<double>()) : value.dump()) + "\n";
    }
    return s;
}

std::vector<std::size_t> parse_schedule(const std::string& text) {
    std::vector<std::size_t> layers;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw Error(ErrorKind::Usage, "--schedule expects 'default' or a comma-separated layer list, got '" +
                                              text + "'");
        }
        layers.push_back(v);
    }
    if (layers.empty()) {
        throw Error(ErrorKind::Usage, "--schedule list is empty");
    }
    return layers;
}

struct RunArgs {
    std::string manifest;
    std::optional<double> ratio;
    std::optional<std::size_t> k;
    std::optional<double> tau;
    std::string schedule;
    std::optional<std::size_t> num_layers;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> decode_len;
    std::string similarity = "cosine";
    std::uint64_t seed = 0;
    OutputOptions output;
};

CLI::App* add_run_command(CLI::App& app, const char* name, const char* help, RunArgs& a) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--manifest", a.manifest, "Manifest JSON")->required();
    auto* ratio = cmd->add_option("--ratio", a.ratio, "Fraction of visual tokens to retain");
    auto* k = cmd->add_option("--k", a.k, "Number of visual tokens to retain");
    ratio->excludes(k);
    cmd->add_option("--tau", a.tau, "Cross-modal ratio threshold (default 0.03)");
    cmd->add_option("--schedule", a.schedule, "'default' or comma-separated decoder layers");
    cmd->add_option("--num-layers", a.num_layers, "Decoder layer count for the default schedule");
    cmd->add_option("--preset", a.preset, "Cost-model preset");
    cmd->add_option("--decode-len", a.decode_len, "Output length for decode FLOPs");
    cmd->add_option("--similarity", a.similarity, "Greedy similarity")->check(CLI::IsMember({"cosine", "dot"}));
    cmd->add_option("--seed", a.seed, "Seed echoed into the report");
    add_output_options(cmd, a.output);
    return cmd;
}

int run_manifest_command(const RunArgs& a, PipelineMode mode, std::ostream& out) {
    PipelineFlags flags;
    flags.retain_ratio = a.ratio;
    flags.retain_k = a.k;
    flags.tau = a.tau;
    if (!a.schedule.empty()) {
        flags.schedule = a.schedule == "default" ? std::vector<std::size_t>{} : parse_schedule(a.schedule);
    }
    flags.num_layers = a.num_layers;
    flags.preset = a.preset;
    flags.decode_len = a.decode_len;
    flags.similarity = a.similarity == "dot" ? SimilarityMode::RawDot : SimilarityMode::Cosine;
    flags.seed = a.seed;
    const auto manifest = load_manifest(a.manifest);
    const auto report = run_pipeline(manifest, mode, flags);
    emit(a.output, a.output.format == "csv" ? write_report_csv(report) : write_report_json(report), out);
    return 0;
}

struct FlopsArgs {
    std::string preset = "llava-next-7b";
    std::uint64_t n = 3000;
    std::uint64_t decode_len = 20;
    std::optional<std::uint64_t> encoder_n;
    std::optional<std::uint64_t> encoder_layers;
    std::uint64_t encoder_passes = 1;
    std::optional<std::uint64_t> reduced_n;
    OutputOptions output;
};

int run_flops(const FlopsArgs& a, std::ostream& out) {
    const auto& preset = find_preset(a.preset);
    StageConfig encoder = preset.encoder;
    if (a.encoder_n) {
        encoder.input_len = *a.encoder_n;
    }
    if (a.encoder_layers) {
        encoder.layers = *a.encoder_layers;
    }
    StageConfig llm = preset.llm;
    llm.input_len = a.n;
    llm.output_len = a.decode_len;
    std::optional<PruningEffect> pruning;
    if (a.reduced_n) {
        pruning = PruningEffect{*a.reduced_n, std::nullopt, 0};
    }
    const auto report = stage_ratio_report(encoder, llm, a.encoder_passes, pruning);
    Json j = Json::object();
    j["preset"] = a.preset;
    j["encoder"] = {{"layers", encoder.layers}, {"hidden", encoder.hidden}, {"ffn", encoder.ffn},
                    {"input_len", encoder.input_len}, {"passes", a.encoder_passes}};
    j["llm"] = {{"layers", llm.layers}, {"hidden", llm.hidden}, {"ffn", llm.ffn}, {"input_len", llm.input_len},
                {"output_len", llm.output_len}};
    j["flops"] = to_json(report);
    std::ostringstream ratio;
    ratio << "1:" << std::fixed << std::setprecision(1) << report.prefill_ratio << ":" << report.decode_ratio;
    j["ratio"] = ratio.str();
    if (a.output.format == "csv") {
        Json flat = Json::object();
        flat["encoding"] = report.encoding;
        flat["prefilling"] = report.prefilling;
        flat["decoding"] = report.decoding;
        flat["prefill_ratio"] = report.prefill_ratio;
        flat["decode_ratio"] = report.decode_ratio;
        if (report.savings) {
            flat["prefill_savings"] = report.savings->fraction;
        }
        emit(a.output, csv_summary(flat), out);
    } else {
        emit(a.output, canonical_dump(j), out);
    }
    return 0;
}

struct LemmaArgs {
    std::size_t trials = 100000;
    std::uint64_t seed = 0;
    std::size_t visual_tokens = 16;
    std::size_t text_tokens = 8;
    std::size_t dim = 32;
    std::size_t rank_v = 8;
    std::size_t rank_t = 8;
    std::string kernel = "cosine";
    std::size_t resamples = 1000;
    std::size_t threads = 1;
    bool skip_control = false;
    OutputOptions output;
};

Json covariance_json(const theory::CovarianceResult& r) {
    Json j = Json::object();
    j["trials"] = r.trials;
    j["sample_cov"] = r.sample_cov;
    j["standard_error"] = r.standard_error;
    j["z"] = r.standard_error > 0.0 ? r.sample_cov / r.standard_error : 0.0;
    j["mean_diversity"] = r.mean_diversity;
    j["mean_redundancy"] = r.mean_redundancy;
    return j;
}

int run_lemma(const LemmaArgs& a, std::ostream& out) {
    const auto kernel = a.kernel == "shifted" ? theory::KernelForm::ShiftedCosine : theory::KernelForm::Cosine;
    auto trial = theory::orthogonal_trial(a.visual_tokens, a.text_tokens, a.dim, a.rank_v, a.rank_t, a.seed);
    trial.kernel = kernel;
    trial.bootstrap_resamples = a.resamples;
    trial.threads = a.threads;
    const auto result = theory::covariance_experiment(trial, a.trials);
    Json j = Json::object();
    j["seed"] = a.seed;
    j["kernel"] = a.kernel;
    j["visual_tokens"] = a.visual_tokens;
    j["text_tokens"] = a.text_tokens;
    j["ambient_dim"] = a.dim;
    j["orthogonal"] = covariance_json(result);
    j["orthogonal_uncorrelated"] = std::abs(result.sample_cov) <= 3.0 * result.standard_error;
    if (!a.skip_control) {
        auto control = theory::correlated_control(a.visual_tokens, a.text_tokens, a.dim, a.rank_v, a.seed);
        control.kernel = kernel;
        control.bootstrap_resamples = a.resamples;
        control.threads = a.threads;
        const auto c = theory::covariance_experiment(control, a.trials);
        j["control"] = covariance_json(c);
        j["control_correlated"] = std::abs(c.sample_cov) > 3.0 * c.standard_error;
    }
    if (a.output.format == "csv") {
        Json flat = Json::object();
        flat["sample_cov"] = result.sample_cov;
        flat["standard_error"] = result.standard_error;
        flat["orthogonal_uncorrelated"] = j["orthogonal_uncorrelated"];
        if (j.contains("control")) {
            flat["control_sample_cov"] = j["control"]["sample_cov"];
            flat["control_standard_error"] = j["control"]["standard_error"];
            flat["control_correlated"] = j["control_correlated"];
        }
        emit(a.output, csv_summary(flat), out);
    } else {
        emit(a.output, canonical_dump(j), out);
    }
    return 0;
}

struct OracleArgs {
    std::size_t instances = 200;
    std::size_t approx_sets = 50;
    std::size_t max_n = 64;
    std::size_t max_d = 16;
    std::uint64_t seed = 0;
    OutputOptions output;
};

TokenMatrix random_tokens(std::size_t n, std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<float> normal(0.0f, 1.0f);
    TokenMatrix m(n, d);
    for (auto& x : m.data()) {
        x = normal(rng);
    }
    return m;
}

int run_oracle_check(const OracleArgs& a, std::ostream& out) {
    if (a.max_n < 1 || a.max_n > kOracleMaxTokens || a.max_d < 1) {
        throw Error(ErrorKind::Usage, "--max-n must lie in [1, 512] and --max-d >= 1");
    }
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(a.seed);
    std::size_t greedy_runs = 0;
    std::size_t mismatches = 0;
    for (std::size_t inst = 0; inst < a.instances; ++inst) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, a.max_n)(rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(1, a.max_d)(rng);
        const auto tokens = random_tokens(n, d, rng);
        const std::size_t pivot = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        // The oracle's order does not depend on k, so its k = n run gives
        // every prefix at once.
        const auto full = oracle_greedy(tokens, pivot, n);
        for (std::size_t k = 1; k <= n; ++k) {
            const auto g = greedy_kcenter(tokens, pivot, k);
            ++greedy_runs;
            if (!std::equal(g.indices.begin(), g.indices.end(), full.indices.begin())) {
                ++mismatches;
            }
        }
    }
    std::size_t approx_checked = 0;
    std::size_t approx_violations = 0;
    double worst_ratio = 0.0;
    for (std::size_t set = 0; set < a.approx_sets; ++set) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, kExhaustiveMaxTokens)(rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(2, a.max_d)(rng);
        const auto tokens = random_tokens(n, d, rng);
        const std::size_t pivot = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        for (std::size_t k = 1; k <= std::min(n, kExhaustiveMaxK); ++k) {
            const auto g = greedy_kcenter(tokens, pivot, k);
            const double greedy_r = covering_radius(tokens, g.indices);
            const double opt = optimal_kcenter_radius(tokens, k);
            ++approx_checked;
            if (greedy_r > 2.0 * opt + 1e-9) {
                ++approx_violations;
            }
            if (opt > 0.0) {
                worst_ratio = std::max(worst_ratio, greedy_r / opt);
            }
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json j = Json::object();
    j["seed"] = a.seed;
    j["instances"] = a.instances;
    j["greedy_runs"] = greedy_runs;
    j["mismatches"] = mismatches;
    j["approx_checked"] = approx_checked;
    j["approx_violations"] = approx_violations;
    j["worst_radius_ratio"] = worst_ratio;
    j["seconds"] = seconds;
    if (a.output.format == "csv") {
        emit(a.output, csv_summary(j), out);
    } else {
        emit(a.output, canonical_dump(j), out);
    }
    return mismatches == 0 && approx_violations == 0 ? 0 : 4;
}

struct FixtureArgs {
    std::string out_dir;
    std::string kind = "anyres_image";
    FixtureOptions options;
    bool no_trace = false;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Visual token retention and drop-layer engine"};
    app.require_subcommand(1);
    std::string isa = "auto";
    app.add_option("--isa", isa, "Kernel backend: auto, scalar, avx2, neon")
        ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

    RunArgs select_args;
    RunArgs decide_args;
    RunArgs pipeline_args;
    auto* select = add_run_command(app, "select", "Stage 1: pivot and greedy k-center retention", select_args);
    auto* decide = add_run_command(app, "decide", "Stage 2: drop-layer decision from attention traces", decide_args);
    auto* pipeline = add_run_command(app, "pipeline", "Both stages plus FLOPs savings", pipeline_args);

    FlopsArgs flops_args;
    auto* flops = app.add_subcommand("flops", "FLOPs cost model for a preset");
    flops->add_option("--preset", flops_args.preset, "llava-next-7b or llava-next-13b");
    flops->add_option("--n", flops_args.n, "LLM input length");
    flops->add_option("--decode-len", flops_args.decode_len, "LLM output length");
    flops->add_option("--encoder-n", flops_args.encoder_n, "Tokens per encoder pass");
    flops->add_option("--encoder-layers", flops_args.encoder_layers, "Override the encoder layer count");
    flops->add_option("--encoder-passes", flops_args.encoder_passes, "Encoder passes (AnyRes crops)");
    flops->add_option("--reduced-n", flops_args.reduced_n, "LLM input length after pruning");
    add_output_options(flops, flops_args.output);

    LemmaArgs lemma_args;
    auto* lemma = app.add_subcommand("verify-lemma", "Monte Carlo covariance of diversity and redundancy");
    lemma->add_option("--trials", lemma_args.trials, "Number of trials");
    lemma->add_option("--seed", lemma_args.seed, "RNG seed");
    lemma->add_option("--visual-tokens", lemma_args.visual_tokens, "Visual tokens per trial");
    lemma->add_option("--text-tokens", lemma_args.text_tokens, "Text tokens per trial");
    lemma->add_option("--dim", lemma_args.dim, "Ambient dimension");
    lemma->add_option("--rank-v", lemma_args.rank_v, "Visual sub-space rank");
    lemma->add_option("--rank-t", lemma_args.rank_t, "Text sub-space rank");
    lemma->add_option("--kernel", lemma_args.kernel, "cosine or shifted")->check(CLI::IsMember({"cosine", "shifted"}));
    lemma->add_option("--resamples", lemma_args.resamples, "Bootstrap resamples");
    lemma->add_option("--threads", lemma_args.threads, "Worker threads");
    lemma->add_flag("--skip-control", lemma_args.skip_control, "Do not run the correlated negative control");
    add_output_options(lemma, lemma_args.output);

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle-check", "Greedy vs oracle and 2-approximation checks");
    oracle->add_option("--instances", oracle_args.instances, "Random instances for the equivalence check");
    oracle->add_option("--approx-sets", oracle_args.approx_sets, "Random sets for the 2-approximation check");
    oracle->add_option("--max-n", oracle_args.max_n, "Largest instance size");
    oracle->add_option("--max-d", oracle_args.max_d, "Largest embedding dim");
    oracle->add_option("--seed", oracle_args.seed, "RNG seed");
    add_output_options(oracle, oracle_args.output);

    FixtureArgs fixture_args;
    auto* fixture = app.add_subcommand("make-fixture", "Write a synthetic manifest and payloads");
    fixture->add_option("--out-dir", fixture_args.out_dir, "Output directory")->required();
    fixture->add_option("--kind", fixture_args.kind, "plain_image, anyres_image or video")
        ->check(CLI::IsMember({"plain_image", "anyres_image", "video"}));
    fixture->add_option("--visual-count", fixture_args.options.visual_count, "Visual tokens");
    fixture->add_option("--embed-dim", fixture_args.options.embed_dim, "LLM embedding dim");
    fixture->add_option("--encoder-dim", fixture_args.options.encoder_dim, "Vision encoder dim");
    fixture->add_option("--frames", fixture_args.options.frames, "Video frames");
    fixture->add_option("--ratio", fixture_args.options.retain_ratio, "Retain ratio written into the plan");
    fixture->add_option("--seed", fixture_args.options.seed, "RNG seed");
    fixture->add_flag("--no-trace", fixture_args.no_trace, "Omit attention traces (stage-1-only manifest)");

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) {
            args.emplace_back(argv[i]);
        }
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        std::ostringstream help;
        const int code = app.exit(e, help, err);
        out << help.str();
        return code == 0 ? 0 : 2;
    }

    try {
        kernels::set_active_isa(*kernels::parse_isa(isa));
        if (*select) return run_manifest_command(select_args, PipelineMode::Select, out);
        if (*decide) return run_manifest_command(decide_args, PipelineMode::Decide, out);
        if (*pipeline) return run_manifest_command(pipeline_args, PipelineMode::Full, out);
        if (*flops) return run_flops(flops_args, out);
        if (*lemma) return run_lemma(lemma_args, out);
        if (*oracle) return run_oracle_check(oracle_args, out);
        if (*fixture) {
            fixture_args.options.kind = *parse_input_kind(fixture_args.kind);
            fixture_args.options.with_trace = !fixture_args.no_trace;
            out << write_fixture(fixture_args.out_dir, fixture_args.options).string() << "\n";
            return 0;
        }
    } catch (const Error& e) {
        err << "vtprune: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "vtprune: internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}

}  // namespace vtprune::io
