// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vtprune/costmodel.hpp"
#include "vtprune/error.hpp"

namespace vtprune {
namespace {

StageConfig cfg(std::uint64_t t, std::uint64_t d, std::uint64_t m, std::uint64_t n, std::uint64_t l = 0) {
    return {t, d, m, n, l};
}

TEST(FlopsPrefill, Examples) {
    EXPECT_EQ(flops_prefill_exact(cfg(1, 1, 1, 1)), 8u);
    const auto big = cfg(32, 4096, 11008, 3000);
    EXPECT_EQ(flops_prefill_exact(big), 17458790400000ull);
    EXPECT_EQ(static_cast<unsigned __int128>(flops_prefill_exact(big)), oracle::prefill_flops(big));
    EXPECT_EQ(flops_prefill(big), 17458790400000.0);
}

TEST(FlopsPrefill, QuadraticTermScales) {
    // With d = m = 1 and large n the 2 n^2 d term dominates.
    const double one = flops_prefill(cfg(1, 1, 1, 100000));
    const double two = flops_prefill(cfg(1, 1, 1, 200000));
    EXPECT_NEAR(two / one, 4.0, 1e-3);
}

TEST(FlopsPrefillProperty, StrictlyMonotone) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> u(1, 5000);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = cfg(u(rng) % 64 + 1, u(rng), u(rng), u(rng));
        const auto base = flops_prefill_exact(c);
        auto t = c;
        ++t.layers;
        auto d = c;
        ++d.hidden;
        auto m = c;
        ++m.ffn;
        auto n = c;
        ++n.input_len;
        EXPECT_GT(flops_prefill_exact(t), base);
        EXPECT_GT(flops_prefill_exact(d), base);
        EXPECT_GT(flops_prefill_exact(m), base);
        EXPECT_GT(flops_prefill_exact(n), base);
    }
}

TEST(FlopsDecode, Examples) {
    EXPECT_EQ(flops_decode_exact(cfg(1, 1, 1, 1, 1)), 8u);
    EXPECT_EQ(flops_decode_exact(cfg(32, 4096, 11008, 3000, 0)), 0u);
    const auto c = cfg(32, 4096, 11008, 3000, 20);
    EXPECT_EQ(static_cast<unsigned __int128>(flops_decode_exact(c)), oracle::decode_flops_loop(c));
}

TEST(FlopsDecodeProperty, ClosedFormEqualsLoop) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::uint64_t> u(1, 4096);
    for (int trial = 0; trial < 300; ++trial) {
        const auto c = cfg(u(rng) % 80 + 1, u(rng), u(rng) * 3, u(rng), u(rng) % 300);
        EXPECT_EQ(static_cast<unsigned __int128>(flops_decode_exact(c)), oracle::decode_flops_loop(c));
    }
}

TEST(Flops, OverflowDetected) {
    const auto huge = cfg(1000, 1ull << 20, 1ull << 20, 1ull << 20);
    EXPECT_THROW(flops_prefill_exact(huge), Error);
    EXPECT_THROW(flops_prefill_exact(cfg(0, 1, 1, 1)), Error);
}

TEST(StageRatio, IdenticalConfigsGiveOne) {
    const auto c = cfg(24, 1024, 4096, 577, 10);
    const auto r = stage_ratio_report(c, c);
    EXPECT_EQ(r.prefill_ratio, 1.0);
}

TEST(StageRatio, ConsistentWithRawValues) {
    for (const auto& p : model_presets()) {
        auto llm = p.llm;
        llm.input_len = 3000;
        llm.output_len = 20;
        const auto r = stage_ratio_report(p.encoder, llm, p.encoder_passes);
        const long double enc = static_cast<long double>(oracle::prefill_flops(p.encoder)) * p.encoder_passes;
        EXPECT_NEAR(r.encoding, static_cast<double>(enc), 1e-9 * r.encoding);
        EXPECT_NEAR(r.prefill_ratio, r.prefilling / r.encoding, 1e-9 * r.prefill_ratio);
        EXPECT_NEAR(r.decode_ratio, r.decoding / r.encoding, 1e-9 * r.decode_ratio);
        EXPECT_NEAR(r.prefill_ratio, static_cast<double>(oracle::prefill_flops(llm) / enc), 1e-9 * r.prefill_ratio);
        EXPECT_NEAR(r.decode_ratio, static_cast<double>(oracle::decode_flops_loop(llm) / enc), 1e-9 * r.decode_ratio);
        EXPECT_FALSE(r.savings.has_value());
    }
}

TEST(StageRatio, EncoderPassesScaleEncoding) {
    const auto& p = find_preset("llava-next-7b");
    const auto one = stage_ratio_report(p.encoder, p.llm, 1);
    const auto five = stage_ratio_report(p.encoder, p.llm, 5);
    EXPECT_DOUBLE_EQ(five.encoding, 5.0 * one.encoding);
    EXPECT_NEAR(five.prefill_ratio, one.prefill_ratio / 5.0, 1e-9);
}

TEST(Presets, KnownAndUnknown) {
    const auto& p7 = find_preset("llava-next-7b");
    EXPECT_EQ(p7.llm.layers, 32u);
    EXPECT_EQ(p7.llm.hidden, 4096u);
    EXPECT_EQ(p7.llm.ffn, 11008u);
    EXPECT_EQ(p7.encoder.layers, 24u);
    EXPECT_EQ(p7.encoder.hidden, 1024u);
    EXPECT_EQ(p7.encoder.ffn, 4096u);
    EXPECT_EQ(p7.encoder.input_len, 577u);
    const auto& p13 = find_preset("llava-next-13b");
    EXPECT_EQ(p13.llm.layers, 40u);
    EXPECT_EQ(p13.llm.hidden, 5120u);
    EXPECT_EQ(p13.llm.ffn, 13824u);
    try {
        find_preset("gpt-9");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Usage);
    }
}

TEST(SavingsProperty, FractionInRangeAndMonotone) {
    const auto& p = find_preset("llava-next-7b");
    auto llm = p.llm;
    llm.input_len = 2955;
    double previous = -1.0;
    for (std::uint64_t pruned = 0; pruned < 2880; pruned += 40) {
        const auto r = stage_ratio_report(p.encoder, llm, 1, PruningEffect{llm.input_len - pruned, {}, 0});
        ASSERT_TRUE(r.savings.has_value());
        EXPECT_GE(r.savings->fraction, 0.0);
        EXPECT_LT(r.savings->fraction, 1.0);
        EXPECT_GT(r.savings->fraction, previous);
        previous = r.savings->fraction;
    }
    const auto none = stage_ratio_report(p.encoder, llm, 1, PruningEffect{llm.input_len, {}, 0});
    EXPECT_EQ(none.savings->fraction, 0.0);
    EXPECT_THROW(stage_ratio_report(p.encoder, llm, 1, PruningEffect{llm.input_len + 1, {}, 0}), Error);
}

TEST(Savings, StagedDropAddsToSavings) {
    const auto& p = find_preset("llava-next-7b");
    auto llm = p.llm;
    llm.input_len = 2955;
    const auto r = stage_ratio_report(p.encoder, llm, 1, PruningEffect{363, 20, 75});
    ASSERT_TRUE(r.savings.has_value());
    auto head = llm;
    head.input_len = 363;
    head.layers = 21;
    auto tail = llm;
    tail.input_len = 75;
    tail.layers = 11;
    const double want = flops_prefill(head) + flops_prefill(tail);
    EXPECT_DOUBLE_EQ(r.savings->staged_prefilling, want);
    EXPECT_GT(r.savings->staged_fraction, r.savings->fraction);
    EXPECT_LT(r.savings->staged_fraction, 1.0);
}

}  // namespace
}  // namespace vtprune
