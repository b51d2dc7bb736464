// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "temp_dir.hpp"
#include "vtprune/io/canonical_json.hpp"
#include "vtprune/io/cli.hpp"
#include "vtprune/io/fixture.hpp"

namespace vtprune::io {
namespace {

using testing::TempDir;

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "vtprune");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(VTPRUNE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliFixture : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir = new TempDir("cli");
        manifest = write_fixture(dir->path(), FixtureOptions{}).string();
        FixtureOptions s1;
        s1.visual_count = 100;
        s1.embed_dim = 16;
        s1.with_trace = false;
        std::filesystem::create_directories(dir->path() / "s1");
        stage1 = write_fixture(dir->path() / "s1", s1).string();
    }
    static void TearDownTestSuite() {
        delete dir;
        dir = nullptr;
    }
    static TempDir* dir;
    static std::string manifest;
    static std::string stage1;
};

TempDir* CliFixture::dir = nullptr;
std::string CliFixture::manifest;
std::string CliFixture::stage1;

TEST_F(CliFixture, SelectReturns288Indices) {
    const auto r = run({"select", "--manifest", manifest, "--ratio", "0.10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["retention"]["indices"].size(), 288u);
    EXPECT_EQ(j["retention"]["count"], 288);
    EXPECT_TRUE(j["decision"].is_null());
}

TEST_F(CliFixture, DecideTauZeroHasNoDropLayer) {
    const auto r = run({"decide", "--manifest", manifest, "--tau", "0.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_TRUE(j["decision"]["drop_layer"].is_null());
    EXPECT_EQ(j["decision"]["probed"].size(), 4u);
}

TEST_F(CliFixture, PipelineDefaultTau) {
    const auto r = run({"pipeline", "--manifest", manifest});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["config"]["tau"], 0.03);
    EXPECT_EQ(j["decision"]["drop_layer"], 20);
    EXPECT_EQ(j["seed"], 0);
}

TEST_F(CliFixture, ScheduleFlag) {
    const auto r = run({"decide", "--manifest", manifest, "--schedule", "24,28"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["decision"]["drop_layer"], 24);
    EXPECT_EQ(run({"decide", "--manifest", manifest, "--schedule", "24,x"}).code, 2);
    EXPECT_EQ(run({"decide", "--manifest", manifest, "--schedule", "17"}).code, 3);
}

TEST_F(CliFixture, StageOneOnlyWarns) {
    const auto r = run({"pipeline", "--manifest", stage1});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["retention"]["count"], 10);
    EXPECT_TRUE(j["decision"].is_null());
    EXPECT_EQ(j["warnings"].size(), 1u);
    EXPECT_EQ(run({"decide", "--manifest", stage1}).code, 3);
}

TEST_F(CliFixture, OutFileAndCsvAreDeterministic) {
    const auto a = (dir->path() / "a.json").string();
    const auto b = (dir->path() / "b.json").string();
    ASSERT_EQ(run({"pipeline", "--manifest", manifest, "--out", a}).code, 0);
    ASSERT_EQ(run({"pipeline", "--manifest", manifest, "--out", b}).code, 0);
    EXPECT_EQ(testing::read_file(a), testing::read_file(b));
    const auto csv = run({"pipeline", "--manifest", manifest, "--report", "csv"});
    ASSERT_EQ(csv.code, 0);
    EXPECT_EQ(csv.out.rfind("record,key,layer", 0), 0u);
}

TEST_F(CliFixture, ScalarAndSimdAgree) {
    const auto s = run({"--isa", "scalar", "select", "--manifest", manifest});
    const auto a = run({"--isa", "auto", "select", "--manifest", manifest});
    ASSERT_EQ(s.code, 0);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(Json::parse(s.out)["retention"]["indices"], Json::parse(a.out)["retention"]["indices"]);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"select"}).code, 2);  // --manifest required
    const auto both = run({"select", "--manifest", "m.json", "--ratio", "0.1", "--k", "3"});
    EXPECT_EQ(both.code, 2);
    EXPECT_NE(both.err.find("--ratio"), std::string::npos) << both.err;
    EXPECT_EQ(run({"select", "--manifest", "m.json", "--report", "xml"}).code, 2);
    EXPECT_EQ(run({"flops", "--preset", "nope"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, DataErrorsExitThree) {
    const auto r = run({"select", "--manifest", "/nonexistent/m.json"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("ParseError"), std::string::npos) << r.err;
}

TEST(Cli, FlopsPreset) {
    const auto r = run({"flops", "--preset", "llava-next-7b", "--n", "3000", "--decode-len", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["llm"]["input_len"], 3000);
    EXPECT_EQ(j["llm"]["output_len"], 20);
    EXPECT_EQ(j["flops"]["prefilling"], 17458790400000.0);
    const double ratio = j["flops"]["prefill_ratio"];
    EXPECT_NEAR(ratio, j["flops"]["prefilling"].get<double>() / j["flops"]["encoding"].get<double>(), 1e-6 * ratio);
    const auto csv = run({"flops", "--preset", "llava-next-13b", "--report", "csv"});
    ASSERT_EQ(csv.code, 0);
    EXPECT_NE(csv.out.find("prefill_ratio,"), std::string::npos);
}

TEST(Cli, OracleCheck) {
    const auto r = run({"oracle-check", "--instances", "40", "--approx-sets", "10", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["mismatches"], 0);
    EXPECT_EQ(j["approx_violations"], 0);
    EXPECT_EQ(j["instances"], 40);
}

TEST(Cli, VerifyLemmaSmall) {
    const auto r = run({"verify-lemma", "--trials", "2000", "--seed", "5", "--threads", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_TRUE(j["control_correlated"].get<bool>());
    EXPECT_EQ(run({"verify-lemma", "--trials", "50"}).code, 3);
}

TEST(Cli, BinaryExitCodes) {
    EXPECT_EQ(run_binary("flops"), 0);
    EXPECT_EQ(run_binary("select --manifest x.json --ratio 0.1 --k 2"), 2);
    EXPECT_EQ(run_binary("select --manifest /nonexistent.json"), 3);
}

}  // namespace
}  // namespace vtprune::io
