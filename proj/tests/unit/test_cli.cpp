// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "experiment_io.hpp"
#include "qht/common.hpp"

namespace qht::cli {
namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "qht");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Table parse(const std::string& s) {
  std::istringstream in(s);
  return load_table(in);
}

TEST(ExperimentIo, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(ExperimentIo, ShortestRoundTripFormatting) {
  EXPECT_EQ(fmt(0.1), "0.1");
  EXPECT_EQ(fmt(1e-6), "1e-06");
  EXPECT_EQ(fmt(3L), "3");
  EXPECT_EQ(std::stod(fmt(0.88903835860931331)), 0.88903835860931331);
}

TEST(ExperimentIo, RoundTripBothFormatsWithQuotedCells) {
  Table t;
  t.config = {{"command", "demo"}, {"seed", 7}};
  t.columns = {"instance", "value"};
  t.add_row({"product_sign n=2 S=0,1", "0.5"});
  t.add_row({"say \"hi\"", "1e-300"});
  t.summary = {{"rows", 2}};
  for (auto f : {Format::kCsv, Format::kJson}) {
    std::ostringstream os;
    write_table(os, t, f);
    const Table back = parse(os.str());
    EXPECT_EQ(back.config, t.config);
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(back.summary, t.summary);
    std::ostringstream again;
    write_table(again, back, f);
    EXPECT_EQ(again.str(), os.str());
  }
}

TEST(ExperimentIo, TamperedConfigIsRejected) {
  Table t;
  t.config = {{"command", "demo"}};
  t.columns = {"x"};
  t.add_row({"1"});
  std::ostringstream os;
  write_table(os, t, Format::kCsv);
  std::string s = os.str();
  s.replace(s.find("demo"), 4, "dem0");
  EXPECT_THROW(parse(s), qht::ConfigError);
}

TEST(Cli, OverlapSingleRowAndHeaderHash) {
  const auto r = run_args({"overlap", "--M", "4096", "--n-max", "0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("# {\"config\":", 0), 0u);
  const Table t = parse(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "0");
  EXPECT_GE(std::stod(t.rows[0][1]), 0.6);
  EXPECT_EQ(t.config.at("M"), 4096);
  EXPECT_NE(r.out.find(t.config_hash()), std::string::npos);
}

TEST(Cli, DeterministicOutputFiles) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "qht_cli_a.csv").string(), b = (dir / "qht_cli_b.csv").string();
  for (const auto& p : {a, b}) {
    const auto r = run_args({"sample", "--function", "hermite_sum n=2 terms=1.0:0.8;0.1:0.6",
                             "--samples", "500", "--seed", "42", "--out", p});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  EXPECT_EQ(fnv1a_hex(slurp(a)), fnv1a_hex(slurp(b)));
  const Table t = load_table_file(a);
  EXPECT_EQ(t.config.at("seed"), 42);
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Cli, SeedChangesSamples) {
  const auto a = run_args({"sample", "--function", "hermite_sum n=2 terms=1.0:0.8;0.1:0.6",
                           "--samples", "500", "--seed", "1"});
  const auto b = run_args({"sample", "--function", "hermite_sum n=2 terms=1.0:0.8;0.1:0.6",
                           "--samples", "500", "--seed", "2"});
  EXPECT_NE(parse(a.out).rows, parse(b.out).rows);
}

TEST(Cli, SampleConstantGivesSingleRowAtOrigin) {
  const auto r = run_args({"sample", "--function", "constant n=3", "--samples", "200"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Table t = parse(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][t.column("index")], "0.0.0");
  EXPECT_EQ(t.rows[0][t.column("count")], "200");
}

TEST(Cli, JsonFormatRoundTrips) {
  const auto r = run_args({"overlap", "--M", "4096", "--n-max", "3", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.front(), '{');
  const Table t = parse(r.out);
  EXPECT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.config.at("format"), "json");
}

TEST(Cli, FfErrorZeroTimeAndInfeasibleRows) {
  const auto r = run_args({"ff-error", "--M", "64,4096", "--N", "4", "--t", "0,1"});
  EXPECT_EQ(r.code, kExitInfeasible);
  const Table t = parse(r.out);
  ASSERT_EQ(t.rows.size(), 4u);
  const auto err = t.column("projected_error"), status = t.column("status");
  EXPECT_EQ(t.rows[0][status], "ok");
  EXPECT_LE(std::stod(t.rows[0][err]), 1e-12);
  EXPECT_EQ(t.rows[2][status].rfind("infeasible", 0), 0u);
  EXPECT_EQ(t.rows[2][err], "");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_args({}).code, kExitUsage);
  EXPECT_EQ(run_args({"bogus"}).code, kExitUsage);
  EXPECT_EQ(run_args({"overlap", "--format", "xml"}).code, kExitUsage);
  EXPECT_EQ(run_args({"sample", "--function", "nosuch n=1"}).code, kExitUsage);
  EXPECT_EQ(run_args({"qht", "--calibration", "/nonexistent/qht.cfg"}).code, kExitUsage);
  EXPECT_EQ(run_args({"ggl", "--mode", "psychic"}).code, kExitUsage);
  EXPECT_EQ(run_args({"overlap", "--help"}).code, kExitOk);
}

TEST(Cli, TailsOverBudgetIsInfeasible) {
  const auto r = run_args({"tails", "--M", "16,512", "--t", "6"});
  EXPECT_EQ(r.code, kExitInfeasible);
  const Table t = parse(r.out);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][t.column("status")], "ok");
  EXPECT_GT(std::stod(t.rows[0][t.column("tail_norm")]), 0.0);
}

TEST(Cli, GglSingleInstanceSummary) {
  const auto r = run_args({"ggl", "--function", "product_sign n=2 S=0", "--tau", "0.5",
                           "--trials", "2", "--mode", "quantum", "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Table t = parse(r.out);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.summary.at("success_rate"), 1.0);
}

}  // namespace
}  // namespace qht::cli
