// Copyright 2026 The spikecp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "spikecp/io.hpp"
#include "spikecp/sim_lab.hpp"

namespace spikecp {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "spikecp");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string alphas_flag() {
  const auto a = default_spikes(0.5, 0.1);
  return format_double(a[0]) + "," + format_double(a[1]) + "," + format_double(a[2]);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spikecp_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, cli::kExitAccept);
  const Result v = run({"--version"});
  EXPECT_EQ(v.code, cli::kExitAccept);
  EXPECT_FALSE(v.out.empty());
  EXPECT_EQ(run({}).code, cli::kExitError);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitError);
}

TEST_F(CliTest, SimulateThenTestKnownAccepts) {
  ASSERT_EQ(run({"simulate", "--seed", "3", "--out-dir", path("a")}).code, 0);
  const CsvData d = read_csv_file(path("a/data.csv"));
  EXPECT_EQ(d.values.rows(), 200);
  EXPECT_EQ(d.values.cols(), 103);
  const Result r = run({"test", "--input", path("a/data.csv"), "--alphas", alphas_flag(),
                        "--replicates", "2000", "--grid", "60", "--out-dir", path("a")});
  EXPECT_TRUE(r.code == cli::kExitAccept || r.code == cli::kExitReject) << r.err;
  EXPECT_TRUE(fs::exists(path("a/report.json")));
  EXPECT_NE(r.out.find("max-type"), std::string::npos);
}

TEST_F(CliTest, LargeShiftExitsWithReject) {
  ASSERT_EQ(run({"simulate", "--alternative", "alt1", "--delta", "10", "--out-dir",
                 path("b")})
                .code,
            0);
  const Result r = run({"test", "--input", path("b/data.csv"), "--alphas", alphas_flag(),
                        "--replicates", "2000", "--grid", "60", "--out-dir", path("b")});
  EXPECT_EQ(r.code, cli::kExitReject) << r.err;
}

TEST_F(CliTest, EstimatedModeRuns) {
  ASSERT_EQ(run({"simulate", "--initial-rows", "200", "--out-dir", path("c")}).code, 0);
  const Result r = run({"test", "--input", path("c/data.csv"), "--initial",
                        path("c/initial.csv"), "--M", "3", "--replicates", "1000", "--grid",
                        "40", "--out-dir", path("c")});
  EXPECT_TRUE(r.code == cli::kExitAccept || r.code == cli::kExitReject) << r.err;
  EXPECT_NE(slurp(path("c/report.json")).find("\"estimated\""), std::string::npos);
}

TEST_F(CliTest, MalformedCsvNamesTheRow) {
  std::ofstream(path("bad.csv")) << "xi_1,eta_1\n1,2\n3,oops\n";
  const Result r = run({"test", "--input", path("bad.csv"), "--alphas", "30", "--out-dir",
                        path("d")});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  EXPECT_NE(r.err.find("row 2"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"test"}).code, cli::kExitError);
  EXPECT_EQ(run({"simulate", "--n", "abc"}).code, cli::kExitError);
  EXPECT_EQ(run({"simulate", "--alternative", "alt9", "--out-dir", path("e")}).code,
            cli::kExitError);
  EXPECT_EQ(run({"test", "--input", path("missing.csv"), "--alphas", "30"}).code,
            cli::kExitError);
}

TEST_F(CliTest, ConfigFileAndPrecedence) {
  std::ofstream(path("cfg.json")) << R"({"n": 60, "p": 20, "seed": 9})";
  ASSERT_EQ(run({"simulate", "--config", path("cfg.json"), "--p", "30", "--out-dir",
                 path("f")})
                .code,
            0);
  const CsvData d = read_csv_file(path("f/data.csv"));
  EXPECT_EQ(d.values.rows(), 60);
  EXPECT_EQ(d.values.cols(), 33);

  std::ofstream(path("bad.json")) << R"({"n": 60, "colour": "red"})";
  const Result r = run({"simulate", "--config", path("bad.json"), "--out-dir", path("g")});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("colour"), std::string::npos);
}

TEST_F(CliTest, ArtifactsAreByteIdenticalAcrossRunsAndThreads) {
  const std::vector<std::string> base = {"power",        "--n",         "60",
                                         "--p",          "20",          "--replicates",
                                         "12",           "--deltas",    "0,8",
                                         "--alternatives", "alt1",      "--grid",
                                         "30",           "--quantile-replicates", "1000"};
  auto with = [&](const std::string& dir, const std::string& threads) {
    auto a = base;
    a.insert(a.end(), {"--threads", threads, "--out-dir", path(dir)});
    return a;
  };
  ASSERT_EQ(run(with("p1", "1")).code, 0);
  ASSERT_EQ(run(with("p2", "1")).code, 0);
  ASSERT_EQ(run(with("p3", "3")).code, 0);
  for (const char* f : {"power.csv", "power.svg"}) {
    const std::string a = slurp(dir_ / "p1" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "p2" / f)) << f;
    EXPECT_EQ(a, slurp(dir_ / "p3" / f)) << f;
  }
}

TEST_F(CliTest, QuantilesTableReusedByTest) {
  ASSERT_EQ(run({"simulate", "--out-dir", path("h")}).code, 0);
  ASSERT_EQ(run({"quantiles", "--alphas", alphas_flag(), "--y", "0.5", "--levels", "0.95",
                 "--grid", "40", "--replicates", "1000", "--out-dir", path("h")})
                .code,
            0);
  const Result r = run({"test", "--input", path("h/data.csv"), "--alphas", alphas_flag(),
                        "--quantiles", path("h/quantiles.json"), "--out-dir", path("h")});
  EXPECT_TRUE(r.code == cli::kExitAccept || r.code == cli::kExitReject) << r.err;
  // A table for other spikes is refused.
  const Result bad = run({"test", "--input", path("h/data.csv"), "--alphas", "40,9,5",
                          "--quantiles", path("h/quantiles.json"), "--out-dir", path("h")});
  EXPECT_EQ(bad.code, cli::kExitError);
}

TEST_F(CliTest, KernelCommand) {
  const Result r = run({"kernel", "--alphas", "20,8", "--y", "0.5", "--s", "0.5", "--t", "1",
                        "--k", "1", "--k2", "1", "--out-dir", path("k")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("k/kernel.json")));
}

}  // namespace
}  // namespace spikecp
