// Copyright 2026 The IntraMix Lab Authors.
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
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int exit_code = -1;
  std::string out;
};

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(INTRAMIX_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("intramix_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string small_data(const std::string& name = "data") {
    const auto path = (dir_ / name).string();
    const auto r = run_cli("gen-data --per-class 60 --p-intra 0.08 --p-inter 0.008 "
                           "--val-size 50 --seed 3 --out " + path);
    EXPECT_EQ(r.exit_code, 0) << r.out;
    return path;
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("").exit_code, 2);
  EXPECT_EQ(run_cli("no-such-command").exit_code, 2);
  EXPECT_EQ(run_cli("run").exit_code, 2);
  EXPECT_EQ(run_cli("run --data " + (dir_ / "missing").string()).exit_code, 2);
  EXPECT_EQ(run_cli("verify-theorems --trials 1000").exit_code, 2);
  EXPECT_EQ(run_cli("verify-theorems --lambda 1.5").exit_code, 2);
  EXPECT_EQ(run_cli("gen-data --classes 0 --out " + (dir_ / "x").string()).exit_code, 2);
  EXPECT_EQ(run_cli("--help").exit_code, 0);
}

TEST_F(Cli, GenDataIsByteIdentical) {
  const auto a = small_data("a");
  const auto b = small_data("b");
  for (const char* f : {"edges.tsv", "features.tsv", "labels.tsv", "splits.json"}) {
    if (!fs::exists(fs::path(a) / f)) continue;
    EXPECT_EQ(slurp(fs::path(a) / f), slurp(fs::path(b) / f)) << f;
  }
  for (const auto& e : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(b) / e.path().filename())) << e.path();
  }
}

TEST_F(Cli, VerifyTheoremsUnitLambda) {
  const auto r = run_cli("verify-theorems --trials 100000 --lambda 1.0");
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["theorem1"].size(), 1u);
  EXPECT_EQ(j["theorem1"][0]["closed_ratio"].get<double>(), 1.0);
  EXPECT_EQ(j["theorem1"][0]["pooled"]["ratio"].get<double>(), 1.0);
  EXPECT_EQ(j["theorem2"]["adjudication"]["verdict"], "derivation");
}

TEST_F(Cli, VerifyTheoremsToleranceFailureExitsThree) {
  const auto r = run_cli("verify-theorems --trials 100000 --eta-grid 1,0.5,0");
  EXPECT_EQ(r.exit_code, 3);
}

TEST_F(Cli, RunShapeAndDeterminism) {
  const auto data = small_data();
  const std::string args = "run --data " + data + " --seeds 2 --epochs 60 --patience 20 --nodes-per-class 10";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.exit_code, 0);
  ASSERT_EQ(b.exit_code, 0);
  auto ja = nlohmann::ordered_json::parse(a.out);
  auto jb = nlohmann::ordered_json::parse(b.out);
  EXPECT_EQ(ja["runs"].size(), 2u);
  EXPECT_EQ(ja["seeds"].size(), 2u);
  EXPECT_TRUE(ja.contains("timing"));
  ja.erase("timing");
  jb.erase("timing");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST_F(Cli, OutFileAndStrategyFlag) {
  const auto data = small_data();
  const auto out = (dir_ / "report.json").string();
  const auto r = run_cli("run --data " + data +
                         " --seeds 1 --epochs 30 --patience 10 --strategy pl_only --out " + out);
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j["command"], "run");
  EXPECT_EQ(run_cli("run --data " + data + " --strategy bogus").exit_code, 2);
}

TEST_F(Cli, SweepLambdaRows) {
  const auto data = small_data();
  const auto r = run_cli("sweep-lambda --data " + data +
                         " --seeds 1 --epochs 30 --patience 10 --nodes-per-class 5 --grid 0.1,0.5");
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["grid"].size(), 2u);
  EXPECT_DOUBLE_EQ(j["grid"][1]["lambda"].get<double>(), 0.5);
}

}  // namespace
