// Copyright 2026 The sensorplace Authors.
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

// Drives the built executable through the shell.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "fixtures.h"
#include "oracles.h"

namespace sensorplace {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;  // stdout and stderr
};

Outcome run(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "sensorplace_cli_test.log";
  const std::string cmd =
      std::string(SENSORPLACE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = oracle::read_file(log);
  return r;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

// A small synthetic bundle shared by the tests below.
const fs::path& city() {
  static const fs::path dir = [] {
    const auto d = oracle::scratch_dir("cli_city");
    const Outcome r = run("synth --width 5 --height 5 --days 14 --seed 3 --out " + (d / "b").string());
    EXPECT_EQ(r.code, 0) << r.out;
    return d / "b";
  }();
  return dir;
}

TEST(Cli, ValidateMinimalBundle) {
  const auto bundle = fixture::minimal_bundle("cli_validate");
  const Outcome r = run("validate " + bundle.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "\"segments\": 2")) << r.out;
}

TEST(Cli, ValidationErrorsExitOne) {
  const auto bundle = fixture::minimal_bundle("cli_invalid");
  oracle::write_file(bundle / "observations.csv", "segment_id,date,count\n999,2023-05-01,3\n");
  const Outcome r = run("validate " + bundle.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "999")) << r.out;
  EXPECT_EQ(run("validate " + (bundle / "nowhere").string()).code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  const Outcome unknown = run("validate --frobnicate");
  EXPECT_EQ(unknown.code, 2);
  EXPECT_TRUE(contains(unknown.out, "Usage")) << unknown.out;
  EXPECT_EQ(run("").code, 2);
  const Outcome no_seed = run("place --bundle " + city().string() +
                          " --strategy dispersion --budget 3 --out /tmp/x.json");
  EXPECT_EQ(no_seed.code, 2);
  EXPECT_TRUE(contains(no_seed.out, "--seed")) << no_seed.out;
  const Outcome over = run("place --bundle " + city().string() +
                       " --strategy dispersion --budget 100000 --seed 1 --out /tmp/x.json");
  EXPECT_EQ(over.code, 2) << over.out;
}

TEST(Cli, PlaceIsDeterministic) {
  const auto dir = oracle::scratch_dir("cli_place");
  const std::string cmd = "place --bundle " + city().string() +
                          " --strategy dispersion --budget 3 --seed 7 --out " +
                          (dir / "p.json").string();
  ASSERT_EQ(run(cmd).code, 0);
  const std::string placement = oracle::read_file(dir / "p.json");
  const std::string effective = oracle::read_file(dir / "effective_config.json");
  ASSERT_EQ(run(cmd).code, 0);
  EXPECT_EQ(oracle::read_file(dir / "p.json"), placement);
  EXPECT_EQ(oracle::read_file(dir / "effective_config.json"), effective);
  EXPECT_TRUE(contains(placement, "\"selected\""));
  EXPECT_TRUE(contains(effective, "\"seed\": 7"));
}

TEST(Cli, PlanAndEvaluate) {
  const auto dir = oracle::scratch_dir("cli_eval");
  const std::string bundle = " --bundle " + city().string() + " --seed 2";
  ASSERT_EQ(run("place" + bundle + " --strategy closeness --budget 6 --out " +
                (dir / "p.json").string()).code,
            0);
  const Outcome plan = run("plan" + bundle + " --placement " + (dir / "p.json").string() +
                       " --scheme rotating:2 --days 8 --out " + (dir / "plan.csv").string());
  ASSERT_EQ(plan.code, 0) << plan.out;
  EXPECT_TRUE(contains(oracle::read_file(dir / "plan.csv"), "segment_id,date,scheme,seed"));
  const Outcome perm = run("evaluate" + bundle + " --trees 10 --placement " + (dir / "p.json").string());
  EXPECT_EQ(perm.code, 0) << perm.out;
  EXPECT_TRUE(contains(perm.out, "MAE")) << perm.out;
  const Outcome temp = run("evaluate" + bundle + " --trees 10 --placement " +
                       (dir / "p.json").string() + " --plan " + (dir / "plan.csv").string() +
                       " --out " + (dir / "result.json").string());
  EXPECT_EQ(temp.code, 0) << temp.out;
  EXPECT_TRUE(contains(oracle::read_file(dir / "result.json"), "RMSE"));
}

TEST(Cli, BenchAndReport) {
  const auto dir = oracle::scratch_dir("cli_bench");
  oracle::write_file(dir / "spatial.json",
                     "{\"bundle\": \"" + city().string() +
                         "\", \"budgets\": [4], \"strategies\": [\"dispersion\"],"
                         " \"seeds\": [1], \"random_repetitions\": 5,"
                         " \"regressor\": {\"n_trees\": 10, \"max_depth\": 3}}");
  const Outcome bench = run("bench spatial --config " + (dir / "spatial.json").string() + " --out " +
                        (dir / "out").string() + " --plots");
  ASSERT_EQ(bench.code, 0) << bench.out;
  EXPECT_TRUE(fs::exists(dir / "out" / "report.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
  const Outcome report = run("report --in " + (dir / "out" / "report.csv").string() + " --plots --out " +
                         (dir / "plots").string());
  EXPECT_EQ(report.code, 0) << report.out;
  EXPECT_TRUE(contains(report.out, "dispersion")) << report.out;
  EXPECT_TRUE(fs::exists(dir / "plots" / "spatial_MAE.svg"));
}

TEST(Cli, BenchUnknownStrategyEchoesName) {
  const auto dir = oracle::scratch_dir("cli_bench_bad");
  oracle::write_file(dir / "spatial.json",
                     "{\"bundle\": \"" + city().string() +
                         "\", \"budgets\": [4], \"strategies\": [\"crystal_ball\"], \"seeds\": [1]}");
  const Outcome r = run("bench spatial --config " + (dir / "spatial.json").string() + " --out " +
                    (dir / "out").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "crystal_ball")) << r.out;
}

TEST(Cli, HelpListsEveryFlagUsedInTests) {
  const std::map<std::string, std::vector<std::string>> flags = {
      {"synth", {"--width", "--height", "--days", "--seed", "--out"}},
      {"place", {"--bundle", "--strategy", "--budget", "--seed", "--out", "--initial", "--trees"}},
      {"plan", {"--bundle", "--seed", "--placement", "--scheme", "--days", "--out"}},
      {"evaluate", {"--bundle", "--seed", "--trees", "--placement", "--plan", "--out"}},
      {"bench", {"--config", "--out", "--plots", "--seed", "--fast"}},
      {"report", {"--in", "--plots", "--out"}},
  };
  for (const auto& [cmd, list] : flags) {
    const Outcome r = run(cmd + " --help");
    EXPECT_EQ(r.code, 0) << cmd;
    for (const auto& f : list) EXPECT_TRUE(contains(r.out, f)) << cmd << " " << f;
  }
}

}  // namespace
}  // namespace sensorplace
