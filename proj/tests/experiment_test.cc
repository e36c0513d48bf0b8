// Copyright 2026 The LowSwitch Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "lowswitch/experiment.h"

#include <chrono>
#include <filesystem>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "lowswitch/errors.h"
#include "lowswitch/generators.h"
#include "lowswitch/hard_instance.h"
#include "lowswitch/serialization.h"

namespace lowswitch {
namespace {

namespace fs = std::filesystem;

constexpr char kMinimalConfig[] = R"({
  "environment": {"tabular_random": {"S": 2, "A": 2, "H": 2, "sparsity": 1.0}},
  "K_schedule": [100],
  "seeds": [0]
})";

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("lowswitch_" + name);
  fs::remove_all(dir);
  return dir;
}

int CountLines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

TEST(ParseConfigTest, MinimalConfigGetsDefaults) {
  const ExperimentConfig config = ParseConfig(kMinimalConfig);
  const auto& env = std::get<TabularRandomEnv>(config.environment);
  EXPECT_EQ(env.num_states, 2);
  EXPECT_EQ(env.sparsity, 1.0);
  EXPECT_EQ(config.agent.lambda, 1.0);
  EXPECT_EQ(config.agent.p, 0.05);
  EXPECT_EQ(config.agent.c_beta, 1.0);
  EXPECT_EQ(config.agent.mode, AgentMode::kLowSwitch);
  EXPECT_FALSE(config.agent.beta.has_value());
  EXPECT_TRUE(config.agent.floor_at_zero);
  EXPECT_EQ(config.k_schedule, std::vector<int>{100});
  EXPECT_EQ(config.parallelism, 1);
}

TEST(ParseConfigTest, UnknownKeyIsNamed) {
  const std::string text = R"({
    "environment": {"tabular_random": {"S": 2, "A": 2, "H": 2}},
    "agent": {"betaa": 3},
    "K_schedule": [100], "seeds": [0]})";
  try {
    ParseConfig(text);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("betaa"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("agent"), std::string::npos) << e.what();
  }
}

TEST(ParseConfigTest, RejectsInvalidValues) {
  auto with_agent = [](const std::string& agent) {
    return R"({"environment": {"tabular_random": {"S": 2, "A": 2, "H": 2}},
              "agent": )" + agent + R"(, "K_schedule": [10], "seeds": [0]})";
  };
  EXPECT_THROW(ParseConfig(with_agent(R"({"lambda": 0})")), InvalidArgument);
  EXPECT_THROW(ParseConfig(with_agent(R"({"p": 1.5})")), InvalidArgument);
  EXPECT_THROW(ParseConfig(with_agent(R"({"beta": "big"})")), InvalidArgument);
  EXPECT_THROW(ParseConfig(with_agent(R"({"mode": "sometimes"})")), InvalidArgument);
  EXPECT_THROW(ParseConfig("{not json"), InvalidArgument);
  EXPECT_THROW(ParseConfig(R"({"environment": {"tabular_random": {"S": 2, "A": 2, "H": 2}},
                               "K_schedule": [], "seeds": [0]})"),
               InvalidArgument);
  EXPECT_THROW(ParseConfig(R"({"environment": {"maze": {}}, "K_schedule": [1], "seeds": [0]})"),
               InvalidArgument);
  const ExperimentConfig fixed = ParseConfig(with_agent(
      R"({"beta": 0.5, "mode": "always_switch", "strict_paper": true})"));
  EXPECT_EQ(fixed.agent.beta, 0.5);
  EXPECT_EQ(fixed.agent.mode, AgentMode::kAlwaysSwitch);
  EXPECT_FALSE(fixed.agent.floor_at_zero);
}

TEST(ParseConfigTest, RoundTripsThroughJson) {
  const std::string text = R"({
    "version": 1,
    "environment": {"hard_instance": {"d0": 4, "H0": 2, "h_star": 2, "j_star": 0}},
    "agent": {"c_beta": 0.1, "refactor_period": 64},
    "K_schedule": [10, 20], "seeds": [3, 4], "output_dir": "out", "parallelism": 2})";
  const ExperimentConfig config = ParseConfig(text);
  const ExperimentConfig again = ParseConfig(ConfigToJson(config).dump());
  EXPECT_EQ(ConfigToJson(config), ConfigToJson(again));
  const auto& env = std::get<HardInstanceEnv>(again.environment);
  EXPECT_EQ(env.h_star, 2);
  EXPECT_EQ(env.j_star, 0);
}

TEST(SerializationTest, SpecRoundTrip) {
  const HardInstance inst = BuildHardInstance({.d0 = 2, .H0 = 2, .h_star = 1, .seed = 3});
  const fs::path dir = TempDir("spec");
  fs::create_directories(dir);
  const std::string path = (dir / "spec.json").string();
  SaveSpecFile(path, inst.spec);
  const LinearMdpSpec loaded = LoadSpecFile(path);
  EXPECT_EQ(SpecToJson(loaded), SpecToJson(inst.spec));
  EXPECT_EQ(loaded.metadata["hard_instance_meta"]["h_star"], 1);
  EXPECT_THROW(LoadSpecFile((dir / "missing.json").string()), IoError);
  nlohmann::json broken = SpecToJson(inst.spec);
  broken["extra"] = 1;
  EXPECT_THROW(SpecFromJson(broken), InvalidArgument);
}

TEST(SerializationTest, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(2.0), "2");
  EXPECT_EQ(std::stod(FormatDouble(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(RunExperimentTest, SmokeRunWritesTenRows) {
  ExperimentConfig config = ParseConfig(R"({
    "environment": {"tabular_random": {"S": 2, "A": 2, "H": 2, "sparsity": 1.0}},
    "K_schedule": [10], "seeds": [0]})");
  config.output_dir = TempDir("smoke").string();
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult result = RunExperiment(config);
  WriteExperimentOutputs(result, config.output_dir);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
            1.0);
  const std::string csv =
      ReadTextFile((fs::path(config.output_dir) / "trace_K10_seed0.csv").string());
  EXPECT_EQ(CountLines(csv), 11);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "episode,return,regret_increment,cumulative_regret,switched,"
            "snapshot_id,logdet_h1,logdet_h2");
  EXPECT_EQ(csv.back(), '\n');
  EXPECT_TRUE(fs::exists(fs::path(config.output_dir) / "summary.json"));
  const nlohmann::json scaling = nlohmann::json::parse(
      ReadTextFile((fs::path(config.output_dir) / "scaling_fit.json").string()));
  EXPECT_EQ(scaling["status"], "insufficient_points");
}

TEST(RunExperimentTest, NineRunsAndScalingFit) {
  ExperimentConfig config = ParseConfig(R"({
    "environment": {"tabular_random": {"S": 2, "A": 2, "H": 2}},
    "agent": {"c_beta": 0.05},
    "K_schedule": [500, 1000, 2000], "seeds": [1, 2, 3], "parallelism": 3})");
  config.output_dir = TempDir("nine").string();
  const ExperimentResult result = RunExperiment(config);
  WriteExperimentOutputs(result, config.output_dir);
  int traces = 0;
  for (const auto& entry : fs::directory_iterator(config.output_dir)) {
    traces += entry.path().extension() == ".csv";
  }
  EXPECT_EQ(traces, 9);
  EXPECT_EQ(result.scaling["status"], "ok");
  EXPECT_EQ(result.scaling["points"].size(), 3u);
  EXPECT_EQ(result.summary["runs"].size(), 9u);
}

TEST(RunExperimentTest, IdenticalConfigsGiveIdenticalCsvs) {
  ExperimentConfig config = ParseConfig(R"({
    "environment": {"linear_random": {"d": 4, "H": 3, "n_states": 5}},
    "agent": {"c_beta": 0.05},
    "K_schedule": [200, 300], "seeds": [7, 8], "parallelism": 2})");
  const ExperimentResult a = RunExperiment(config);
  config.parallelism = 1;
  const ExperimentResult b = RunExperiment(config);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].csv, b.runs[i].csv);
    EXPECT_EQ(a.runs[i].TraceFileName(), b.runs[i].TraceFileName());
  }
}

TEST(RunExperimentTest, FromFileEnvironment) {
  const fs::path dir = TempDir("from_file");
  fs::create_directories(dir);
  const std::string spec_path = (dir / "spec.json").string();
  SaveSpecFile(spec_path, EmbedTabular(RandomTabular(2, 2, 2, 1.0, 1)));
  ExperimentConfig config;
  config.environment = FromFileEnv{spec_path};
  config.k_schedule = {5};
  config.seeds = {0};
  EXPECT_EQ(RunExperiment(config).runs.front().trace.num_episodes(), 5);
  config.environment = FromFileEnv{(dir / "nope.json").string()};
  EXPECT_THROW(RunExperiment(config), IoError);
}

}  // namespace
}  // namespace lowswitch
