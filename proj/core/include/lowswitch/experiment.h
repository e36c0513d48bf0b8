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

#ifndef LOWSWITCH_EXPERIMENT_H_
#define LOWSWITCH_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "lowswitch/agent.h"
#include "lowswitch/linear_mdp.h"
#include "lowswitch/metrics.h"
#include "lowswitch/trace.h"

namespace lowswitch {

inline constexpr int kConfigVersion = 1;

// Environment seeds default to the run seed, so each replicate draws a fresh
// random instance unless the config pins one.
struct TabularRandomEnv {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  double sparsity = 1.0;
  std::optional<std::uint64_t> seed;
};

struct LinearRandomEnv {
  int dim = 0;
  int horizon = 0;
  int num_states = 0;
  int num_actions = 2;
  std::optional<std::uint64_t> seed;
};

struct HardInstanceEnv {
  int d0 = 0;
  int H0 = 0;
  std::optional<int> h_star;
  std::optional<std::vector<int>> correct_actions;
  int j_star = 1;
  std::optional<std::uint64_t> seed;
};

struct FromFileEnv {
  std::string path;
};

using EnvironmentConfig =
    std::variant<TabularRandomEnv, LinearRandomEnv, HardInstanceEnv, FromFileEnv>;

struct ExperimentConfig {
  EnvironmentConfig environment;
  // num_episodes is overwritten by each K_schedule entry.
  AgentConfig agent;
  std::vector<int> k_schedule;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "lowswitch_out";
  int parallelism = 1;
};

// Strict JSON parse; unknown keys are rejected and errors name the field
// path. Throws InvalidArgument.
ExperimentConfig ParseConfig(std::string_view text);
nlohmann::json ConfigToJson(const ExperimentConfig& config);

LinearMdp BuildEnvironment(const EnvironmentConfig& environment,
                           std::uint64_t run_seed);

struct RunResult {
  int num_episodes = 0;
  std::uint64_t seed = 0;
  RunTrace trace;
  SwitchReport report;
  std::string csv;

  std::string TraceFileName() const;
};

struct ExperimentResult {
  std::vector<RunResult> runs;  // K-major, then seed, in config order
  nlohmann::json summary;
  nlohmann::json scaling;
};

// Executes |K_schedule| x |seeds| independent runs on up to `parallelism`
// threads. Every trace is validated before it is returned.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options = {});

// trace_K<K>_seed<seed>.csv per run, summary.json and scaling_fit.json.
void WriteExperimentOutputs(const ExperimentResult& result,
                            const std::string& output_dir);

}  // namespace lowswitch

#endif  // LOWSWITCH_EXPERIMENT_H_
