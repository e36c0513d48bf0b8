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

// Command-line experiment runner.
//
//   lowswitch run --config <path> [--output <dir>] [--parallelism N]
//                 [--strict-paper] [--validate-only]
//   lowswitch lemmas --trials N --dim D --seed S
//   lowswitch inspect --spec <path>
//
// Exit codes: 0 success, 1 config error, 2 runtime invariant violation,
// 3 I/O error. LOWSWITCH_LOG sets the log level (trace, debug, info, warn,
// error, off).

#include <cstdlib>
#include <iostream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "lowswitch/covariance.h"
#include "lowswitch/errors.h"
#include "lowswitch/experiment.h"
#include "lowswitch/lemma_checks.h"
#include "lowswitch/linear_mdp.h"
#include "lowswitch/planning.h"
#include "lowswitch/serialization.h"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kInvariantError = 2, kIoError = 3 };

void SetUpLogging() {
  auto logger = spdlog::stderr_color_mt("lowswitch");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("LOWSWITCH_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

int RunCommand(const std::string& config_path, const std::string& output,
               int parallelism, bool strict_paper, bool validate_only) {
  lowswitch::ExperimentConfig config =
      lowswitch::ParseConfig(lowswitch::ReadTextFile(config_path));
  if (!output.empty()) config.output_dir = output;
  if (parallelism > 0) config.parallelism = parallelism;
  if (strict_paper) config.agent.floor_at_zero = false;

  // Building one environment surfaces construction errors before any run.
  lowswitch::BuildEnvironment(config.environment, config.seeds.front());
  if (validate_only) {
    std::cout << lowswitch::ConfigToJson(config).dump(2) << "\n";
    spdlog::info("config OK: {} runs", config.k_schedule.size() * config.seeds.size());
    return kOk;
  }

  spdlog::info("running {} K values x {} seeds on {} thread(s)",
               config.k_schedule.size(), config.seeds.size(), config.parallelism);
  const lowswitch::ExperimentResult result = lowswitch::RunExperiment(config);
  for (const auto& run : result.runs) {
    spdlog::debug("K={} seed={} regret={} switches={} ({:.3f}s)",
                  run.num_episodes, run.seed, run.trace.CumulativeRegret(),
                  run.report.global_switches, run.trace.wall_time_seconds);
  }
  lowswitch::WriteExperimentOutputs(result, config.output_dir);
  spdlog::info("wrote {} trace files to {}", result.runs.size(), config.output_dir);
  return kOk;
}

int LemmasCommand(int trials, int dim, std::uint64_t seed) {
  const lowswitch::DetGrowthSweep sweep =
      lowswitch::RunDetGrowthSweep(trials, dim, seed);
  std::cout << "det-growth: trials=" << sweep.trials
            << " switch_instances=" << sweep.switch_instances
            << " failures=" << sweep.failures
            << " min_gap=" << lowswitch::FormatDouble(sweep.min_gap)
            << " (log 2 = " << lowswitch::FormatDouble(std::log(2.0)) << ")\n";
  constexpr int kUpdates = 10000;
  const lowswitch::LogdetBound bound =
      lowswitch::CheckLogdetBound(dim, kUpdates, seed);
  std::cout << "logdet-bound: K=" << kUpdates
            << " logdet=" << lowswitch::FormatDouble(bound.logdet)
            << " bound=" << lowswitch::FormatDouble(bound.bound)
            << (bound.holds ? " OK" : " VIOLATED") << "\n";
  return sweep.failures == 0 && bound.holds ? kOk : kInvariantError;
}

int InspectCommand(const std::string& spec_path) {
  const lowswitch::LinearMdp mdp(lowswitch::LoadSpecFile(spec_path));
  const lowswitch::ValueTables optimal = lowswitch::OptimalValues(mdp);
  int max_actions = 0;
  for (int x = 0; x < mdp.num_states(); ++x) {
    max_actions = std::max(max_actions, mdp.num_actions(x));
  }
  std::cout << "valid linear MDP\n"
            << "  d             = " << mdp.dim() << "\n"
            << "  H             = " << mdp.horizon() << "\n"
            << "  states        = " << mdp.num_states() << "\n"
            << "  (x, a) pairs  = " << mdp.num_pairs() << "\n"
            << "  max actions   = " << max_actions << "\n"
            << "  initial state = " << mdp.initial_state() << "\n"
            << "  V_1*(x_1)     = "
            << lowswitch::FormatDouble(optimal.V(0, mdp.initial_state())) << "\n";
  if (mdp.spec().metadata.contains("hard_instance_meta")) {
    std::cout << "hard_instance_meta:\n"
              << mdp.spec().metadata["hard_instance_meta"].dump(2) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  SetUpLogging();
  CLI::App app{"Low-switching-cost LSVI experiments on episodic linear MDPs"};
  app.require_subcommand(1);

  std::string config_path, output;
  int parallelism = 0;
  bool strict_paper = false, validate_only = false;
  CLI::App* run = app.add_subcommand("run", "Execute an experiment config");
  run->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  run->add_option("--output", output, "Override output_dir");
  run->add_option("--parallelism", parallelism, "Override parallelism")
      ->check(CLI::PositiveNumber);
  run->add_flag("--strict-paper", strict_paper,
                "Clip Q estimates only above (no floor at 0)");
  run->add_flag("--validate-only", validate_only,
                "Parse and validate the config, then exit");

  int trials = 1000, dim = 4;
  std::uint64_t seed = 0;
  CLI::App* lemmas =
      app.add_subcommand("lemmas", "Log-determinant property sweep");
  lemmas->add_option("--trials", trials, "Random instances")
      ->check(CLI::NonNegativeNumber);
  lemmas->add_option("--dim", dim, "Feature dimension")->check(CLI::PositiveNumber);
  lemmas->add_option("--seed", seed, "Random seed");

  std::string spec_path;
  CLI::App* inspect = app.add_subcommand("inspect", "Validate and summarize a spec file");
  inspect->add_option("--spec", spec_path, "Spec file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      return RunCommand(config_path, output, parallelism, strict_paper, validate_only);
    }
    if (*lemmas) return LemmasCommand(trials, dim, seed);
    if (*inspect) return InspectCommand(spec_path);
  } catch (const lowswitch::InvalidArgument& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const lowswitch::IoError& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  } catch (const lowswitch::Error& e) {
    spdlog::error("{}", e.what());
    return kInvariantError;
  }
  return kOk;
}
