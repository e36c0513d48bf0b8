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

#ifndef LOWSWITCH_METRICS_H_
#define LOWSWITCH_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lowswitch/planning.h"
#include "lowswitch/trace.h"

namespace lowswitch {

inline constexpr std::int64_t kDefaultLocalSwitchCap = 100000;

// Number of adjacent episode pairs whose deployed snapshot ids differ.
std::int64_t GlobalSwitchingCost(std::span<const std::int64_t> snapshot_ids);

// Sum over adjacent episodes of the number of (level, state) pairs whose
// action differs. Throws InvalidArgument when H * |S| exceeds `cap` or when
// the policies disagree in shape.
std::int64_t LocalSwitchingCost(std::span<const DeterministicPolicy> per_episode,
                                std::int64_t cap = kDefaultLocalSwitchCap);

struct SwitchReport {
  std::int64_t global_switches = 0;
  // Adjacent episodes whose greedy action maps differ.
  std::int64_t behavioral_switches = 0;
  std::optional<std::int64_t> local_switches;
  std::vector<bool> switched;
  // global_switches / (d * H * log K); 0 when there are no switches.
  double bound_ratio = 0.0;
};

SwitchReport MakeSwitchReport(const RunTrace& trace);

// behavioral <= local <= |S| * H * behavioral. With snapshot identity the
// upper half also holds for global_switches, but the lower half need not:
// a refresh can reproduce the previous action map.
bool SandwichHolds(const SwitchReport& report, int num_states, int horizon);

struct ScalingPoint {
  double episodes;
  double value;
};

struct ScalingFit {
  int num_points = 0;
  // value ~ log_intercept + log_slope * log K.
  double log_intercept = 0.0;
  double log_slope = 0.0;
  double log_rmse = 0.0;
  // log(value) ~ log(power_coef) + power_slope * log K; only when every
  // value is positive.
  bool power_valid = false;
  double power_coef = 0.0;
  double power_slope = 0.0;
  double power_rmse = 0.0;
};

// Ordinary least squares on both functional forms. Needs >= 3 points and at
// least two distinct K.
ScalingFit FitScaling(std::span<const ScalingPoint> points);

struct ReplicateSummary {
  int num_runs = 0;
  std::vector<double> mean_cumulative_regret;
  // Standard error of the mean (sample sd / sqrt(n)); zero for n = 1.
  std::vector<double> stderr_cumulative_regret;
  std::int64_t min_switches = 0;
  double median_switches = 0.0;
  std::int64_t max_switches = 0;
  double mean_bound_ratio = 0.0;
};

// Traces must share configuration, dimensions and episode count.
ReplicateSummary ReplicateStats(std::span<const RunTrace> traces);

}  // namespace lowswitch

#endif  // LOWSWITCH_METRICS_H_
