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

#ifndef LOWSWITCH_TRACE_H_
#define LOWSWITCH_TRACE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "lowswitch/agent_config.h"
#include "lowswitch/linear_mdp.h"
#include "lowswitch/planning.h"

namespace lowswitch {

struct EpisodeRecord {
  int episode = 0;  // 1-based
  double episode_return = 0.0;
  // V_1*(x_1) - V_1^{pi_k}(x_1), evaluated exactly.
  double regret_increment = 0.0;
  double cumulative_regret = 0.0;
  // Deployed snapshot changed relative to the previous episode.
  bool switched = false;
  std::int64_t snapshot_id = 0;
  // Per-level log det Lambda_h after absorbing this episode.
  std::vector<double> logdets;
  // Greedy action map differs from the previous episode's.
  bool behavioral_switch = false;
  // Number of (level, state) pairs whose action changed; 0 when local
  // switching is not tracked.
  std::int64_t local_switch_delta = 0;
};

struct RunTrace {
  std::vector<EpisodeRecord> episodes;
  AgentConfig config;
  double beta = 0.0;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;

  int dim = 0;
  int horizon = 0;
  int num_states = 0;
  std::vector<double> initial_logdets;
  bool local_tracked = false;

  // Executed-step checks of ref^{-1} <= 2 cur^{-1} along the taken feature.
  std::int64_t domination_checks = 0;
  std::int64_t domination_violations = 0;
  // max over steps of phi^T ref^{-1} phi - 2 phi^T cur^{-1} phi.
  double worst_domination_gap = -1e300;
  // Switches whose triggering level gained less than log 2 in log det.
  std::int64_t det_growth_checks = 0;
  std::int64_t det_growth_violations = 0;

  // One greedy table per snapshot id when local switching is tracked.
  std::vector<DeterministicPolicy> snapshot_policies;
  std::vector<EpisodeTrajectory> trajectories;

  int num_episodes() const { return static_cast<int>(episodes.size()); }
  std::vector<std::int64_t> SnapshotIds() const;
  double CumulativeRegret() const {
    return episodes.empty() ? 0.0 : episodes.back().cumulative_regret;
  }
};

// Throws ContractViolation if cumulative regret decreases, switch flags
// disagree with snapshot-id changes, or a level's log det decreases.
void ValidateTrace(const RunTrace& trace);

}  // namespace lowswitch

#endif  // LOWSWITCH_TRACE_H_
