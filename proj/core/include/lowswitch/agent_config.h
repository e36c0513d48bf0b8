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

#ifndef LOWSWITCH_AGENT_CONFIG_H_
#define LOWSWITCH_AGENT_CONFIG_H_

#include <optional>
#include <string>

#include "lowswitch/covariance.h"

namespace lowswitch {

enum class AgentMode { kLowSwitch, kAlwaysSwitch };

std::string ToString(AgentMode mode);
// Accepts "low_switch" and "always_switch".
AgentMode ParseAgentMode(const std::string& name);

struct AgentConfig {
  double lambda = 1.0;
  // Explicit bonus scale; empty means c_beta * d * H * sqrt(iota).
  std::optional<double> beta;
  double c_beta = 1.0;
  double p = 0.05;
  AgentMode mode = AgentMode::kLowSwitch;
  // Planned episode count K (enters iota = log(2 d K H / p)).
  int num_episodes = 1;
  // Floor Q estimates at 0 in addition to the clip at H.
  bool floor_at_zero = true;
  // Debug: recompute the estimate every episode even when the deployed policy
  // stays frozen.
  bool recompute_every_episode = false;
  int refactor_period = kDefaultRefactorPeriod;
};

}  // namespace lowswitch

#endif  // LOWSWITCH_AGENT_CONFIG_H_
