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

#ifndef LOWSWITCH_SERIALIZATION_H_
#define LOWSWITCH_SERIALIZATION_H_

#include <string>

#include <nlohmann/json.hpp>

#include "lowswitch/linear_mdp.h"
#include "lowswitch/metrics.h"
#include "lowswitch/trace.h"

namespace lowswitch {

inline constexpr int kSpecVersion = 1;

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);

// {"spec_version": 1, "d", "H", "n_states", "actions_per_state",
//  "features": [state][action][d], "measures": [level][state][d],
//  "reward_vecs": [level][d], "initial_state"} plus "hard_instance_meta"
// when the spec carries one.
nlohmann::json SpecToJson(const LinearMdpSpec& spec);
// Strict: unknown keys and a wrong spec_version are rejected. Does not run
// the linear-MDP invariant checks; construct a LinearMdp for that.
LinearMdpSpec SpecFromJson(const nlohmann::json& json);

LinearMdpSpec LoadSpecFile(const std::string& path);
void SaveSpecFile(const std::string& path, const LinearMdpSpec& spec);

// episode,return,regret_increment,cumulative_regret,switched,snapshot_id,
// logdet_h1,...,logdet_hH; every line ends in '\n'.
std::string TraceToCsv(const RunTrace& trace);

nlohmann::json AgentConfigToJson(const AgentConfig& config);
nlohmann::json RunSummaryJson(const RunTrace& trace, const SwitchReport& report);

void WriteTextFile(const std::string& path, const std::string& contents);
std::string ReadTextFile(const std::string& path);

}  // namespace lowswitch

#endif  // LOWSWITCH_SERIALIZATION_H_
