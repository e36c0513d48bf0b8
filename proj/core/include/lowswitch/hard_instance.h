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

#ifndef LOWSWITCH_HARD_INSTANCE_H_
#define LOWSWITCH_HARD_INSTANCE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lowswitch/linear_mdp.h"

namespace lowswitch {

// Combination-lock family with d = 4*d0 and H = 2*H0.
//
// The episode starts at u. On steps 1, 3, 5, ... the agent at u picks one of
// d0 actions a_j (feature e_j) and lands in lock state s_{h,j}. On the next
// step the single action at s_{h,i} (feature e_{2*d0+i}) returns to u when
// i = i_h, enters the reward sink v after the h*-th correct choice, and falls
// into the zero-reward sink w otherwise. v has feature e_{3*d0} and is the
// only rewarding state; w has feature e_{4*d0-1}.
struct HardInstanceParams {
  int d0 = 2;
  int H0 = 1;
  // 1-based lock length in [1, H0]; sampled from the seed when empty.
  std::optional<int> h_star;
  // 0-based correct indices i_1 .. i_{h*}; sampled when empty.
  std::optional<std::vector<int>> correct_actions;
  // Block index used for the literal mu(v) entry at the final lock step.
  int j_star = 1;
  std::uint64_t seed = 0;
};

struct HardInstance {
  LinearMdpSpec spec;
  int d0 = 0;
  int H0 = 0;
  int h_star = 0;
  std::vector<int> correct_actions;
  int j_star = 1;

  static constexpr int kU = 0;
  static constexpr int kV = 1;
  static constexpr int kW = 2;
  static constexpr int kFirstLockState = 3;

  // State id of s_{lock_level, index}; lock_level is 0-based in [0, H0).
  int LockState(int lock_level, int index) const {
    return kFirstLockState + lock_level * d0 + index;
  }
  bool IsLockState(int state) const {
    return state >= kFirstLockState && state < kFirstLockState + H0 * d0;
  }
  // Lock states off the correct path S*.
  bool IsWrongLockState(int state) const;
  int OptimalValue() const { return 2 * H0 - 2 * h_star; }
};

// Throws InvalidArgument on bad parameters and ContractViolation if the
// assembled measures fail the linear-MDP invariants.
HardInstance BuildHardInstance(const HardInstanceParams& params);

// Number of distinct wrong lock states visited across `traces`.
int CountDistinctWrongStates(std::span<const EpisodeTrajectory> traces,
                             const HardInstance& instance);

}  // namespace lowswitch

#endif  // LOWSWITCH_HARD_INSTANCE_H_
