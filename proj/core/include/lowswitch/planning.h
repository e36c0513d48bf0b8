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

#ifndef LOWSWITCH_PLANNING_H_
#define LOWSWITCH_PLANNING_H_

#include <vector>

#include <Eigen/Dense>

#include "lowswitch/linear_mdp.h"

namespace lowswitch {

// Exact value and action-value tables; v has horizon+1 levels with v[H] = 0.
// q[h] is indexed by LinearMdp::PairIndex.
struct ValueTables {
  std::vector<Eigen::VectorXd> v;
  std::vector<Eigen::VectorXd> q;

  double V(int level, int state) const { return v[level](state); }
};

inline constexpr int kUndefinedAction = -1;

// Deterministic non-stationary policy, one action per (level, state).
class DeterministicPolicy {
 public:
  DeterministicPolicy() = default;
  DeterministicPolicy(int horizon, int num_states)
      : horizon_(horizon),
        num_states_(num_states),
        actions_(static_cast<std::size_t>(horizon) * num_states,
                 kUndefinedAction) {}

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int Action(int level, int state) const {
    return actions_[Index(level, state)];
  }
  void Set(int level, int state, int action) {
    actions_[Index(level, state)] = action;
  }
  const std::vector<int>& actions() const { return actions_; }

  bool operator==(const DeterministicPolicy&) const = default;

 private:
  std::size_t Index(int level, int state) const {
    return static_cast<std::size_t>(level) * num_states_ + state;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  std::vector<int> actions_;
};

// Backward induction for V* and Q*; ties in max_a go to the lowest action.
ValueTables OptimalValues(const LinearMdp& mdp);

// Greedy policy with respect to q (lowest action id on ties).
DeterministicPolicy GreedyPolicy(const LinearMdp& mdp, const ValueTables& values);

// reachable[h][x] is true if x can be occupied at level h under `policy`
// starting from `start_state`.
std::vector<std::vector<bool>> ReachableStates(const LinearMdp& mdp,
                                               const DeterministicPolicy& policy,
                                               int start_state);

// Exact Bellman evaluation of a fixed deterministic policy. The policy may be
// undefined only at (level, state) pairs unreachable from `start_state`
// (values there are reported as 0); otherwise throws ContractViolation.
ValueTables PolicyValue(const LinearMdp& mdp, const DeterministicPolicy& policy,
                        int start_state);
ValueTables PolicyValue(const LinearMdp& mdp, const DeterministicPolicy& policy);

}  // namespace lowswitch

#endif  // LOWSWITCH_PLANNING_H_
