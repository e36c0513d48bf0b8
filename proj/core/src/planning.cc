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

#include "lowswitch/planning.h"

#include <sstream>

#include "lowswitch/errors.h"

namespace lowswitch {
namespace {

double Backup(const LinearMdp& mdp, int h, int x, int a,
              const Eigen::VectorXd& next_v) {
  const auto probs = mdp.Transition(h, x, a);
  double expected = 0.0;
  for (std::size_t y = 0; y < probs.size(); ++y) {
    if (probs[y] > 0.0) expected += probs[y] * next_v(static_cast<int>(y));
  }
  return mdp.Reward(h, x, a) + expected;
}

void CheckPolicyShape(const LinearMdp& mdp, const DeterministicPolicy& policy) {
  if (policy.horizon() != mdp.horizon() ||
      policy.num_states() != mdp.num_states()) {
    throw InvalidArgument("policy shape does not match the MDP");
  }
}

}  // namespace

ValueTables OptimalValues(const LinearMdp& mdp) {
  const int horizon = mdp.horizon();
  ValueTables out;
  out.v.assign(horizon + 1, Eigen::VectorXd::Zero(mdp.num_states()));
  out.q.assign(horizon, Eigen::VectorXd::Zero(mdp.num_pairs()));
  for (int h = horizon - 1; h >= 0; --h) {
    for (int x = 0; x < mdp.num_states(); ++x) {
      double best = 0.0;
      for (int a = 0; a < mdp.num_actions(x); ++a) {
        const double q = Backup(mdp, h, x, a, out.v[h + 1]);
        out.q[h](mdp.PairIndex(x, a)) = q;
        if (a == 0 || q > best) best = q;
      }
      out.v[h](x) = best;
    }
  }
  return out;
}

DeterministicPolicy GreedyPolicy(const LinearMdp& mdp, const ValueTables& values) {
  DeterministicPolicy policy(mdp.horizon(), mdp.num_states());
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (int x = 0; x < mdp.num_states(); ++x) {
      int best_a = 0;
      double best = values.q[h](mdp.PairIndex(x, 0));
      for (int a = 1; a < mdp.num_actions(x); ++a) {
        const double q = values.q[h](mdp.PairIndex(x, a));
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      policy.Set(h, x, best_a);
    }
  }
  return policy;
}

std::vector<std::vector<bool>> ReachableStates(const LinearMdp& mdp,
                                               const DeterministicPolicy& policy,
                                               int start_state) {
  CheckPolicyShape(mdp, policy);
  mdp.CheckState(start_state);
  std::vector<std::vector<bool>> reachable(
      mdp.horizon() + 1, std::vector<bool>(mdp.num_states(), false));
  reachable[0][start_state] = true;
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (int x = 0; x < mdp.num_states(); ++x) {
      if (!reachable[h][x]) continue;
      const int a = policy.Action(h, x);
      if (a == kUndefinedAction) {
        std::ostringstream msg;
        msg << "policy undefined at reachable state " << x << ", level "
            << h + 1;
        throw ContractViolation(msg.str());
      }
      mdp.CheckAction(x, a);
      const auto probs = mdp.Transition(h, x, a);
      for (std::size_t y = 0; y < probs.size(); ++y) {
        if (probs[y] > 0.0) reachable[h + 1][y] = true;
      }
    }
  }
  return reachable;
}

ValueTables PolicyValue(const LinearMdp& mdp, const DeterministicPolicy& policy,
                        int start_state) {
  const auto reachable = ReachableStates(mdp, policy, start_state);
  const int horizon = mdp.horizon();
  ValueTables out;
  out.v.assign(horizon + 1, Eigen::VectorXd::Zero(mdp.num_states()));
  out.q.assign(horizon, Eigen::VectorXd::Zero(mdp.num_pairs()));
  for (int h = horizon - 1; h >= 0; --h) {
    for (int x = 0; x < mdp.num_states(); ++x) {
      for (int a = 0; a < mdp.num_actions(x); ++a) {
        out.q[h](mdp.PairIndex(x, a)) = Backup(mdp, h, x, a, out.v[h + 1]);
      }
      const int a = policy.Action(h, x);
      if (a == kUndefinedAction) continue;  // Unreachable by construction.
      if (!reachable[h][x] && (a < 0 || a >= mdp.num_actions(x))) continue;
      mdp.CheckAction(x, a);
      out.v[h](x) = out.q[h](mdp.PairIndex(x, a));
    }
  }
  return out;
}

ValueTables PolicyValue(const LinearMdp& mdp, const DeterministicPolicy& policy) {
  return PolicyValue(mdp, policy, mdp.initial_state());
}

}  // namespace lowswitch
