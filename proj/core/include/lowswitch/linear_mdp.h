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

#ifndef LOWSWITCH_LINEAR_MDP_H_
#define LOWSWITCH_LINEAR_MDP_H_

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lowswitch/rng.h"

namespace lowswitch {

// Levels are 0-based throughout the C++ API: level h in [0, horizon).

// Generative description of an episodic linear MDP over a finite state set:
//   P_h(x' | x, a) = <phi(x, a), mu_h(x')>,   r_h(x, a) = <phi(x, a), theta_h>.
struct LinearMdpSpec {
  int dim = 0;
  int horizon = 0;
  int num_states = 0;
  // Feasible action count per state; actions at x are 0 .. num_actions[x]-1.
  std::vector<int> num_actions;
  // features[x][a] = phi(x, a).
  std::vector<std::vector<Eigen::VectorXd>> features;
  // measures[h] is num_states x dim; row x' holds mu_h(x').
  std::vector<Eigen::MatrixXd> measures;
  // reward_vecs[h] = theta_h.
  std::vector<Eigen::VectorXd> reward_vecs;
  int initial_state = 0;
  // Free-form provenance, e.g. the hard-instance construction record.
  nlohmann::json metadata = nlohmann::json::object();
};

// Tabular MDP; transitions[h] is (S*A) x S with row s*A + a.
struct TabularMdpSpec {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<Eigen::MatrixXd> transitions;
  // rewards[h] is S x A.
  std::vector<Eigen::MatrixXd> rewards;
  int initial_state = 0;
};

struct EpisodeTrajectory {
  std::vector<int> states;  // x_1 .. x_{H+1}
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<Eigen::VectorXd> features;  // phi(x_h, a_h)

  double Return() const;
};

struct StepResult {
  double reward;
  int next_state;
};

// Throw InvalidArgument describing the first violated invariant.
void ValidateSpec(const LinearMdpSpec& spec);
void ValidateSpec(const TabularMdpSpec& spec);

// Validated, immutable linear MDP with the transition kernel and rewards
// materialized per (level, state, action). Safe to share read-only.
class LinearMdp {
 public:
  explicit LinearMdp(LinearMdpSpec spec);

  const LinearMdpSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int horizon() const { return spec_.horizon; }
  int num_states() const { return spec_.num_states; }
  int num_actions(int state) const { return spec_.num_actions[state]; }
  int max_actions() const { return max_actions_; }
  int num_pairs() const { return static_cast<int>(pair_state_.size()); }
  int initial_state() const { return spec_.initial_state; }

  // Dense index of (state, action) in [0, num_pairs()).
  int PairIndex(int state, int action) const {
    return pair_offset_[state] + action;
  }
  int PairOffset(int state) const { return pair_offset_[state]; }
  int PairState(int pair) const { return pair_state_[pair]; }

  const Eigen::VectorXd& Feature(int state, int action) const {
    return spec_.features[state][action];
  }
  double Reward(int level, int state, int action) const {
    return rewards_[level](PairIndex(state, action));
  }
  // Next-state distribution, negative roundoff clamped to zero.
  std::span<const double> Transition(int level, int state, int action) const;

  // Samples one transition by inverse CDF on a single uniform draw.
  StepResult Step(int level, int state, int action, Rng& rng) const;

  // Rolls out one episode with a deterministic (level, state) -> action rule.
  template <typename ActionFn>
  EpisodeTrajectory Rollout(int start_state, ActionFn&& choose, Rng& rng) const {
    EpisodeTrajectory traj;
    traj.states.reserve(horizon() + 1);
    traj.states.push_back(start_state);
    int x = start_state;
    for (int h = 0; h < horizon(); ++h) {
      const int a = choose(h, x);
      const StepResult r = Step(h, x, a, rng);
      traj.actions.push_back(a);
      traj.rewards.push_back(r.reward);
      traj.features.push_back(Feature(x, a));
      traj.states.push_back(r.next_state);
      x = r.next_state;
    }
    return traj;
  }

  void CheckState(int state) const;
  void CheckAction(int state, int action) const;
  void CheckLevel(int level) const;

 private:
  LinearMdpSpec spec_;
  int max_actions_ = 0;
  std::vector<int> pair_offset_;
  std::vector<int> pair_state_;
  // kernels_[h] is num_pairs x num_states, row-major for contiguous rows.
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>
      kernels_;
  std::vector<Eigen::VectorXd> rewards_;
};

// Inverse-CDF draw from a discrete distribution; the fallback for roundoff
// is the last state with positive mass.
int SampleCategorical(std::span<const double> probs, double uniform);

}  // namespace lowswitch

#endif  // LOWSWITCH_LINEAR_MDP_H_
