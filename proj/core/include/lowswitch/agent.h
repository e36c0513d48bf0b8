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

#ifndef LOWSWITCH_AGENT_H_
#define LOWSWITCH_AGENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lowswitch/covariance.h"
#include "lowswitch/linear_mdp.h"
#include "lowswitch/planning.h"
#include "lowswitch/trace.h"

namespace lowswitch {

// Optimistic action-value estimate for all levels:
//   Q_h(x, a) = min{ w_h . phi + beta * sqrt(phi^T Lambda_h^{-1} phi), H },
// floored at 0 unless the floor is disabled (strict-paper mode).
class QEstimate {
 public:
  QEstimate(std::vector<Eigen::VectorXd> weights,
            std::vector<Eigen::MatrixXd> inverses, double beta, int horizon,
            bool floor_at_zero);

  double Value(int level, const Eigen::VectorXd& phi) const;
  // beta * sqrt(phi^T Lambda_h^{-1} phi).
  double Bonus(int level, const Eigen::VectorXd& phi) const;

  int horizon() const { return horizon_; }
  double beta() const { return beta_; }
  bool floor_at_zero() const { return floor_at_zero_; }
  const std::vector<Eigen::VectorXd>& weights() const { return weights_; }
  const std::vector<Eigen::MatrixXd>& inverses() const { return inverses_; }

 private:
  std::vector<Eigen::VectorXd> weights_;
  std::vector<Eigen::MatrixXd> inverses_;
  double beta_;
  int horizon_;
  bool floor_at_zero_;
};

// Deployed greedy policy. Two snapshots denote the same policy iff their ids
// match. `reference` holds the per-level covariances at the origin episode.
struct PolicySnapshot {
  std::shared_ptr<const QEstimate> q;
  std::vector<Covariance> reference;
  int origin_episode = 0;
  std::int64_t snapshot_id = -1;

  // w_h arrays, beta, origin_episode, snapshot_id.
  nlohmann::json ToJson() const;
};

// argmax over `feasible` (feature of each feasible action, in action order);
// ties go to the lowest action id.
int GreedyAction(const QEstimate& q, int level,
                 std::span<const Eigen::VectorXd> feasible);
int Act(const PolicySnapshot& snapshot, const LinearMdp& mdp, int state,
        int level);

// Greedy (level, state) -> action table of an estimate.
DeterministicPolicy MaterializePolicy(const LinearMdp& mdp, const QEstimate& q);

// Regression sufficient statistics per level: for each visited (x, a) the
// visit count, summed reward and successor counts.
class TransitionStats {
 public:
  struct PairStats {
    std::int64_t count = 0;
    double reward_sum = 0.0;
    std::map<int, std::int64_t> successors;
  };

  TransitionStats(const LinearMdp& mdp);

  void Add(const EpisodeTrajectory& trajectory);

  const std::map<int, PairStats>& level(int h) const { return levels_[h]; }
  std::int64_t episodes() const { return episodes_; }

 private:
  const LinearMdp* mdp_;
  std::vector<std::map<int, PairStats>> levels_;
  std::int64_t episodes_ = 0;
};

// Backward ridge-regression pass. Targets are r + max_a Q_{h+1}(x', a) over
// the successor's feasible actions with Q_{H+1} = 0; the solve uses the
// maintained inverses and throws NumericalFault if
// ||Lambda_h w_h - rhs|| > 1e-6 ||rhs||.
QEstimate EstimateQ(const LinearMdp& mdp, const TransitionStats& stats,
                    std::span<const Covariance> covariances, double beta,
                    bool floor_at_zero = true);
// Same, from raw trajectories. Throws InvalidArgument unless every level's
// covariance absorbed exactly one feature per trajectory.
QEstimate EstimateQ(const LinearMdp& mdp,
                    std::span<const EpisodeTrajectory> history,
                    std::span<const Covariance> covariances, double beta,
                    bool floor_at_zero = true);

struct SwitchDecision {
  bool refreshed = false;
  // Levels whose switching test fired (empty for forced refreshes).
  std::vector<int> triggering_levels;
};

// Evaluates the switching rule at every level against the deployed
// snapshot's reference covariances. If any level fires (or there is no
// snapshot yet, or mode is always-switch) a new snapshot is built from
// `build_estimate()` with the current covariances as reference.
SwitchDecision MaybeSwitch(std::span<const Covariance> current,
                           PolicySnapshot& snapshot, AgentMode mode,
                           int episode,
                           const std::function<QEstimate()>& build_estimate);

// c_beta * d * H * sqrt(log(2 d K H / p)) unless beta is given explicitly.
double ResolveBeta(const AgentConfig& config, int dim, int horizon);
void ValidateConfig(const AgentConfig& config);

// Low-switching LSVI-UCB (or the always-switch baseline) on one MDP.
class LsviAgent {
 public:
  LsviAgent(const LinearMdp& mdp, const AgentConfig& config);

  // Runs the switching rule for 1-based episode k.
  SwitchDecision BeginEpisode(int episode);
  int Act(int level, int state) const { return policy_.Action(level, state); }
  void Observe(const EpisodeTrajectory& trajectory);

  // Q estimate from all data absorbed so far.
  QEstimate ComputeEstimate() const;

  const PolicySnapshot& snapshot() const { return snapshot_; }
  const DeterministicPolicy& policy() const { return policy_; }
  const std::vector<Covariance>& covariances() const { return covariances_; }
  double beta() const { return beta_; }
  const AgentConfig& config() const { return config_; }

 private:
  const LinearMdp* mdp_;
  AgentConfig config_;
  double beta_;
  std::vector<Covariance> covariances_;
  TransitionStats stats_;
  PolicySnapshot snapshot_;
  DeterministicPolicy policy_;
};

struct RunOptions {
  // 1-based episode -> initial state; defaults to the MDP's initial state.
  std::function<int(int)> initial_state_schedule;
  bool record_trajectories = false;
  // Receives every Q estimate the run computes; `deployed` marks those that
  // became the executed policy.
  std::function<void(int episode, const QEstimate& q, bool deployed)>
      on_estimate;
  // Local switching cost is reported only when H * |S| is at most this.
  std::int64_t local_switch_cap = 100000;
  // Throw ContractViolation on a domination or determinant-growth failure.
  bool abort_on_violation = true;
};

// Runs K = config.num_episodes episodes; deterministic given seed.
RunTrace RunAgent(const LinearMdp& mdp, const AgentConfig& config,
                  std::uint64_t seed, const RunOptions& options = {});

}  // namespace lowswitch

#endif  // LOWSWITCH_AGENT_H_
