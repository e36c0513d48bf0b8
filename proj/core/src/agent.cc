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

#include "lowswitch/agent.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "lowswitch/errors.h"

namespace lowswitch {
namespace {

constexpr double kResidualTolerance = 1e-6;
constexpr double kDominationSlack = 1e-8;
// Regret increments this far below zero are roundoff; below it is a bug.
constexpr double kRegretRoundoff = 1e-9;

}  // namespace

std::string ToString(AgentMode mode) {
  return mode == AgentMode::kLowSwitch ? "low_switch" : "always_switch";
}

AgentMode ParseAgentMode(const std::string& name) {
  if (name == "low_switch") return AgentMode::kLowSwitch;
  if (name == "always_switch") return AgentMode::kAlwaysSwitch;
  throw InvalidArgument("unknown agent mode '" + name + "'");
}

QEstimate::QEstimate(std::vector<Eigen::VectorXd> weights,
                     std::vector<Eigen::MatrixXd> inverses, double beta,
                     int horizon, bool floor_at_zero)
    : weights_(std::move(weights)),
      inverses_(std::move(inverses)),
      beta_(beta),
      horizon_(horizon),
      floor_at_zero_(floor_at_zero) {
  if (static_cast<int>(weights_.size()) != horizon_ ||
      static_cast<int>(inverses_.size()) != horizon_) {
    throw InvalidArgument("QEstimate: need one weight vector and inverse per level");
  }
  for (const auto& w : weights_) {
    if (!w.allFinite()) throw NumericalFault("QEstimate: non-finite weights");
  }
}

double QEstimate::Bonus(int level, const Eigen::VectorXd& phi) const {
  const double quad = std::max(0.0, phi.dot(inverses_[level] * phi));
  return beta_ * std::sqrt(quad);
}

double QEstimate::Value(int level, const Eigen::VectorXd& phi) const {
  double q = weights_[level].dot(phi) + Bonus(level, phi);
  q = std::min(q, static_cast<double>(horizon_));
  if (floor_at_zero_) q = std::max(q, 0.0);
  return q;
}

nlohmann::json PolicySnapshot::ToJson() const {
  nlohmann::json w = nlohmann::json::array();
  if (q) {
    for (const auto& wh : q->weights()) {
      w.push_back(std::vector<double>(wh.data(), wh.data() + wh.size()));
    }
  }
  return {{"w", w},
          {"beta", q ? q->beta() : 0.0},
          {"origin_episode", origin_episode},
          {"snapshot_id", snapshot_id}};
}

int GreedyAction(const QEstimate& q, int level,
                 std::span<const Eigen::VectorXd> feasible) {
  if (feasible.empty()) throw InvalidArgument("act: no feasible actions");
  int best_a = 0;
  double best = q.Value(level, feasible[0]);
  for (std::size_t a = 1; a < feasible.size(); ++a) {
    const double value = q.Value(level, feasible[a]);
    if (value > best) {
      best = value;
      best_a = static_cast<int>(a);
    }
  }
  return best_a;
}

int Act(const PolicySnapshot& snapshot, const LinearMdp& mdp, int state,
        int level) {
  if (!snapshot.q) throw ContractViolation("act: empty snapshot");
  mdp.CheckState(state);
  mdp.CheckLevel(level);
  return GreedyAction(*snapshot.q, level, mdp.spec().features[state]);
}

DeterministicPolicy MaterializePolicy(const LinearMdp& mdp, const QEstimate& q) {
  DeterministicPolicy policy(mdp.horizon(), mdp.num_states());
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (int x = 0; x < mdp.num_states(); ++x) {
      policy.Set(h, x, GreedyAction(q, h, mdp.spec().features[x]));
    }
  }
  return policy;
}

TransitionStats::TransitionStats(const LinearMdp& mdp)
    : mdp_(&mdp), levels_(mdp.horizon()) {}

void TransitionStats::Add(const EpisodeTrajectory& trajectory) {
  const int horizon = mdp_->horizon();
  if (static_cast<int>(trajectory.actions.size()) != horizon ||
      static_cast<int>(trajectory.states.size()) != horizon + 1 ||
      static_cast<int>(trajectory.rewards.size()) != horizon) {
    throw InvalidArgument("trajectory length does not match the horizon");
  }
  for (int h = 0; h < horizon; ++h) {
    const int x = trajectory.states[h];
    const int a = trajectory.actions[h];
    mdp_->CheckAction(x, a);
    mdp_->CheckState(trajectory.states[h + 1]);
    PairStats& entry = levels_[h][mdp_->PairIndex(x, a)];
    ++entry.count;
    entry.reward_sum += trajectory.rewards[h];
    ++entry.successors[trajectory.states[h + 1]];
  }
  ++episodes_;
}

QEstimate EstimateQ(const LinearMdp& mdp, const TransitionStats& stats,
                    std::span<const Covariance> covariances, double beta,
                    bool floor_at_zero) {
  const int horizon = mdp.horizon();
  const int d = mdp.dim();
  if (static_cast<int>(covariances.size()) != horizon) {
    throw InvalidArgument("estimate_q: need one covariance per level");
  }
  std::vector<Eigen::VectorXd> weights(horizon, Eigen::VectorXd::Zero(d));
  std::vector<Eigen::MatrixXd> inverses(horizon);
  for (int h = 0; h < horizon; ++h) {
    if (covariances[h].dim() != d) {
      throw InvalidArgument("estimate_q: covariance dimension mismatch");
    }
    if (covariances[h].count() != stats.episodes()) {
      throw InvalidArgument(
          "estimate_q: covariance and history sizes disagree");
    }
    inverses[h] = covariances[h].inverse();
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> next_value;  // max_a Q_{h+1}(x, a), lazily filled
  for (int h = horizon - 1; h >= 0; --h) {
    // Weights above h are final by the time level h is solved.
    std::optional<QEstimate> upper;
    if (h + 1 < horizon) {
      upper.emplace(weights, inverses, beta, horizon, floor_at_zero);
      next_value.assign(mdp.num_states(), nan);
    }
    auto successor_value = [&](int x) {
      if (!upper) return 0.0;
      double& slot = next_value[x];
      if (std::isnan(slot)) {
        const auto& feats = mdp.spec().features[x];
        double best = upper->Value(h + 1, feats[0]);
        for (std::size_t a = 1; a < feats.size(); ++a) {
          best = std::max(best, upper->Value(h + 1, feats[a]));
        }
        slot = best;
      }
      return slot;
    };

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    for (const auto& [pair, entry] : stats.level(h)) {
      double target = entry.reward_sum;
      for (const auto& [next, n] : entry.successors) {
        target += static_cast<double>(n) * successor_value(next);
      }
      const int x = mdp.PairState(pair);
      rhs += target * mdp.Feature(x, pair - mdp.PairOffset(x));
    }
    weights[h] = inverses[h] * rhs;
    const double residual =
        (covariances[h].matrix() * weights[h] - rhs).norm();
    if (residual > kResidualTolerance * rhs.norm()) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "estimate_q: ridge residual " << residual << " at level " << h + 1
          << " exceeds tolerance (|rhs| = " << rhs.norm() << ")";
      throw NumericalFault(msg.str());
    }
  }
  return QEstimate(std::move(weights), std::move(inverses), beta, horizon,
                   floor_at_zero);
}

QEstimate EstimateQ(const LinearMdp& mdp,
                    std::span<const EpisodeTrajectory> history,
                    std::span<const Covariance> covariances, double beta,
                    bool floor_at_zero) {
  TransitionStats stats(mdp);
  for (const auto& traj : history) stats.Add(traj);
  return EstimateQ(mdp, stats, covariances, beta, floor_at_zero);
}

SwitchDecision MaybeSwitch(std::span<const Covariance> current,
                           PolicySnapshot& snapshot, AgentMode mode,
                           int episode,
                           const std::function<QEstimate()>& build_estimate) {
  SwitchDecision decision;
  if (!snapshot.q || mode == AgentMode::kAlwaysSwitch) {
    decision.refreshed = true;
  } else {
    if (snapshot.reference.size() != current.size()) {
      throw InvalidArgument("maybe_switch: level count mismatch");
    }
    for (std::size_t h = 0; h < current.size(); ++h) {
      if (SwitchRequired(snapshot.reference[h], current[h])) {
        decision.triggering_levels.push_back(static_cast<int>(h));
      }
    }
    decision.refreshed = !decision.triggering_levels.empty();
  }
  if (decision.refreshed) {
    snapshot.q = std::make_shared<const QEstimate>(build_estimate());
    snapshot.reference.assign(current.begin(), current.end());
    snapshot.origin_episode = episode;
    ++snapshot.snapshot_id;
  }
  return decision;
}

void ValidateConfig(const AgentConfig& config) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
    throw InvalidArgument("agent.lambda must be > 0");
  }
  if (!(config.p > 0.0 && config.p < 1.0)) {
    throw InvalidArgument("agent.p must lie in (0, 1)");
  }
  if (config.beta && !(*config.beta > 0.0 && std::isfinite(*config.beta))) {
    throw InvalidArgument("agent.beta must be > 0");
  }
  if (!(config.c_beta > 0.0) || !std::isfinite(config.c_beta)) {
    throw InvalidArgument("agent.c_beta must be > 0");
  }
  if (config.num_episodes < 1) {
    throw InvalidArgument("number of episodes K must be >= 1");
  }
  if (config.refactor_period < 1) {
    throw InvalidArgument("refactor period must be >= 1");
  }
}

double ResolveBeta(const AgentConfig& config, int dim, int horizon) {
  ValidateConfig(config);
  if (config.beta) return *config.beta;
  const double iota =
      std::log(2.0 * dim * static_cast<double>(config.num_episodes) * horizon /
               config.p);
  return config.c_beta * dim * horizon * std::sqrt(iota);
}

LsviAgent::LsviAgent(const LinearMdp& mdp, const AgentConfig& config)
    : mdp_(&mdp),
      config_(config),
      beta_(ResolveBeta(config, mdp.dim(), mdp.horizon())),
      stats_(mdp) {
  covariances_.reserve(mdp.horizon());
  for (int h = 0; h < mdp.horizon(); ++h) {
    covariances_.emplace_back(mdp.dim(), config.lambda, config.refactor_period);
  }
}

QEstimate LsviAgent::ComputeEstimate() const {
  return EstimateQ(*mdp_, stats_, covariances_, beta_, config_.floor_at_zero);
}

SwitchDecision LsviAgent::BeginEpisode(int episode) {
  SwitchDecision decision =
      MaybeSwitch(covariances_, snapshot_, config_.mode, episode,
                  [this] { return ComputeEstimate(); });
  if (decision.refreshed) policy_ = MaterializePolicy(*mdp_, *snapshot_.q);
  return decision;
}

void LsviAgent::Observe(const EpisodeTrajectory& trajectory) {
  stats_.Add(trajectory);
  for (int h = 0; h < mdp_->horizon(); ++h) {
    covariances_[h].Update(trajectory.features[h]);
  }
}

RunTrace RunAgent(const LinearMdp& mdp, const AgentConfig& config,
                  std::uint64_t seed, const RunOptions& options) {
  const auto start_time = std::chrono::steady_clock::now();
  LsviAgent agent(mdp, config);
  Rng rng = Rng::Derive(seed, /*stream=*/1);
  const int horizon = mdp.horizon();

  RunTrace trace;
  trace.config = config;
  trace.beta = agent.beta();
  trace.seed = seed;
  trace.dim = mdp.dim();
  trace.horizon = horizon;
  trace.num_states = mdp.num_states();
  trace.local_tracked = static_cast<std::int64_t>(horizon) * mdp.num_states() <=
                        options.local_switch_cap;
  for (const auto& cov : agent.covariances()) {
    trace.initial_logdets.push_back(cov.logdet());
  }

  const ValueTables optimal = OptimalValues(mdp);
  std::optional<ValueTables> deployed_values;
  DeterministicPolicy previous_policy;
  std::vector<Covariance> snapshot_covariances;

  for (int k = 1; k <= config.num_episodes; ++k) {
    // Covariances before the switching rule can refresh the reference.
    const std::vector<Covariance>& current = agent.covariances();
    const std::vector<Covariance> reference_before =
        agent.snapshot().reference;
    const SwitchDecision decision = agent.BeginEpisode(k);

    EpisodeRecord record;
    record.episode = k;
    record.snapshot_id = agent.snapshot().snapshot_id;
    record.switched = decision.refreshed && k > 1;

    if (decision.refreshed) {
      const DeterministicPolicy& policy = agent.policy();
      if (k > 1) {
        record.behavioral_switch = !(policy == previous_policy);
        if (trace.local_tracked) {
          std::int64_t changed = 0;
          for (std::size_t i = 0; i < policy.actions().size(); ++i) {
            changed += policy.actions()[i] != previous_policy.actions()[i];
          }
          record.local_switch_delta = changed;
        }
        for (int h : decision.triggering_levels) {
          ++trace.det_growth_checks;
          if (!VerifyDetGrowth(reference_before[h], current[h])) {
            ++trace.det_growth_violations;
            if (options.abort_on_violation) {
              std::ostringstream msg;
              msg << "episode " << k << ": switch at level " << h + 1
                  << " without log 2 growth in log det";
              throw ContractViolation(msg.str());
            }
          }
        }
      }
      previous_policy = policy;
      if (trace.local_tracked) trace.snapshot_policies.push_back(policy);
      deployed_values.reset();
      if (options.on_estimate) options.on_estimate(k, *agent.snapshot().q, true);
    } else if (config.recompute_every_episode && options.on_estimate) {
      options.on_estimate(k, agent.ComputeEstimate(), false);
    }

    const int start = options.initial_state_schedule
                          ? options.initial_state_schedule(k)
                          : mdp.initial_state();
    if (!deployed_values) {
      deployed_values = PolicyValue(mdp, agent.policy(), start);
    }
    // A non-constant start schedule can reach states the cached table was
    // not checked against; re-evaluate from the new start.
    if (options.initial_state_schedule) {
      deployed_values = PolicyValue(mdp, agent.policy(), start);
    }

    const PolicySnapshot& snapshot = agent.snapshot();
    EpisodeTrajectory traj = mdp.Rollout(
        start,
        [&](int h, int x) {
          const int a = agent.Act(h, x);
          const Eigen::VectorXd& phi = mdp.Feature(x, a);
          const double gap = snapshot.reference[h].QuadForm(phi) -
                             2.0 * current[h].QuadForm(phi);
          ++trace.domination_checks;
          trace.worst_domination_gap = std::max(trace.worst_domination_gap, gap);
          if (gap > kDominationSlack) {
            ++trace.domination_violations;
            if (options.abort_on_violation) {
              std::ostringstream msg;
              msg.precision(17);
              msg << "episode " << k << ", level " << h + 1
                  << ": deployed bonus exceeds twice the current bonus by "
                  << gap;
              throw ContractViolation(msg.str());
            }
          }
          return a;
        },
        rng);

    record.episode_return = traj.Return();
    double increment = optimal.V(0, start) - deployed_values->V(0, start);
    if (increment < -kRegretRoundoff) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "episode " << k << ": deployed policy value exceeds V* by "
          << -increment;
      throw ContractViolation(msg.str());
    }
    increment = std::max(increment, 0.0);
    record.regret_increment = increment;
    record.cumulative_regret =
        (trace.episodes.empty() ? 0.0 : trace.episodes.back().cumulative_regret) +
        increment;

    agent.Observe(traj);
    for (const auto& cov : agent.covariances()) {
      record.logdets.push_back(cov.logdet());
    }
    if (options.record_trajectories) trace.trajectories.push_back(std::move(traj));
    trace.episodes.push_back(std::move(record));
  }

  trace.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  return trace;
}

}  // namespace lowswitch
