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

#include <cmath>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "lowswitch/errors.h"
#include "lowswitch/generators.h"
#include "lowswitch/linear_mdp.h"
#include "lowswitch/metrics.h"
#include "lowswitch/planning.h"
#include "lowswitch/serialization.h"

namespace lowswitch {
namespace {

// One state, one action, d = 1, constant reward r.
LinearMdp ScalarMdp(double reward, int horizon) {
  LinearMdpSpec spec;
  spec.dim = 1;
  spec.horizon = horizon;
  spec.num_states = 1;
  spec.num_actions = {1};
  spec.features = {{Eigen::VectorXd::Ones(1)}};
  for (int h = 0; h < horizon; ++h) {
    spec.measures.push_back(Eigen::MatrixXd::Ones(1, 1));
    spec.reward_vecs.push_back(Eigen::VectorXd::Constant(1, reward));
  }
  return LinearMdp(spec);
}

LinearMdp TabularMdp(int s, int a, int h, std::uint64_t seed) {
  return LinearMdp(EmbedTabular(RandomTabular(s, a, h, 1.0, seed)));
}

TEST(ResolveBetaTest, DefaultFormula) {
  AgentConfig config;
  config.num_episodes = 100;
  const double iota = std::log(2.0 * 4 * 100 * 3 / 0.05);
  EXPECT_NEAR(ResolveBeta(config, 4, 3), 4.0 * 3.0 * std::sqrt(iota), 1e-12);
  EXPECT_NEAR(ResolveBeta(config, 4, 3), 39.40, 0.01);
  config.beta = 0.7;
  EXPECT_EQ(ResolveBeta(config, 4, 3), 0.7);
}

TEST(ValidateConfigTest, RejectsBadValues) {
  AgentConfig config;
  EXPECT_NO_THROW(ValidateConfig(config));
  config.lambda = 0.0;
  EXPECT_THROW(ValidateConfig(config), InvalidArgument);
  config = AgentConfig{};
  config.p = 1.0;
  EXPECT_THROW(ValidateConfig(config), InvalidArgument);
  config = AgentConfig{};
  config.num_episodes = 0;
  EXPECT_THROW(ValidateConfig(config), InvalidArgument);
}

TEST(EstimateQTest, EmptyHistoryClipsToHorizon) {
  const LinearMdp mdp(EmbedTabular(RandomTabular(2, 2, 3, 1.0, 0)));
  // d = 4, H = 3, K = 100: the default bonus exceeds H everywhere.
  AgentConfig config;
  config.num_episodes = 100;
  LsviAgent agent(mdp, config);
  const QEstimate q = agent.ComputeEstimate();
  for (int h = 0; h < 3; ++h) {
    EXPECT_TRUE(q.weights()[h].isZero());
    for (int x = 0; x < 2; ++x) {
      for (int a = 0; a < 2; ++a) EXPECT_EQ(q.Value(h, mdp.Feature(x, a)), 3.0);
    }
  }
}

TEST(EstimateQTest, OneDimensionalRidge) {
  const double r = 0.6;
  const double beta = 0.1;
  const LinearMdp mdp = ScalarMdp(r, 1);
  std::vector<Covariance> covs(1, Covariance(1, 1.0));
  EpisodeTrajectory traj;
  traj.states = {0, 0};
  traj.actions = {0};
  traj.rewards = {r};
  traj.features = {Eigen::VectorXd::Ones(1)};
  covs[0].Update(traj.features[0]);
  const QEstimate q = EstimateQ(mdp, std::vector{traj}, covs, beta);
  EXPECT_NEAR(q.weights()[0](0), r / 2.0, 1e-12);
  EXPECT_NEAR(q.Value(0, Eigen::VectorXd::Ones(1)), r / 2.0 + beta / std::sqrt(2.0),
              1e-12);
  const QEstimate big = EstimateQ(mdp, std::vector{traj}, covs, 5.0);
  EXPECT_EQ(big.Value(0, Eigen::VectorXd::Ones(1)), 1.0);
}

TEST(EstimateQTest, RequiresMatchingCovariances) {
  const LinearMdp mdp = ScalarMdp(0.5, 1);
  std::vector<Covariance> covs(1, Covariance(1, 1.0));
  EpisodeTrajectory traj;
  traj.states = {0, 0};
  traj.actions = {0};
  traj.rewards = {0.5};
  traj.features = {Eigen::VectorXd::Ones(1)};
  EXPECT_THROW(EstimateQ(mdp, std::vector{traj}, covs, 1.0), InvalidArgument);
}

TEST(MaybeSwitchTest, FirstDeploymentAndNoDataAndLockStep) {
  std::vector<Covariance> cur(1, Covariance(1, 1.0));
  PolicySnapshot snapshot;
  int builds = 0;
  auto build = [&] {
    ++builds;
    return QEstimate({Eigen::VectorXd::Zero(1)}, {Eigen::MatrixXd::Identity(1, 1)},
                     1.0, 1, true);
  };
  EXPECT_TRUE(MaybeSwitch(cur, snapshot, AgentMode::kLowSwitch, 1, build).refreshed);
  EXPECT_EQ(snapshot.snapshot_id, 0);
  EXPECT_FALSE(MaybeSwitch(cur, snapshot, AgentMode::kLowSwitch, 2, build).refreshed);

  cur[0].Update(Eigen::VectorXd::Ones(1));
  EXPECT_FALSE(MaybeSwitch(cur, snapshot, AgentMode::kLowSwitch, 3, build).refreshed);
  cur[0].Update(Eigen::VectorXd::Ones(1));
  const SwitchDecision d = MaybeSwitch(cur, snapshot, AgentMode::kLowSwitch, 4, build);
  EXPECT_TRUE(d.refreshed);
  EXPECT_EQ(d.triggering_levels, std::vector<int>{0});
  EXPECT_EQ(snapshot.snapshot_id, 1);
  EXPECT_EQ(snapshot.origin_episode, 4);
  EXPECT_EQ(builds, 2);

  EXPECT_TRUE(MaybeSwitch(cur, snapshot, AgentMode::kAlwaysSwitch, 5, build).refreshed);
  EXPECT_EQ(builds, 3);
}

TEST(ActTest, TieBreakAndAlignment) {
  LinearMdpSpec spec;
  spec.dim = 2;
  spec.horizon = 1;
  spec.num_states = 1;
  spec.num_actions = {2};
  spec.features = {{Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0)}};
  spec.measures = {Eigen::MatrixXd::Ones(1, 2)};
  spec.reward_vecs = {Eigen::Vector2d(1, 0)};
  const LinearMdp mdp(spec);

  PolicySnapshot fresh;
  fresh.q = std::make_shared<const QEstimate>(
      std::vector<Eigen::VectorXd>{Eigen::Vector2d::Zero()},
      std::vector<Eigen::MatrixXd>{Eigen::Matrix2d::Identity()}, 0.5, 1, true);
  EXPECT_EQ(Act(fresh, mdp, 0, 0), 0);

  PolicySnapshot aligned;
  aligned.q = std::make_shared<const QEstimate>(
      std::vector<Eigen::VectorXd>{Eigen::Vector2d(0.8, 0.1)},
      std::vector<Eigen::MatrixXd>{Eigen::Matrix2d::Identity()}, 0.0, 1, true);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(Act(aligned, mdp, 0, 0), 1);
}

TEST(RunAgentTest, SingleEpisode) {
  const LinearMdp mdp = TabularMdp(3, 2, 3, 4);
  AgentConfig config;
  config.num_episodes = 1;
  const RunTrace trace = RunAgent(mdp, config, 9);
  ASSERT_EQ(trace.num_episodes(), 1);
  EXPECT_FALSE(trace.episodes[0].switched);
  EXPECT_EQ(MakeSwitchReport(trace).global_switches, 0);
  // Q~ is constant, so the first policy plays action 0 everywhere.
  DeterministicPolicy zeros(3, 3);
  for (int h = 0; h < 3; ++h) {
    for (int x = 0; x < 3; ++x) zeros.Set(h, x, 0);
  }
  const double expected =
      OptimalValues(mdp).V(0, 0) - PolicyValue(mdp, zeros, 0).V(0, 0);
  EXPECT_NEAR(trace.episodes[0].regret_increment, expected, 1e-12);
}

TEST(RunAgentTest, AlwaysSwitchBehavioralCountMatchesPolicyChanges) {
  const LinearMdp mdp = TabularMdp(3, 2, 3, 8);
  AgentConfig config;
  config.mode = AgentMode::kAlwaysSwitch;
  config.num_episodes = 200;
  config.c_beta = 0.02;
  std::vector<DeterministicPolicy> deployed;
  RunOptions options;
  options.on_estimate = [&](int, const QEstimate& q, bool is_deployed) {
    if (is_deployed) deployed.push_back(MaterializePolicy(mdp, q));
  };
  const RunTrace trace = RunAgent(mdp, config, 1, options);
  ASSERT_EQ(deployed.size(), 200u);
  std::int64_t changes = 0;
  for (std::size_t k = 1; k < deployed.size(); ++k) {
    changes += !(deployed[k] == deployed[k - 1]);
  }
  const SwitchReport report = MakeSwitchReport(trace);
  EXPECT_EQ(report.behavioral_switches, changes);
  EXPECT_EQ(report.global_switches, 199);
  EXPECT_GT(changes, 0);
}

TEST(RunAgentTest, LowSwitchBoundOnSmallTabular) {
  const LinearMdp mdp = TabularMdp(2, 2, 2, 3);
  AgentConfig config;
  config.num_episodes = 2000;
  for (double c_beta : {1.0, 0.05}) {
    config.c_beta = c_beta;
    const RunTrace trace = RunAgent(mdp, config, 2);
    const SwitchReport report = MakeSwitchReport(trace);
    EXPECT_LE(report.global_switches, 4.0 * 4 * 2 * std::log(2000.0));
    double potential = 0.0;
    for (int h = 0; h < 2; ++h) {
      potential += trace.episodes.back().logdets[h] - trace.initial_logdets[h];
    }
    EXPECT_LE(report.global_switches, potential / std::log(2.0) + 1e-9);
    EXPECT_EQ(trace.domination_violations, 0);
    EXPECT_EQ(trace.det_growth_violations, 0);
    EXPECT_TRUE(SandwichHolds(report, 2, 2));
  }
}

TEST(RunAgentTest, OptimismAndClippingOnTabularRuns) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const LinearMdp mdp = TabularMdp(3, 2, 3, 100 + seed);
    const ValueTables optimal = OptimalValues(mdp);
    AgentConfig config;
    config.num_episodes = 50;
    config.recompute_every_episode = true;
    int violations = 0;
    RunOptions options;
    options.on_estimate = [&](int, const QEstimate& q, bool) {
      for (int h = 0; h < 3; ++h) {
        for (int x = 0; x < 3; ++x) {
          for (int a = 0; a < 2; ++a) {
            const double v = q.Value(h, mdp.Feature(x, a));
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 3.0);
            violations += v < optimal.q[h](mdp.PairIndex(x, a)) - 1e-8;
          }
        }
      }
    };
    RunAgent(mdp, config, seed, options);
    EXPECT_EQ(violations, 0) << seed;
  }
}

TEST(RunAgentTest, StrictModeKeepsUpperClip) {
  const LinearMdp mdp = TabularMdp(3, 2, 3, 5);
  AgentConfig config;
  config.num_episodes = 100;
  config.c_beta = 0.01;
  config.floor_at_zero = false;
  RunOptions options;
  options.on_estimate = [&](int, const QEstimate& q, bool) {
    EXPECT_FALSE(q.floor_at_zero());
    for (int x = 0; x < 3; ++x) EXPECT_LE(q.Value(0, mdp.Feature(x, 0)), 3.0);
  };
  EXPECT_NO_THROW(RunAgent(mdp, config, 3, options));
}

TEST(RunAgentTest, DebugRecomputeIsObservationallyEquivalent) {
  const LinearMdp mdp = TabularMdp(4, 3, 3, 6);
  AgentConfig config;
  config.num_episodes = 300;
  config.c_beta = 0.02;
  const RunTrace lazy = RunAgent(mdp, config, 4);
  config.recompute_every_episode = true;
  int recomputes = 0;
  RunOptions options;
  options.on_estimate = [&](int, const QEstimate&, bool) { ++recomputes; };
  const RunTrace eager = RunAgent(mdp, config, 4, options);
  EXPECT_EQ(recomputes, 300);
  EXPECT_EQ(TraceToCsv(lazy), TraceToCsv(eager));
}

TEST(RunAgentTest, Reproducible) {
  const LinearMdp mdp(RandomLinear({.dim = 5, .horizon = 3, .num_states = 6, .seed = 2}));
  AgentConfig config;
  config.num_episodes = 200;
  config.c_beta = 0.05;
  const std::string a = TraceToCsv(RunAgent(mdp, config, 11));
  const std::string b = TraceToCsv(RunAgent(mdp, config, 11));
  const std::string c = TraceToCsv(RunAgent(mdp, config, 12));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(RunAgentTest, TraceInvariantsHold) {
  const LinearMdp mdp = TabularMdp(4, 2, 4, 7);
  AgentConfig config;
  config.num_episodes = 500;
  config.c_beta = 0.02;
  const RunTrace trace = RunAgent(mdp, config, 5);
  EXPECT_NO_THROW(ValidateTrace(trace));
  for (int k = 1; k < trace.num_episodes(); ++k) {
    EXPECT_GE(trace.episodes[k].cumulative_regret,
              trace.episodes[k - 1].cumulative_regret);
    for (int h = 0; h < 4; ++h) {
      EXPECT_GE(trace.episodes[k].logdets[h], trace.episodes[k - 1].logdets[h]);
    }
  }
}

TEST(PolicySnapshotTest, JsonDump) {
  PolicySnapshot snapshot;
  snapshot.q = std::make_shared<const QEstimate>(
      std::vector<Eigen::VectorXd>{Eigen::Vector2d(0.25, 0.5)},
      std::vector<Eigen::MatrixXd>{Eigen::Matrix2d::Identity()}, 1.5, 1, true);
  snapshot.origin_episode = 3;
  snapshot.snapshot_id = 2;
  const nlohmann::json j = snapshot.ToJson();
  EXPECT_EQ(j.at("beta").get<double>(), 1.5);
  EXPECT_EQ(j.at("origin_episode").get<int>(), 3);
  EXPECT_EQ(j.at("snapshot_id").get<int>(), 2);
  EXPECT_EQ(j.at("w")[0][1].get<double>(), 0.5);
}

}  // namespace
}  // namespace lowswitch
