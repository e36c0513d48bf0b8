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


#include "lowswitch/linear_mdp.h"

#include <cmath>
#include <functional>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "lowswitch/errors.h"
#include "lowswitch/generators.h"
#include "lowswitch/planning.h"
#include "lowswitch/rng.h"

namespace lowswitch {
namespace {

// Deterministic chain: state s moves to min(s + 1, S - 1), reward 1 always.
TabularMdpSpec RewardChain(int num_states, int num_actions, int horizon) {
  TabularMdpSpec t;
  t.num_states = num_states;
  t.num_actions = num_actions;
  t.horizon = horizon;
  for (int h = 0; h < horizon; ++h) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(num_states * num_actions, num_states);
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        p(s * num_actions + a, std::min(s + 1, num_states - 1)) = 1.0;
      }
    }
    t.transitions.push_back(p);
    t.rewards.push_back(Eigen::MatrixXd::Ones(num_states, num_actions));
  }
  return t;
}

// Oracle: value of a deterministic policy by plain recursion over the tabular
// kernel, independent of the library's backward induction.
double RecursiveValue(const TabularMdpSpec& t, const std::vector<int>& actions,
                      int level, int state) {
  if (level == t.horizon) return 0.0;
  const int a = actions[level * t.num_states + state];
  double value = t.rewards[level](state, a);
  for (int next = 0; next < t.num_states; ++next) {
    const double p = t.transitions[level](state * t.num_actions + a, next);
    if (p > 0.0) value += p * RecursiveValue(t, actions, level + 1, next);
  }
  return value;
}

TEST(EmbedTabularTest, CanonicalFeatures) {
  const LinearMdpSpec spec = EmbedTabular(RewardChain(2, 2, 1));
  EXPECT_EQ(spec.dim, 4);
  EXPECT_TRUE(spec.features[0][0].isApprox(Eigen::VectorXd::Unit(4, 0)));
  EXPECT_TRUE(spec.features[1][1].isApprox(Eigen::VectorXd::Unit(4, 3)));
  EXPECT_NO_THROW(LinearMdp{spec});
}

TEST(EmbedTabularTest, UniformKernelMeasures) {
  TabularMdpSpec t = RewardChain(3, 2, 2);
  for (auto& p : t.transitions) p.setConstant(1.0 / 3.0);
  const LinearMdpSpec spec = EmbedTabular(t);
  for (const auto& mu : spec.measures) {
    EXPECT_LT((mu.array() - 1.0 / 3.0).abs().maxCoeff(), 1e-15);
  }
}

TEST(EmbedTabularTest, SharedRandomnessTrajectoriesAgree) {
  const TabularMdpSpec t = RandomTabular(5, 3, 4, 0.6, 17);
  const LinearMdp mdp(EmbedTabular(t));
  Rng linear_rng(99), tabular_rng(99), policy_rng(5);
  int x_lin = 0, x_tab = 0;
  for (int step = 0; step < 10000; ++step) {
    const int h = step % t.horizon;
    if (h == 0) x_lin = x_tab = 0;
    const int a = static_cast<int>(policy_rng.UniformInt(3));
    const StepResult lin = mdp.Step(h, x_lin, a, linear_rng);
    const StepResult tab = TabularStep(t, h, x_tab, a, tabular_rng);
    ASSERT_EQ(lin.next_state, tab.next_state) << step;
    ASSERT_DOUBLE_EQ(lin.reward, tab.reward);
    x_lin = lin.next_state;
    x_tab = tab.next_state;
  }
}

TEST(ValidateSpecTest, RejectsBrokenSpecs) {
  LinearMdpSpec good = EmbedTabular(RewardChain(2, 2, 2));
  EXPECT_NO_THROW(ValidateSpec(good));

  LinearMdpSpec long_feature = good;
  long_feature.features[0][0] *= 2.0;
  EXPECT_THROW(ValidateSpec(long_feature), InvalidArgument);

  LinearMdpSpec big_theta = good;
  big_theta.reward_vecs[0] = Eigen::VectorXd::Constant(4, 3.0);
  EXPECT_THROW(ValidateSpec(big_theta), InvalidArgument);

  LinearMdpSpec leaky = good;
  leaky.measures[1](0, 0) = 0.5;
  EXPECT_THROW(ValidateSpec(leaky), InvalidArgument);

  LinearMdpSpec bad_initial = good;
  bad_initial.initial_state = 7;
  EXPECT_THROW(ValidateSpec(bad_initial), InvalidArgument);

  TabularMdpSpec negative_reward = RewardChain(2, 2, 2);
  negative_reward.rewards[0](0, 0) = -0.1;
  EXPECT_THROW(ValidateSpec(negative_reward), InvalidArgument);
}

TEST(LinearMdpTest, StepRejectsOutOfRangeArguments) {
  const LinearMdp mdp(EmbedTabular(RewardChain(2, 2, 2)));
  Rng rng(1);
  EXPECT_THROW(mdp.Step(2, 0, 0, rng), InvalidArgument);
  EXPECT_THROW(mdp.Step(0, 2, 0, rng), InvalidArgument);
  EXPECT_THROW(mdp.Step(0, 0, 2, rng), InvalidArgument);
}

TEST(LinearMdpTest, PointMassKernelIsDeterministic) {
  const LinearMdp mdp(EmbedTabular(RewardChain(3, 2, 3)));
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(mdp.Step(0, 0, i % 2, rng).next_state, 1);
    EXPECT_EQ(mdp.Step(1, 2, i % 2, rng).next_state, 2);
  }
}

TEST(LinearMdpTest, EmpiricalFrequenciesWithinThreeSigma) {
  const TabularMdpSpec t = RandomTabular(4, 2, 1, 1.0, 8);
  const LinearMdp mdp(EmbedTabular(t));
  constexpr int kDraws = 100000;
  Rng rng(12);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[mdp.Step(0, 1, 1, rng).next_state];
  for (int next = 0; next < 4; ++next) {
    const double p = t.transitions[0](1 * 2 + 1, next);
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    EXPECT_LE(std::abs(counts[next] - kDraws * p), 3.0 * sigma + 1e-9) << next;
  }
}

TEST(SampleCategoricalTest, InverseCdf) {
  const std::vector<double> p = {0.25, 0.0, 0.75};
  EXPECT_EQ(SampleCategorical(p, 0.0), 0);
  EXPECT_EQ(SampleCategorical(p, 0.2499), 0);
  EXPECT_EQ(SampleCategorical(p, 0.25), 2);
  EXPECT_EQ(SampleCategorical(p, 0.9999999), 2);
}

TEST(OptimalValuesTest, RewardChainTelescopes) {
  const LinearMdp mdp(EmbedTabular(RewardChain(3, 2, 5)));
  const ValueTables v = OptimalValues(mdp);
  EXPECT_NEAR(v.V(0, 0), 5.0, 1e-12);
  EXPECT_NEAR(v.V(5, 0), 0.0, 0.0);
}

TEST(OptimalValuesTest, MatchesBruteForceEnumeration) {
  // S=3, A=2, H=2: all 2^(3*2) = 64 deterministic policies.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TabularMdpSpec t = RandomTabular(3, 2, 2, 0.7, seed);
    const LinearMdp mdp(EmbedTabular(t));
    const ValueTables v = OptimalValues(mdp);
    for (int start = 0; start < 3; ++start) {
      double best = -1.0;
      for (int code = 0; code < 64; ++code) {
        std::vector<int> actions(6);
        for (int i = 0; i < 6; ++i) actions[i] = (code >> i) & 1;
        best = std::max(best, RecursiveValue(t, actions, 0, start));
      }
      EXPECT_NEAR(v.V(0, start), best, 1e-12) << "seed " << seed;
    }
  }
}

TEST(PolicyValueTest, OptimalPolicyIsFixedPoint) {
  const LinearMdp mdp(EmbedTabular(RandomTabular(6, 3, 4, 0.5, 2)));
  const ValueTables opt = OptimalValues(mdp);
  const DeterministicPolicy greedy = GreedyPolicy(mdp, opt);
  const ValueTables val = PolicyValue(mdp, greedy, 0);
  EXPECT_NEAR(val.V(0, 0), opt.V(0, 0), 1e-10);
}

TEST(PolicyValueTest, MatchesRecursionAndMonteCarlo) {
  const TabularMdpSpec t = RandomTabular(3, 2, 3, 1.0, 31);
  const LinearMdp mdp(EmbedTabular(t));
  Rng policy_rng(6);
  DeterministicPolicy policy(3, 3);
  std::vector<int> actions(9);
  for (int h = 0; h < 3; ++h) {
    for (int s = 0; s < 3; ++s) {
      actions[h * 3 + s] = static_cast<int>(policy_rng.UniformInt(2));
      policy.Set(h, s, actions[h * 3 + s]);
    }
  }
  const double exact = PolicyValue(mdp, policy, 0).V(0, 0);
  EXPECT_NEAR(exact, RecursiveValue(t, actions, 0, 0), 1e-12);

  constexpr int kRollouts = 1000000;
  Rng rng(77);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kRollouts; ++i) {
    const double ret =
        mdp.Rollout(0, [&](int h, int x) { return policy.Action(h, x); }, rng)
            .Return();
    sum += ret;
    sum_sq += ret * ret;
  }
  const double mean = sum / kRollouts;
  const double sd = std::sqrt(sum_sq / kRollouts - mean * mean);
  EXPECT_LE(std::abs(mean - exact), 3.0 * sd / std::sqrt(kRollouts));
}

TEST(PolicyValueTest, UndefinedReachableActionIsRejected) {
  const LinearMdp mdp(EmbedTabular(RewardChain(2, 2, 2)));
  DeterministicPolicy partial(2, 2);
  partial.Set(0, 0, 0);
  EXPECT_THROW(PolicyValue(mdp, partial, 0), ContractViolation);
  partial.Set(1, 1, 1);
  EXPECT_NO_THROW(PolicyValue(mdp, partial, 0));
}

}  // namespace
}  // namespace lowswitch
