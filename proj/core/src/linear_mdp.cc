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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "lowswitch/errors.h"

namespace lowswitch {
namespace {

constexpr double kTolerance = 1e-9;

template <typename... Args>
[[noreturn]] void Fail(const Args&... args) {
  std::ostringstream msg;
  msg.precision(17);
  (msg << ... << args);
  throw InvalidArgument(msg.str());
}

void CheckShape(const LinearMdpSpec& spec) {
  if (spec.dim < 1) Fail("spec: d must be >= 1");
  if (spec.horizon < 1) Fail("spec: H must be >= 1");
  if (spec.num_states < 1) Fail("spec: n_states must be >= 1");
  if (static_cast<int>(spec.num_actions.size()) != spec.num_states) {
    Fail("spec: actions_per_state has ", spec.num_actions.size(),
         " entries, expected ", spec.num_states);
  }
  if (static_cast<int>(spec.features.size()) != spec.num_states) {
    Fail("spec: features has ", spec.features.size(), " states, expected ",
         spec.num_states);
  }
  for (int x = 0; x < spec.num_states; ++x) {
    if (spec.num_actions[x] < 1) Fail("spec: state ", x, " has no actions");
    if (static_cast<int>(spec.features[x].size()) != spec.num_actions[x]) {
      Fail("spec: state ", x, " has ", spec.features[x].size(),
           " feature vectors for ", spec.num_actions[x], " actions");
    }
    for (int a = 0; a < spec.num_actions[x]; ++a) {
      const Eigen::VectorXd& phi = spec.features[x][a];
      if (phi.size() != spec.dim) {
        Fail("spec: phi(", x, ",", a, ") has dimension ", phi.size());
      }
      if (!phi.allFinite()) Fail("spec: phi(", x, ",", a, ") is not finite");
      if (phi.norm() > 1.0 + kTolerance) {
        Fail("spec: ||phi(", x, ",", a, ")|| = ", phi.norm(), " > 1");
      }
    }
  }
  if (static_cast<int>(spec.measures.size()) != spec.horizon ||
      static_cast<int>(spec.reward_vecs.size()) != spec.horizon) {
    Fail("spec: measures and reward_vecs need one entry per level");
  }
  const double sqrt_d = std::sqrt(static_cast<double>(spec.dim));
  for (int h = 0; h < spec.horizon; ++h) {
    const Eigen::MatrixXd& mu = spec.measures[h];
    if (mu.rows() != spec.num_states || mu.cols() != spec.dim) {
      Fail("spec: measures[", h, "] is ", mu.rows(), "x", mu.cols(),
           ", expected ", spec.num_states, "x", spec.dim);
    }
    if (!mu.allFinite()) Fail("spec: measures[", h, "] is not finite");
    for (int x = 0; x < spec.num_states; ++x) {
      if (mu.row(x).norm() > sqrt_d + kTolerance) {
        Fail("spec: ||mu_", h + 1, "(", x, ")|| exceeds sqrt(d)");
      }
    }
    const double total = mu.cwiseAbs().colwise().sum().norm();
    if (total > sqrt_d + kTolerance) {
      Fail("spec: ||sum_x |mu_", h + 1, "(x)||| = ", total,
           " exceeds sqrt(d)");
    }
    const Eigen::VectorXd& theta = spec.reward_vecs[h];
    if (theta.size() != spec.dim) {
      Fail("spec: reward_vecs[", h, "] has dimension ", theta.size());
    }
    if (!theta.allFinite()) Fail("spec: reward_vecs[", h, "] is not finite");
    if (theta.norm() > sqrt_d + kTolerance) {
      Fail("spec: ||theta_", h + 1, "|| exceeds sqrt(d)");
    }
  }
  if (spec.initial_state < 0 || spec.initial_state >= spec.num_states) {
    Fail("spec: initial_state ", spec.initial_state, " out of range");
  }
}

}  // namespace

double EpisodeTrajectory::Return() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

int SampleCategorical(std::span<const double> probs, double uniform) {
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cumulative += probs[i];
    if (uniform < cumulative) return last_positive;
  }
  if (last_positive < 0) throw ContractViolation("categorical: no mass");
  return last_positive;
}

void ValidateSpec(const LinearMdpSpec& spec) { LinearMdp mdp(spec); }

void ValidateSpec(const TabularMdpSpec& spec) {
  if (spec.num_states < 1 || spec.num_actions < 1 || spec.horizon < 1) {
    Fail("tabular spec: S, A, H must be >= 1");
  }
  const int s_count = spec.num_states;
  const int a_count = spec.num_actions;
  if (static_cast<int>(spec.transitions.size()) != spec.horizon ||
      static_cast<int>(spec.rewards.size()) != spec.horizon) {
    Fail("tabular spec: transitions and rewards need one entry per level");
  }
  for (int h = 0; h < spec.horizon; ++h) {
    const Eigen::MatrixXd& p = spec.transitions[h];
    if (p.rows() != s_count * a_count || p.cols() != s_count) {
      Fail("tabular spec: transitions[", h, "] has shape ", p.rows(), "x",
           p.cols());
    }
    for (int row = 0; row < p.rows(); ++row) {
      if (!p.row(row).allFinite() || p.row(row).minCoeff() < -kTolerance) {
        Fail("tabular spec: negative or non-finite transition at level ",
             h + 1, ", row ", row);
      }
      if (std::abs(p.row(row).sum() - 1.0) > kTolerance) {
        Fail("tabular spec: transition row ", row, " at level ", h + 1,
             " sums to ", p.row(row).sum());
      }
    }
    const Eigen::MatrixXd& r = spec.rewards[h];
    if (r.rows() != s_count || r.cols() != a_count) {
      Fail("tabular spec: rewards[", h, "] has shape ", r.rows(), "x",
           r.cols());
    }
    if (!r.allFinite() || r.minCoeff() < -kTolerance ||
        r.maxCoeff() > 1.0 + kTolerance) {
      Fail("tabular spec: rewards at level ", h + 1, " leave [0, 1]");
    }
  }
  if (spec.initial_state < 0 || spec.initial_state >= s_count) {
    Fail("tabular spec: initial_state out of range");
  }
}

LinearMdp::LinearMdp(LinearMdpSpec spec) : spec_(std::move(spec)) {
  CheckShape(spec_);
  pair_offset_.resize(spec_.num_states);
  for (int x = 0; x < spec_.num_states; ++x) {
    pair_offset_[x] = static_cast<int>(pair_state_.size());
    for (int a = 0; a < spec_.num_actions[x]; ++a) pair_state_.push_back(x);
    max_actions_ = std::max(max_actions_, spec_.num_actions[x]);
  }
  const int pairs = num_pairs();
  Eigen::MatrixXd phi(pairs, spec_.dim);
  for (int x = 0; x < spec_.num_states; ++x) {
    for (int a = 0; a < spec_.num_actions[x]; ++a) {
      phi.row(PairIndex(x, a)) = spec_.features[x][a].transpose();
    }
  }
  kernels_.resize(spec_.horizon);
  rewards_.resize(spec_.horizon);
  for (int h = 0; h < spec_.horizon; ++h) {
    kernels_[h] = phi * spec_.measures[h].transpose();
    rewards_[h] = phi * spec_.reward_vecs[h];
    for (int i = 0; i < pairs; ++i) {
      const int x = pair_state_[i];
      const int a = i - pair_offset_[x];
      auto row = kernels_[h].row(i);
      if (row.minCoeff() < -kTolerance || row.maxCoeff() > 1.0 + kTolerance) {
        Fail("spec: P_", h + 1, "(.|", x, ",", a, ") has an entry outside [0, 1]");
      }
      if (std::abs(row.sum() - 1.0) > kTolerance) {
        Fail("spec: P_", h + 1, "(.|", x, ",", a, ") sums to ", row.sum());
      }
      row = row.cwiseMax(0.0);
      const double r = rewards_[h](i);
      if (r < -kTolerance || r > 1.0 + kTolerance) {
        Fail("spec: r_", h + 1, "(", x, ",", a, ") = ", r, " outside [0, 1]");
      }
    }
  }
}

void LinearMdp::CheckState(int state) const {
  if (state < 0 || state >= spec_.num_states) Fail("invalid state ", state);
}

void LinearMdp::CheckAction(int state, int action) const {
  CheckState(state);
  if (action < 0 || action >= spec_.num_actions[state]) {
    Fail("action ", action, " is infeasible at state ", state);
  }
}

void LinearMdp::CheckLevel(int level) const {
  if (level < 0 || level >= spec_.horizon) Fail("invalid level ", level);
}

std::span<const double> LinearMdp::Transition(int level, int state,
                                              int action) const {
  const auto& kernel = kernels_[level];
  return {kernel.data() + PairIndex(state, action) * kernel.cols(),
          static_cast<std::size_t>(kernel.cols())};
}

StepResult LinearMdp::Step(int level, int state, int action, Rng& rng) const {
  CheckLevel(level);
  CheckAction(state, action);
  const double u = rng.Uniform();
  return {Reward(level, state, action),
          SampleCategorical(Transition(level, state, action), u)};
}

}  // namespace lowswitch
