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

#include "lowswitch/hard_instance.h"

#include <set>
#include <sstream>
#include <string>

#include "lowswitch/errors.h"
#include "lowswitch/rng.h"

namespace lowswitch {
namespace {

constexpr int kUnrouted = -1;

HardInstance ResolveParams(const HardInstanceParams& params) {
  if (params.d0 < 2) throw InvalidArgument("hard instance: d0 must be >= 2");
  if (params.H0 < 1) throw InvalidArgument("hard instance: H0 must be >= 1");
  if (params.j_star != 0 && params.j_star != 1) {
    throw InvalidArgument("hard instance: j_star must be 0 or 1");
  }
  Rng rng(params.seed);
  HardInstance out;
  out.d0 = params.d0;
  out.H0 = params.H0;
  out.j_star = params.j_star;
  out.h_star = params.h_star ? *params.h_star
                             : 1 + static_cast<int>(rng.UniformInt(params.H0));
  if (out.h_star < 1 || out.h_star > params.H0) {
    throw InvalidArgument("hard instance: h_star must lie in [1, H0]");
  }
  if (params.correct_actions) {
    out.correct_actions = *params.correct_actions;
    if (static_cast<int>(out.correct_actions.size()) != out.h_star) {
      throw InvalidArgument(
          "hard instance: correct_actions must have h_star entries");
    }
    for (int i : out.correct_actions) {
      if (i < 0 || i >= params.d0) {
        throw InvalidArgument("hard instance: correct action out of [0, d0)");
      }
    }
  } else {
    for (int h = 0; h < out.h_star; ++h) {
      out.correct_actions.push_back(static_cast<int>(rng.UniformInt(params.d0)));
    }
  }
  return out;
}

}  // namespace

bool HardInstance::IsWrongLockState(int state) const {
  if (!IsLockState(state)) return false;
  const int level = (state - kFirstLockState) / d0;
  const int index = (state - kFirstLockState) % d0;
  return level >= h_star || correct_actions[level] != index;
}

HardInstance BuildHardInstance(const HardInstanceParams& params) {
  HardInstance inst = ResolveParams(params);
  const int d0 = inst.d0;
  const int d = 4 * d0;
  const int horizon = 2 * inst.H0;
  const int num_states = HardInstance::kFirstLockState + inst.H0 * d0;
  const int v_coord = 3 * d0;
  const int w_coord = 4 * d0 - 1;
  auto lock_coord = [d0](int i) { return 2 * d0 + i; };

  LinearMdpSpec& spec = inst.spec;
  spec.dim = d;
  spec.horizon = horizon;
  spec.num_states = num_states;
  spec.num_actions.assign(num_states, 1);
  spec.num_actions[HardInstance::kU] = d0;
  spec.features.resize(num_states);
  for (int j = 0; j < d0; ++j) {
    spec.features[HardInstance::kU].push_back(Eigen::VectorXd::Unit(d, j));
  }
  spec.features[HardInstance::kV].push_back(Eigen::VectorXd::Unit(d, v_coord));
  spec.features[HardInstance::kW].push_back(Eigen::VectorXd::Unit(d, w_coord));
  for (int h = 0; h < inst.H0; ++h) {
    for (int i = 0; i < d0; ++i) {
      spec.features[inst.LockState(h, i)].push_back(
          Eigen::VectorXd::Unit(d, lock_coord(i)));
    }
  }

  // Each level's kernel is deterministic: feature coordinate c sends all of
  // its mass to route[c], so mu_t(x') = sum of e_c over coordinates routed
  // to x'. Coordinates no feature uses stay unrouted.
  const int final_lock = inst.h_star - 1;
  for (int t = 0; t < horizon; ++t) {
    std::vector<int> route(d, kUnrouted);
    route[v_coord] = HardInstance::kV;
    route[w_coord] = HardInstance::kW;
    const int lock_level = t / 2;
    if (t % 2 == 0) {
      // u picks the lock state of this level.
      for (int j = 0; j < d0; ++j) route[j] = inst.LockState(lock_level, j);
      for (int i = 0; i < d0; ++i) route[lock_coord(i)] = HardInstance::kW;
    } else {
      for (int c = 0; c < 2 * d0; ++c) route[c] = HardInstance::kW;
      for (int i = 0; i < d0; ++i) route[lock_coord(i)] = HardInstance::kW;
      if (lock_level < final_lock) {
        route[lock_coord(inst.correct_actions[lock_level])] = HardInstance::kU;
      } else if (lock_level == final_lock) {
        const int i_star = inst.correct_actions[final_lock];
        route[lock_coord(i_star)] = HardInstance::kV;
        route[inst.j_star * d0 + i_star] = HardInstance::kV;
      }
    }
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(num_states, d);
    for (int c = 0; c < d; ++c) {
      if (route[c] != kUnrouted) mu(route[c], c) = 1.0;
    }
    spec.measures.push_back(std::move(mu));
    spec.reward_vecs.push_back(Eigen::VectorXd::Unit(d, v_coord));
  }
  spec.initial_state = HardInstance::kU;

  spec.metadata["hard_instance_meta"] = {
      {"d0", d0},
      {"H0", inst.H0},
      {"h_star", inst.h_star},
      {"correct_actions", inst.correct_actions},
      {"j_star", inst.j_star},
      {"state_layout",
       {{"u", HardInstance::kU},
        {"v", HardInstance::kV},
        {"w", HardInstance::kW},
        {"first_lock_state", HardInstance::kFirstLockState},
        {"lock_state_id", "first_lock_state + (h-1)*d0 + i"}}},
      {"reconciliations",
       {"0-based coordinates: phi(u,a_j)=e_j, phi(s_{h,i})=e_{2*d0+i}, "
        "phi(v)=e_{3*d0}, phi(w)=e_{4*d0-1} (last coordinate), so v and w do "
        "not collide with lock features and every index fits in d=4*d0",
        "step indexing: u is occupied at steps 2h-1, s_{h,i} at steps 2h, and "
        "v is entered at step 2h*+1, giving V_1*(u) = H - 2h*",
        "lock states exist for h in [H0] only; s_{h,i} with h > H0 would be "
        "unreachable",
        "the last correct lock state s_{h*,i_h*} reaches v through its own "
        "feature coordinate 2*d0+i_h*; the literal entry j_star*d0+i_h* is "
        "also routed to v and removed from w",
        "rows of (state, step) combinations that cannot occur are routed to "
        "w so every kernel row is a distribution"}}};

  try {
    ValidateSpec(spec);
  } catch (const InvalidArgument& e) {
    throw ContractViolation(std::string("hard instance construction: ") +
                            e.what());
  }
  return inst;
}

int CountDistinctWrongStates(std::span<const EpisodeTrajectory> traces,
                             const HardInstance& instance) {
  const int horizon = instance.spec.horizon;
  std::set<int> wrong;
  for (const EpisodeTrajectory& traj : traces) {
    if (static_cast<int>(traj.states.size()) != horizon + 1 ||
        static_cast<int>(traj.actions.size()) != horizon) {
      throw InvalidArgument("trace length does not match the hard instance");
    }
    if (traj.states.front() != HardInstance::kU) {
      throw InvalidArgument("trace does not start at u");
    }
    for (int x : traj.states) {
      if (x < 0 || x >= instance.spec.num_states) {
        throw InvalidArgument("trace visits a state outside the hard instance");
      }
      if (instance.IsWrongLockState(x)) wrong.insert(x);
    }
  }
  return static_cast<int>(wrong.size());
}

}  // namespace lowswitch
