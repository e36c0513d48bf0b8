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

#ifndef LOWSWITCH_GENERATORS_H_
#define LOWSWITCH_GENERATORS_H_

#include <cstdint>

#include "lowswitch/linear_mdp.h"
#include "lowswitch/rng.h"

namespace lowswitch {

// Canonical-basis embedding: d = S*A, phi(s, a) = e_{s*A + a}, mu_h(x') holds
// P_h(x' | s, a) at index s*A + a and theta_h holds r_h(s, a).
LinearMdpSpec EmbedTabular(const TabularMdpSpec& spec);

// One transition of the tabular model, sampled exactly like LinearMdp::Step
// so that the two representations agree under shared randomness.
StepResult TabularStep(const TabularMdpSpec& spec, int level, int state,
                       int action, Rng& rng);

// Random tabular MDP. Every (level, state, action) row puts symmetric
// Dirichlet(1) mass on ceil(sparsity * S) distinct successors; rewards are
// uniform on [0, 1]. Deterministic given the seed.
TabularMdpSpec RandomTabular(int num_states, int num_actions, int horizon,
                             double sparsity, std::uint64_t seed);

struct RandomLinearOptions {
  int dim = 0;
  int horizon = 0;
  int num_states = 0;
  int num_actions = 2;
  std::uint64_t seed = 0;
  // Use phi(x, a) = e_{x*A + a}; needs dim == num_states * num_actions.
  bool corner_features = false;
  int max_attempts = 16;
};

// Linear MDP built as a mixture of `dim` anchor kernels per level: column j
// of mu_h is a random distribution over states, phi(x, a) lies on the
// probability simplex and theta_h has entries in [0, 1], so every kernel row
// is a distribution and every reward lies in [0, 1].
LinearMdpSpec RandomLinear(const RandomLinearOptions& options);

}  // namespace lowswitch

#endif  // LOWSWITCH_GENERATORS_H_
