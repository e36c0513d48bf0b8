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

#ifndef LOWSWITCH_LEMMA_CHECKS_H_
#define LOWSWITCH_LEMMA_CHECKS_H_

#include <cstdint>

#include <Eigen/Dense>

#include "lowswitch/rng.h"

namespace lowswitch {

// Uniformly random unit vector; with probability 1/2 it is tilted toward
// `anchor` so that streams concentrate enough for switches to fire.
Eigen::VectorXd RandomUnitFeature(const Eigen::VectorXd& anchor, Rng& rng);

// Log-determinant from a fresh Cholesky factorization.
double DirectLogDet(const Eigen::MatrixXd& m);

struct DetGrowthSweep {
  int trials = 0;
  // Trials in which the switching test fired (the rest hit the update cap).
  int switch_instances = 0;
  // Instances violating the log 2 growth, by the maintained log det or by a
  // direct factorization of the explicitly summed matrices.
  int failures = 0;
  double min_gap = 0.0;
};

// For each trial: build a reference covariance from a random unit-feature
// prefix, keep absorbing features until the switching test fires, and check
// log det(cur) - log det(ref) >= log 2 - 1e-8.
DetGrowthSweep RunDetGrowthSweep(int trials, int dim, std::uint64_t seed,
                                 double lambda = 1.0);

struct LogdetBound {
  double logdet = 0.0;
  double direct_logdet = 0.0;
  double bound = 0.0;
  bool holds = false;
};

// Absorbs `updates` random unit features and compares log det against
// d log d + d log(K + lambda) (+1e-6).
LogdetBound CheckLogdetBound(int dim, int updates, std::uint64_t seed,
                             double lambda = 1.0);

}  // namespace lowswitch

#endif  // LOWSWITCH_LEMMA_CHECKS_H_
