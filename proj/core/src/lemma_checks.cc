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

#include "lowswitch/lemma_checks.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lowswitch/covariance.h"
#include "lowswitch/errors.h"

namespace lowswitch {

Eigen::VectorXd RandomUnitFeature(const Eigen::VectorXd& anchor, Rng& rng) {
  const Eigen::Index d = anchor.size();
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.Normal();
  if (rng.Uniform() < 0.5) v = anchor + 0.3 * v / std::sqrt(static_cast<double>(d));
  const double norm = v.norm();
  if (!(norm > 0.0)) return anchor;
  return v / norm;
}

double DirectLogDet(const Eigen::MatrixXd& m) {
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalFault("log det: not SPD");
  const Eigen::MatrixXd l = llt.matrixL();
  return 2.0 * l.diagonal().array().log().sum();
}

DetGrowthSweep RunDetGrowthSweep(int trials, int dim, std::uint64_t seed,
                                 double lambda) {
  if (trials < 0 || dim < 1) throw InvalidArgument("det growth sweep: bad sizes");
  DetGrowthSweep out;
  out.trials = trials;
  out.min_gap = std::numeric_limits<double>::infinity();
  const double log2 = std::log(2.0);
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd anchor(dim);
    for (int i = 0; i < dim; ++i) anchor(i) = rng.Normal();
    anchor.normalize();

    Covariance ref(dim, lambda);
    Eigen::MatrixXd ref_sum = lambda * Eigen::MatrixXd::Identity(dim, dim);
    const int prefix = static_cast<int>(rng.UniformInt(64));
    for (int i = 0; i < prefix; ++i) {
      const Eigen::VectorXd phi = RandomUnitFeature(anchor, rng);
      ref.Update(phi);
      ref_sum += phi * phi.transpose();
    }
    Covariance cur = ref;
    Eigen::MatrixXd cur_sum = ref_sum;
    const int cap = 200 * dim + 2000;
    bool fired = false;
    for (int i = 0; i < cap && !fired; ++i) {
      const Eigen::VectorXd phi = RandomUnitFeature(anchor, rng);
      cur.Update(phi);
      cur_sum += phi * phi.transpose();
      fired = SwitchRequired(ref, cur);
    }
    if (!fired) continue;
    ++out.switch_instances;
    const double direct_gap = DirectLogDet(cur_sum) - DirectLogDet(ref_sum);
    const double gap = cur.logdet() - ref.logdet();
    out.min_gap = std::min({out.min_gap, gap, direct_gap});
    if (!VerifyDetGrowth(ref, cur) || direct_gap < log2 - kDetGrowthTolerance) {
      ++out.failures;
    }
  }
  return out;
}

LogdetBound CheckLogdetBound(int dim, int updates, std::uint64_t seed,
                             double lambda) {
  Rng rng(seed);
  Eigen::VectorXd anchor(dim);
  for (int i = 0; i < dim; ++i) anchor(i) = rng.Normal();
  anchor.normalize();
  Covariance cov(dim, lambda);
  for (int i = 0; i < updates; ++i) cov.Update(RandomUnitFeature(anchor, rng));
  LogdetBound out;
  out.logdet = cov.logdet();
  out.direct_logdet = DirectLogDet(cov.matrix());
  out.bound = dim * std::log(static_cast<double>(dim)) +
              dim * std::log(static_cast<double>(updates) + lambda);
  out.holds = out.logdet <= out.bound + 1e-6 && out.direct_logdet <= out.bound + 1e-6;
  return out;
}

}  // namespace lowswitch
