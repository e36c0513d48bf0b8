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

#ifndef LOWSWITCH_COVARIANCE_H_
#define LOWSWITCH_COVARIANCE_H_

#include <cstdint>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace lowswitch {

// Tolerance on ||phi|| - 1 above which a feature vector is rejected.
inline constexpr double kFeatureNormTolerance = 1e-9;
// Negative slack on the least eigenvalue in the switching test.
inline constexpr double kSwitchTolerance = 1e-10;
// Slack used when asserting the log 2 determinant growth after a switch.
inline constexpr double kDetGrowthTolerance = 1e-8;
inline constexpr int kDefaultRefactorPeriod = 512;

// Throws InvalidArgument unless phi has the expected dimension and
// ||phi|| <= 1 + kFeatureNormTolerance.
void CheckFeature(const Eigen::VectorXd& phi, int dim);

// Regularized empirical covariance lambda*I + sum_t phi_t phi_t^T together
// with its inverse and log-determinant, all maintained under rank-1 updates.
//
// The inverse follows the Sherman-Morrison identity and the log-determinant
// follows the matrix determinant lemma, so an update costs O(d^2). Every
// `refactor_period` updates both are recomputed from a Cholesky factorization
// of the accumulated matrix to bound drift.
//
// Invariants: matrix() >= lambda*I, matrix()*inverse() ~ I, logdet() is
// nondecreasing over the lifetime of the object.
class Covariance {
 public:
  Covariance(int dim, double lambda, int refactor_period = kDefaultRefactorPeriod);

  // Absorbs phi * phi^T.
  void Update(const Eigen::VectorXd& phi);

  // phi^T Lambda^{-1} phi.
  double QuadForm(const Eigen::VectorXd& phi) const;

  int dim() const { return static_cast<int>(matrix_.rows()); }
  double lambda() const { return lambda_; }
  std::int64_t count() const { return count_; }
  int refactor_period() const { return refactor_period_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }
  double logdet() const { return logdet_; }

  // Debug dump: matrix and inverse as row-major nested arrays, logdet, count.
  nlohmann::json ToJson() const;

 private:
  void Refactor();

  double lambda_;
  int refactor_period_;
  std::int64_t count_ = 0;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd inverse_;
  double logdet_;
};

// Least eigenvalue of 2*cur^{-1} - ref^{-1}, computed on the explicitly
// symmetrized matrix.
double DominationMargin(const Covariance& ref, const Covariance& cur);

// True iff ref^{-1} is NOT dominated by 2*cur^{-1}, i.e. some direction has
// gathered at least twice the information it had at the reference snapshot.
// Requires cur - ref to be positive semidefinite (cur absorbed a superset of
// ref's updates); throws ContractViolation otherwise.
bool SwitchRequired(const Covariance& ref, const Covariance& cur,
                    double tolerance = kSwitchTolerance);

// cur.logdet() >= ref.logdet() + log 2 - kDetGrowthTolerance. Must hold
// whenever SwitchRequired(ref, cur) does.
bool VerifyDetGrowth(const Covariance& ref, const Covariance& cur);

}  // namespace lowswitch

#endif  // LOWSWITCH_COVARIANCE_H_
