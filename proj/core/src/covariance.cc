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

#include "lowswitch/covariance.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lowswitch/errors.h"

namespace lowswitch {
namespace {

nlohmann::json MatrixToJson(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void CheckFeature(const Eigen::VectorXd& phi, int dim) {
  if (phi.size() != dim) {
    std::ostringstream msg;
    msg << "feature dimension mismatch: got " << phi.size() << ", expected "
        << dim;
    throw InvalidArgument(msg.str());
  }
  const double norm = phi.norm();
  if (!(norm <= 1.0 + kFeatureNormTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "feature norm " << norm << " exceeds 1";
    throw InvalidArgument(msg.str());
  }
}

Covariance::Covariance(int dim, double lambda, int refactor_period)
    : lambda_(lambda), refactor_period_(refactor_period) {
  if (dim < 1) throw InvalidArgument("covariance dimension must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("covariance regularizer lambda must be > 0");
  }
  if (refactor_period < 1) {
    throw InvalidArgument("refactor period must be >= 1");
  }
  matrix_ = lambda * Eigen::MatrixXd::Identity(dim, dim);
  inverse_ = (1.0 / lambda) * Eigen::MatrixXd::Identity(dim, dim);
  logdet_ = dim * std::log(lambda);
}

void Covariance::Update(const Eigen::VectorXd& phi) {
  CheckFeature(phi, dim());
  const Eigen::VectorXd u = inverse_ * phi;
  const double q = std::max(0.0, phi.dot(u));
  const double previous_logdet = logdet_;

  matrix_.noalias() += phi * phi.transpose();
  inverse_.noalias() -= (u * u.transpose()) / (1.0 + q);
  logdet_ += std::log1p(q);
  ++count_;

  if (count_ % refactor_period_ == 0) {
    Refactor();
    // Keep the potential monotone when refactoring lands a hair below the
    // pre-update value.
    logdet_ = std::max(logdet_, previous_logdet);
  }
}

void Covariance::Refactor() {
  const Eigen::LLT<Eigen::MatrixXd> llt(matrix_);
  if (llt.info() != Eigen::Success) {
    throw NumericalFault("Cholesky factorization of covariance failed");
  }
  const Eigen::Index d = matrix_.rows();
  inverse_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
  const Eigen::MatrixXd l = llt.matrixL();
  logdet_ = 2.0 * l.diagonal().array().log().sum();
}

double Covariance::QuadForm(const Eigen::VectorXd& phi) const {
  if (phi.size() != dim()) {
    throw InvalidArgument("quad_form: feature dimension mismatch");
  }
  return std::max(0.0, phi.dot(inverse_ * phi));
}

nlohmann::json Covariance::ToJson() const {
  return {{"dim", dim()},           {"lambda", lambda_},
          {"count", count_},        {"logdet", logdet_},
          {"matrix", MatrixToJson(matrix_)},
          {"inverse", MatrixToJson(inverse_)}};
}

double DominationMargin(const Covariance& ref, const Covariance& cur) {
  if (ref.dim() != cur.dim()) {
    throw InvalidArgument("covariance dimension mismatch");
  }
  Eigen::MatrixXd m = 2.0 * cur.inverse() - ref.inverse();
  m = 0.5 * (m + m.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

bool SwitchRequired(const Covariance& ref, const Covariance& cur,
                    double tolerance) {
  if (ref.dim() != cur.dim()) {
    throw InvalidArgument("covariance dimension mismatch");
  }
  if (cur.count() < ref.count()) {
    throw ContractViolation(
        "switch test: current covariance absorbed fewer updates than the "
        "reference");
  }
  if (cur.count() == ref.count() && cur.matrix() == ref.matrix()) {
    return false;  // 2*A^{-1} - A^{-1} = A^{-1} is positive definite.
  }
  {
    Eigen::MatrixXd diff = cur.matrix() - ref.matrix();
    diff = 0.5 * (diff + diff.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        diff, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, cur.matrix().diagonal().maxCoeff());
    if (solver.eigenvalues()(0) < -1e-9 * scale) {
      throw ContractViolation(
          "switch test: reference covariance is not dominated by the current "
          "one");
    }
  }
  return DominationMargin(ref, cur) < -tolerance;
}

bool VerifyDetGrowth(const Covariance& ref, const Covariance& cur) {
  return cur.logdet() >= ref.logdet() + std::log(2.0) - kDetGrowthTolerance;
}

}  // namespace lowswitch
