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

#include "lowswitch/generators.h"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "lowswitch/errors.h"

namespace lowswitch {
namespace {

// Symmetric Dirichlet(1) sample over `support` randomly chosen coordinates
// out of n; the rest stay zero.
Eigen::VectorXd SparseDirichlet(int n, int support, Rng& rng) {
  std::vector<int> index(n);
  std::iota(index.begin(), index.end(), 0);
  // Partial Fisher-Yates: the first `support` slots become the support.
  for (int i = 0; i < support; ++i) {
    const int j = i + static_cast<int>(rng.UniformInt(n - i));
    std::swap(index[i], index[j]);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (int i = 0; i < support; ++i) {
    double g = 0.0;
    while (!(g > 0.0)) g = rng.Gamma(1.0);
    out(index[i]) = g;
    total += g;
  }
  return out / total;
}

}  // namespace

LinearMdpSpec EmbedTabular(const TabularMdpSpec& spec) {
  ValidateSpec(spec);
  const int s_count = spec.num_states;
  const int a_count = spec.num_actions;
  const int d = s_count * a_count;
  LinearMdpSpec out;
  out.dim = d;
  out.horizon = spec.horizon;
  out.num_states = s_count;
  out.num_actions.assign(s_count, a_count);
  out.features.resize(s_count);
  for (int s = 0; s < s_count; ++s) {
    for (int a = 0; a < a_count; ++a) {
      out.features[s].push_back(Eigen::VectorXd::Unit(d, s * a_count + a));
    }
  }
  for (int h = 0; h < spec.horizon; ++h) {
    // mu_h(x')[s*A + a] = P_h(x' | s, a), i.e. the transposed transition table.
    out.measures.push_back(spec.transitions[h].transpose());
    Eigen::VectorXd theta(d);
    for (int s = 0; s < s_count; ++s) {
      for (int a = 0; a < a_count; ++a) {
        theta(s * a_count + a) = spec.rewards[h](s, a);
      }
    }
    out.reward_vecs.push_back(std::move(theta));
  }
  out.initial_state = spec.initial_state;
  return out;
}

StepResult TabularStep(const TabularMdpSpec& spec, int level, int state,
                       int action, Rng& rng) {
  if (level < 0 || level >= spec.horizon) {
    throw InvalidArgument("tabular step: invalid level");
  }
  if (state < 0 || state >= spec.num_states || action < 0 ||
      action >= spec.num_actions) {
    throw InvalidArgument("tabular step: invalid state or action");
  }
  const double u = rng.Uniform();
  const int row = state * spec.num_actions + action;
  const Eigen::RowVectorXd probs =
      spec.transitions[level].row(row).cwiseMax(0.0);
  return {spec.rewards[level](state, action),
          SampleCategorical({probs.data(), static_cast<std::size_t>(probs.size())}, u)};
}

TabularMdpSpec RandomTabular(int num_states, int num_actions, int horizon,
                             double sparsity, std::uint64_t seed) {
  if (num_states < 1 || num_actions < 1 || horizon < 1) {
    throw InvalidArgument("random_tabular: S, A, H must be >= 1");
  }
  if (!(sparsity > 0.0 && sparsity <= 1.0)) {
    throw InvalidArgument("random_tabular: sparsity must lie in (0, 1]");
  }
  const int support = std::max(
      1, std::min(num_states,
                  static_cast<int>(std::ceil(sparsity * num_states - 1e-12))));
  Rng rng(seed);
  TabularMdpSpec spec;
  spec.num_states = num_states;
  spec.num_actions = num_actions;
  spec.horizon = horizon;
  for (int h = 0; h < horizon; ++h) {
    Eigen::MatrixXd p(num_states * num_actions, num_states);
    for (int row = 0; row < p.rows(); ++row) {
      p.row(row) = SparseDirichlet(num_states, support, rng).transpose();
    }
    Eigen::MatrixXd r(num_states, num_actions);
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) r(s, a) = rng.Uniform();
    }
    spec.transitions.push_back(std::move(p));
    spec.rewards.push_back(std::move(r));
  }
  return spec;
}

LinearMdpSpec RandomLinear(const RandomLinearOptions& options) {
  const int d = options.dim;
  const int n = options.num_states;
  const int a_count = options.num_actions;
  if (d < 1 || options.horizon < 1 || n < 1 || a_count < 1) {
    throw InvalidArgument("random_linear: d, H, n_states, n_actions must be >= 1");
  }
  if (options.corner_features && d != n * a_count) {
    throw InvalidArgument(
        "random_linear: corner features need d == n_states * n_actions");
  }
  std::string last_error;
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    Rng rng = Rng::Derive(options.seed, static_cast<std::uint64_t>(attempt));
    LinearMdpSpec spec;
    spec.dim = d;
    spec.horizon = options.horizon;
    spec.num_states = n;
    spec.num_actions.assign(n, a_count);
    spec.features.resize(n);
    for (int x = 0; x < n; ++x) {
      for (int a = 0; a < a_count; ++a) {
        if (options.corner_features) {
          spec.features[x].push_back(Eigen::VectorXd::Unit(d, x * a_count + a));
        } else {
          spec.features[x].push_back(SparseDirichlet(d, d, rng));
        }
      }
    }
    for (int h = 0; h < options.horizon; ++h) {
      Eigen::MatrixXd mu(n, d);
      for (int j = 0; j < d; ++j) mu.col(j) = SparseDirichlet(n, n, rng);
      Eigen::VectorXd theta(d);
      for (int j = 0; j < d; ++j) theta(j) = rng.Uniform();
      spec.measures.push_back(std::move(mu));
      spec.reward_vecs.push_back(std::move(theta));
    }
    try {
      ValidateSpec(spec);
      return spec;
    } catch (const InvalidArgument& e) {
      last_error = e.what();
    }
  }
  std::ostringstream msg;
  msg << "random_linear: no valid instance after " << options.max_attempts
      << " attempts; last error: " << last_error;
  throw InvalidArgument(msg.str());
}

}  // namespace lowswitch
