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

#include "lowswitch/metrics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lowswitch/errors.h"

namespace lowswitch {
namespace {

struct LineFit {
  double intercept;
  double slope;
  double rmse;
};

LineFit FitLine(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    sse += r * r;
  }
  return {intercept, slope, std::sqrt(sse / n)};
}

bool SameConfig(const AgentConfig& a, const AgentConfig& b) {
  return a.lambda == b.lambda && a.beta == b.beta && a.c_beta == b.c_beta &&
         a.p == b.p && a.mode == b.mode && a.num_episodes == b.num_episodes &&
         a.floor_at_zero == b.floor_at_zero &&
         a.refactor_period == b.refactor_period;
}

}  // namespace

std::vector<std::int64_t> RunTrace::SnapshotIds() const {
  std::vector<std::int64_t> ids;
  ids.reserve(episodes.size());
  for (const auto& e : episodes) ids.push_back(e.snapshot_id);
  return ids;
}

void ValidateTrace(const RunTrace& trace) {
  auto fail = [](int episode, const std::string& what) {
    std::ostringstream msg;
    msg << "trace invariant violated at episode " << episode << ": " << what;
    throw ContractViolation(msg.str());
  };
  std::vector<double> previous = trace.initial_logdets;
  double previous_regret = 0.0;
  for (std::size_t i = 0; i < trace.episodes.size(); ++i) {
    const EpisodeRecord& e = trace.episodes[i];
    if (e.episode != static_cast<int>(i) + 1) fail(e.episode, "episode numbering");
    if (!(e.cumulative_regret >= previous_regret)) {
      fail(e.episode, "cumulative regret decreased");
    }
    if (e.regret_increment < 0.0) fail(e.episode, "negative regret increment");
    const bool id_changed =
        i > 0 && e.snapshot_id != trace.episodes[i - 1].snapshot_id;
    if (e.switched != id_changed) {
      fail(e.episode, "switched flag disagrees with snapshot ids");
    }
    if (e.logdets.size() != previous.size()) fail(e.episode, "logdet count");
    for (std::size_t h = 0; h < e.logdets.size(); ++h) {
      if (e.logdets[h] < previous[h]) fail(e.episode, "log det decreased");
    }
    previous = e.logdets;
    previous_regret = e.cumulative_regret;
  }
}

std::int64_t GlobalSwitchingCost(std::span<const std::int64_t> snapshot_ids) {
  std::int64_t switches = 0;
  for (std::size_t k = 1; k < snapshot_ids.size(); ++k) {
    switches += snapshot_ids[k] != snapshot_ids[k - 1];
  }
  return switches;
}

std::int64_t LocalSwitchingCost(std::span<const DeterministicPolicy> per_episode,
                                std::int64_t cap) {
  if (per_episode.empty()) return 0;
  const int horizon = per_episode.front().horizon();
  const int num_states = per_episode.front().num_states();
  if (static_cast<std::int64_t>(horizon) * num_states > cap) {
    throw InvalidArgument("local switching cost: state space exceeds the cap");
  }
  std::int64_t changes = 0;
  for (std::size_t k = 1; k < per_episode.size(); ++k) {
    const auto& prev = per_episode[k - 1];
    const auto& next = per_episode[k];
    if (next.horizon() != horizon || next.num_states() != num_states) {
      throw InvalidArgument("local switching cost: policy shapes differ");
    }
    for (int h = 0; h < horizon; ++h) {
      for (int x = 0; x < num_states; ++x) {
        changes += prev.Action(h, x) != next.Action(h, x);
      }
    }
  }
  return changes;
}

SwitchReport MakeSwitchReport(const RunTrace& trace) {
  SwitchReport report;
  const auto ids = trace.SnapshotIds();
  report.global_switches = GlobalSwitchingCost(ids);
  std::int64_t local = 0;
  for (const auto& e : trace.episodes) {
    report.switched.push_back(e.switched);
    report.behavioral_switches += e.behavioral_switch;
    local += e.local_switch_delta;
  }
  if (trace.local_tracked) report.local_switches = local;
  const double k = static_cast<double>(trace.num_episodes());
  if (report.global_switches > 0) {
    report.bound_ratio = static_cast<double>(report.global_switches) /
                         (trace.dim * trace.horizon * std::log(k));
  }
  return report;
}

bool SandwichHolds(const SwitchReport& report, int num_states, int horizon) {
  if (!report.local_switches) return true;
  const std::int64_t local = *report.local_switches;
  const std::int64_t scale = static_cast<std::int64_t>(num_states) * horizon;
  return report.behavioral_switches <= local &&
         local <= scale * report.behavioral_switches &&
         local <= scale * report.global_switches;
}

ScalingFit FitScaling(std::span<const ScalingPoint> points) {
  if (points.size() < 3) {
    throw InvalidArgument("scaling fit needs at least 3 points");
  }
  std::vector<double> log_k, values, log_values;
  bool positive = true;
  for (const auto& p : points) {
    if (!(p.episodes > 0.0)) {
      throw InvalidArgument("scaling fit: episode counts must be positive");
    }
    log_k.push_back(std::log(p.episodes));
    values.push_back(p.value);
    positive = positive && p.value > 0.0;
    log_values.push_back(p.value > 0.0 ? std::log(p.value) : 0.0);
  }
  const auto [lo, hi] = std::minmax_element(log_k.begin(), log_k.end());
  if (*lo == *hi) {
    throw InvalidArgument("scaling fit: all points share the same K");
  }
  ScalingFit fit;
  fit.num_points = static_cast<int>(points.size());
  const LineFit log_fit = FitLine(log_k, values);
  fit.log_intercept = log_fit.intercept;
  fit.log_slope = log_fit.slope;
  fit.log_rmse = log_fit.rmse;
  if (positive) {
    const LineFit power_fit = FitLine(log_k, log_values);
    fit.power_valid = true;
    fit.power_coef = std::exp(power_fit.intercept);
    fit.power_slope = power_fit.slope;
    fit.power_rmse = power_fit.rmse;
  }
  return fit;
}

ReplicateSummary ReplicateStats(std::span<const RunTrace> traces) {
  if (traces.empty()) throw InvalidArgument("replicate stats: no traces");
  const RunTrace& first = traces.front();
  const std::size_t episodes = first.episodes.size();
  for (const auto& t : traces) {
    if (!SameConfig(t.config, first.config) || t.dim != first.dim ||
        t.horizon != first.horizon || t.episodes.size() != episodes) {
      throw InvalidArgument("replicate stats: traces have mismatched configs");
    }
  }
  ReplicateSummary out;
  const double n = static_cast<double>(traces.size());
  out.num_runs = static_cast<int>(traces.size());
  out.mean_cumulative_regret.assign(episodes, 0.0);
  out.stderr_cumulative_regret.assign(episodes, 0.0);
  for (std::size_t k = 0; k < episodes; ++k) {
    double sum = 0.0;
    for (const auto& t : traces) sum += t.episodes[k].cumulative_regret;
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& t : traces) {
      const double dev = t.episodes[k].cumulative_regret - mean;
      ss += dev * dev;
    }
    out.mean_cumulative_regret[k] = mean;
    out.stderr_cumulative_regret[k] =
        traces.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  }
  std::vector<std::int64_t> switches;
  double ratio_sum = 0.0;
  for (const auto& t : traces) {
    const SwitchReport report = MakeSwitchReport(t);
    switches.push_back(report.global_switches);
    ratio_sum += report.bound_ratio;
  }
  std::sort(switches.begin(), switches.end());
  out.min_switches = switches.front();
  out.max_switches = switches.back();
  const std::size_t mid = switches.size() / 2;
  out.median_switches =
      switches.size() % 2 == 1
          ? static_cast<double>(switches[mid])
          : 0.5 * static_cast<double>(switches[mid - 1] + switches[mid]);
  out.mean_bound_ratio = ratio_sum / n;
  return out;
}

}  // namespace lowswitch
