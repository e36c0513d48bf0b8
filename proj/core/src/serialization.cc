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

#include "lowswitch/serialization.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "lowswitch/errors.h"

namespace lowswitch {
namespace {

using nlohmann::json;

const json& Require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw InvalidArgument(std::string("spec: missing field '") + key + "'");
  }
  return *it;
}

Eigen::VectorXd ToVector(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw InvalidArgument("spec: " + where + " is not an array");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw InvalidArgument("spec: " + where + " has a non-numeric entry");
    }
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

json FromVector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

json SpecToJson(const LinearMdpSpec& spec) {
  json out;
  out["spec_version"] = kSpecVersion;
  out["d"] = spec.dim;
  out["H"] = spec.horizon;
  out["n_states"] = spec.num_states;
  out["actions_per_state"] = spec.num_actions;
  json features = json::array();
  for (const auto& per_state : spec.features) {
    json row = json::array();
    for (const auto& phi : per_state) row.push_back(FromVector(phi));
    features.push_back(std::move(row));
  }
  out["features"] = std::move(features);
  json measures = json::array();
  for (const auto& mu : spec.measures) {
    json level = json::array();
    for (Eigen::Index x = 0; x < mu.rows(); ++x) {
      level.push_back(FromVector(mu.row(x).transpose()));
    }
    measures.push_back(std::move(level));
  }
  out["measures"] = std::move(measures);
  json rewards = json::array();
  for (const auto& theta : spec.reward_vecs) rewards.push_back(FromVector(theta));
  out["reward_vecs"] = std::move(rewards);
  out["initial_state"] = spec.initial_state;
  if (spec.metadata.contains("hard_instance_meta")) {
    out["hard_instance_meta"] = spec.metadata["hard_instance_meta"];
  }
  return out;
}

LinearMdpSpec SpecFromJson(const json& in) {
  if (!in.is_object()) throw InvalidArgument("spec: top level must be an object");
  static const std::set<std::string> kKnown = {
      "spec_version", "d",          "H",           "n_states",
      "actions_per_state", "features", "measures", "reward_vecs",
      "initial_state", "hard_instance_meta"};
  for (const auto& [key, _] : in.items()) {
    if (!kKnown.count(key)) throw InvalidArgument("spec: unknown field '" + key + "'");
  }
  const json& version = Require(in, "spec_version");
  if (!version.is_number_integer() || version.get<int>() != kSpecVersion) {
    throw InvalidArgument("spec: unsupported spec_version");
  }
  LinearMdpSpec spec;
  try {
    spec.dim = Require(in, "d").get<int>();
    spec.horizon = Require(in, "H").get<int>();
    spec.num_states = Require(in, "n_states").get<int>();
    spec.num_actions = Require(in, "actions_per_state").get<std::vector<int>>();
    spec.initial_state = Require(in, "initial_state").get<int>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("spec: ") + e.what());
  }
  const json& features = Require(in, "features");
  if (!features.is_array()) throw InvalidArgument("spec: features is not an array");
  for (std::size_t x = 0; x < features.size(); ++x) {
    if (!features[x].is_array()) {
      throw InvalidArgument("spec: features[" + std::to_string(x) + "] is not an array");
    }
    std::vector<Eigen::VectorXd> per_state;
    for (std::size_t a = 0; a < features[x].size(); ++a) {
      per_state.push_back(ToVector(
          features[x][a],
          "features[" + std::to_string(x) + "][" + std::to_string(a) + "]"));
    }
    spec.features.push_back(std::move(per_state));
  }
  const json& measures = Require(in, "measures");
  if (!measures.is_array()) throw InvalidArgument("spec: measures is not an array");
  for (std::size_t h = 0; h < measures.size(); ++h) {
    const json& level = measures[h];
    if (!level.is_array()) {
      throw InvalidArgument("spec: measures[" + std::to_string(h) + "] is not an array");
    }
    Eigen::MatrixXd mu(level.size(), spec.dim);
    for (std::size_t x = 0; x < level.size(); ++x) {
      const Eigen::VectorXd row = ToVector(
          level[x], "measures[" + std::to_string(h) + "][" + std::to_string(x) + "]");
      if (row.size() != spec.dim) {
        throw InvalidArgument("spec: measures[" + std::to_string(h) + "][" +
                              std::to_string(x) + "] has the wrong length");
      }
      mu.row(static_cast<Eigen::Index>(x)) = row.transpose();
    }
    spec.measures.push_back(std::move(mu));
  }
  const json& rewards = Require(in, "reward_vecs");
  if (!rewards.is_array()) throw InvalidArgument("spec: reward_vecs is not an array");
  for (std::size_t h = 0; h < rewards.size(); ++h) {
    spec.reward_vecs.push_back(
        ToVector(rewards[h], "reward_vecs[" + std::to_string(h) + "]"));
  }
  if (in.contains("hard_instance_meta")) {
    spec.metadata["hard_instance_meta"] = in["hard_instance_meta"];
  }
  return spec;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return buf.str();
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

LinearMdpSpec LoadSpecFile(const std::string& path) {
  const std::string text = ReadTextFile(path);
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("spec file '" + path + "': " + e.what());
  }
  return SpecFromJson(parsed);
}

void SaveSpecFile(const std::string& path, const LinearMdpSpec& spec) {
  WriteTextFile(path, SpecToJson(spec).dump(2) + "\n");
}

std::string TraceToCsv(const RunTrace& trace) {
  std::string out = "episode,return,regret_increment,cumulative_regret,switched,snapshot_id";
  for (int h = 1; h <= trace.horizon; ++h) out += ",logdet_h" + std::to_string(h);
  out += '\n';
  for (const auto& e : trace.episodes) {
    out += std::to_string(e.episode);
    out += ',' + FormatDouble(e.episode_return);
    out += ',' + FormatDouble(e.regret_increment);
    out += ',' + FormatDouble(e.cumulative_regret);
    out += e.switched ? ",1" : ",0";
    out += ',' + std::to_string(e.snapshot_id);
    for (double logdet : e.logdets) out += ',' + FormatDouble(logdet);
    out += '\n';
  }
  return out;
}

json AgentConfigToJson(const AgentConfig& config) {
  json out = {{"lambda", config.lambda},
              {"c_beta", config.c_beta},
              {"p", config.p},
              {"mode", ToString(config.mode)},
              {"K", config.num_episodes},
              {"strict_paper", !config.floor_at_zero},
              {"refactor_period", config.refactor_period}};
  if (config.beta) {
    out["beta"] = *config.beta;
  } else {
    out["beta"] = "auto";
  }
  return out;
}

json RunSummaryJson(const RunTrace& trace, const SwitchReport& report) {
  json out = {{"K", trace.num_episodes()},
              {"seed", trace.seed},
              {"beta", trace.beta},
              {"agent", AgentConfigToJson(trace.config)},
              {"cumulative_regret", trace.CumulativeRegret()},
              {"global_switches", report.global_switches},
              {"behavioral_switches", report.behavioral_switches},
              {"bound_ratio", report.bound_ratio},
              {"domination_checks", trace.domination_checks},
              {"domination_violations", trace.domination_violations},
              {"worst_domination_gap", trace.worst_domination_gap},
              {"det_growth_checks", trace.det_growth_checks},
              {"det_growth_violations", trace.det_growth_violations},
              {"wall_time_seconds", trace.wall_time_seconds}};
  if (report.local_switches) {
    out["local_switches"] = *report.local_switches;
  } else {
    out["local_switches"] = "n/a";
  }
  return out;
}

}  // namespace lowswitch
