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

#include "lowswitch/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "lowswitch/errors.h"
#include "lowswitch/generators.h"
#include "lowswitch/hard_instance.h"
#include "lowswitch/serialization.h"

namespace lowswitch {
namespace {

using nlohmann::json;

// Typed, path-aware accessors over one JSON object; rejects unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, std::set<std::string> allowed)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) Fail(path_, "expected an object");
    for (const auto& [key, _] : obj_.items()) {
      if (!allowed.count(key)) Fail(Child(key), "unknown key '" + key + "'");
    }
  }

  [[noreturn]] static void Fail(const std::string& path, const std::string& what) {
    throw InvalidArgument("config: " + path + ": " + what);
  }

  std::string Child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  bool Has(const std::string& key) const { return obj_.contains(key); }
  const json& Get(const std::string& key) const {
    if (!Has(key)) Fail(Child(key), "missing required field");
    return obj_.at(key);
  }

  std::int64_t Int(const std::string& key) const {
    const json& v = Get(key);
    if (!v.is_number_integer()) Fail(Child(key), "expected an integer");
    return v.get<std::int64_t>();
  }
  int PositiveInt(const std::string& key) const {
    const std::int64_t v = Int(key);
    if (v < 1 || v > std::numeric_limits<int>::max()) {
      Fail(Child(key), "must be a positive integer");
    }
    return static_cast<int>(v);
  }
  double Number(const std::string& key) const {
    const json& v = Get(key);
    if (!v.is_number()) Fail(Child(key), "expected a number");
    return v.get<double>();
  }
  bool Bool(const std::string& key) const {
    const json& v = Get(key);
    if (!v.is_boolean()) Fail(Child(key), "expected a boolean");
    return v.get<bool>();
  }
  std::string String(const std::string& key) const {
    const json& v = Get(key);
    if (!v.is_string()) Fail(Child(key), "expected a string");
    return v.get<std::string>();
  }
  std::uint64_t Seed(const std::string& key) const {
    const json& v = Get(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      Fail(Child(key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

 private:
  const json& obj_;
  std::string path_;
};

EnvironmentConfig ParseEnvironment(const json& env) {
  if (!env.is_object() || env.size() != 1) {
    ObjectReader::Fail("environment",
                       "expected exactly one of tabular_random, linear_random, "
                       "hard_instance, from_file");
  }
  const std::string kind = env.begin().key();
  const json& body = env.begin().value();
  const std::string path = "environment." + kind;
  if (kind == "tabular_random") {
    ObjectReader r(body, path, {"S", "A", "H", "sparsity", "seed"});
    TabularRandomEnv out;
    out.num_states = r.PositiveInt("S");
    out.num_actions = r.PositiveInt("A");
    out.horizon = r.PositiveInt("H");
    if (r.Has("sparsity")) out.sparsity = r.Number("sparsity");
    if (!(out.sparsity > 0.0 && out.sparsity <= 1.0)) {
      ObjectReader::Fail(r.Child("sparsity"), "must lie in (0, 1]");
    }
    if (r.Has("seed")) out.seed = r.Seed("seed");
    return out;
  }
  if (kind == "linear_random") {
    ObjectReader r(body, path, {"d", "H", "n_states", "n_actions", "seed"});
    LinearRandomEnv out;
    out.dim = r.PositiveInt("d");
    out.horizon = r.PositiveInt("H");
    out.num_states = r.PositiveInt("n_states");
    if (r.Has("n_actions")) out.num_actions = r.PositiveInt("n_actions");
    if (r.Has("seed")) out.seed = r.Seed("seed");
    return out;
  }
  if (kind == "hard_instance") {
    ObjectReader r(body, path,
                   {"d0", "H0", "h_star", "j_star", "correct_actions", "seed"});
    HardInstanceEnv out;
    out.d0 = r.PositiveInt("d0");
    out.H0 = r.PositiveInt("H0");
    if (out.d0 < 2) ObjectReader::Fail(r.Child("d0"), "must be >= 2");
    if (r.Has("h_star") && !r.Get("h_star").is_null()) {
      out.h_star = r.PositiveInt("h_star");
      if (*out.h_star > out.H0) ObjectReader::Fail(r.Child("h_star"), "must lie in [1, H0]");
    }
    if (r.Has("j_star")) {
      const std::int64_t j = r.Int("j_star");
      if (j != 0 && j != 1) ObjectReader::Fail(r.Child("j_star"), "must be 0 or 1");
      out.j_star = static_cast<int>(j);
    }
    if (r.Has("correct_actions") && !r.Get("correct_actions").is_null()) {
      const json& arr = r.Get("correct_actions");
      if (!arr.is_array()) ObjectReader::Fail(r.Child("correct_actions"), "expected an array");
      std::vector<int> actions;
      for (const auto& v : arr) {
        if (!v.is_number_integer()) {
          ObjectReader::Fail(r.Child("correct_actions"), "expected integers");
        }
        actions.push_back(v.get<int>());
      }
      out.correct_actions = std::move(actions);
    }
    if (r.Has("seed")) out.seed = r.Seed("seed");
    return out;
  }
  if (kind == "from_file") {
    ObjectReader r(body, path, {"path"});
    return FromFileEnv{r.String("path")};
  }
  ObjectReader::Fail("environment", "unknown environment type '" + kind + "'");
}

AgentConfig ParseAgent(const json& body) {
  ObjectReader r(body, "agent",
                 {"lambda", "beta", "c_beta", "p", "mode", "strict_paper",
                  "recompute_every_episode", "refactor_period"});
  AgentConfig out;
  if (r.Has("lambda")) {
    out.lambda = r.Number("lambda");
    if (!(out.lambda > 0.0)) ObjectReader::Fail(r.Child("lambda"), "must be > 0");
  }
  if (r.Has("beta")) {
    const json& beta = r.Get("beta");
    if (beta.is_string()) {
      if (beta.get<std::string>() != "auto") {
        ObjectReader::Fail(r.Child("beta"), "expected a number or \"auto\"");
      }
    } else {
      out.beta = r.Number("beta");
      if (!(*out.beta > 0.0)) ObjectReader::Fail(r.Child("beta"), "must be > 0");
    }
  }
  if (r.Has("c_beta")) {
    out.c_beta = r.Number("c_beta");
    if (!(out.c_beta > 0.0)) ObjectReader::Fail(r.Child("c_beta"), "must be > 0");
  }
  if (r.Has("p")) {
    out.p = r.Number("p");
    if (!(out.p > 0.0 && out.p < 1.0)) ObjectReader::Fail(r.Child("p"), "must lie in (0, 1)");
  }
  if (r.Has("mode")) {
    const std::string mode = r.String("mode");
    if (mode != "low_switch" && mode != "always_switch") {
      ObjectReader::Fail(r.Child("mode"), "expected low_switch or always_switch");
    }
    out.mode = ParseAgentMode(mode);
  }
  if (r.Has("strict_paper")) out.floor_at_zero = !r.Bool("strict_paper");
  if (r.Has("recompute_every_episode")) {
    out.recompute_every_episode = r.Bool("recompute_every_episode");
  }
  if (r.Has("refactor_period")) out.refactor_period = r.PositiveInt("refactor_period");
  return out;
}

json EnvironmentToJson(const EnvironmentConfig& env) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        json body;
        if constexpr (std::is_same_v<T, TabularRandomEnv>) {
          body = {{"S", e.num_states}, {"A", e.num_actions},
                  {"H", e.horizon}, {"sparsity", e.sparsity}};
          if (e.seed) body["seed"] = *e.seed;
          return {{"tabular_random", body}};
        } else if constexpr (std::is_same_v<T, LinearRandomEnv>) {
          body = {{"d", e.dim}, {"H", e.horizon}, {"n_states", e.num_states},
                  {"n_actions", e.num_actions}};
          if (e.seed) body["seed"] = *e.seed;
          return {{"linear_random", body}};
        } else if constexpr (std::is_same_v<T, HardInstanceEnv>) {
          body = {{"d0", e.d0}, {"H0", e.H0}, {"j_star", e.j_star}};
          if (e.h_star) body["h_star"] = *e.h_star;
          if (e.correct_actions) body["correct_actions"] = *e.correct_actions;
          if (e.seed) body["seed"] = *e.seed;
          return {{"hard_instance", body}};
        } else {
          return {{"from_file", {{"path", e.path}}}};
        }
      },
      env);
}

json ScalingJson(const std::vector<RunResult>& runs) {
  std::map<int, std::pair<double, double>> sums;  // K -> (switches, regret)
  std::map<int, int> counts;
  for (const auto& run : runs) {
    auto& s = sums[run.num_episodes];
    s.first += static_cast<double>(run.report.global_switches);
    s.second += run.trace.CumulativeRegret();
    ++counts[run.num_episodes];
  }
  json points = json::array();
  std::vector<ScalingPoint> switch_points, regret_points;
  for (const auto& [k, s] : sums) {
    const double n = counts[k];
    points.push_back({{"K", k},
                      {"mean_global_switches", s.first / n},
                      {"mean_cumulative_regret", s.second / n}});
    switch_points.push_back({static_cast<double>(k), s.first / n});
    regret_points.push_back({static_cast<double>(k), s.second / n});
  }
  json out = {{"points", points}};
  if (sums.size() < 3) {
    out["status"] = "insufficient_points";
    return out;
  }
  const ScalingFit sw = FitScaling(switch_points);
  const ScalingFit rg = FitScaling(regret_points);
  out["status"] = "ok";
  out["switches_vs_logK"] = {{"intercept", sw.log_intercept},
                             {"slope", sw.log_slope},
                             {"rmse", sw.log_rmse}};
  json regret = {{"valid", rg.power_valid}};
  if (rg.power_valid) {
    regret["coef"] = rg.power_coef;
    regret["loglog_slope"] = rg.power_slope;
    regret["rmse"] = rg.power_rmse;
  }
  out["regret_power_law"] = regret;
  return out;
}

}  // namespace

ExperimentConfig ParseConfig(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  ObjectReader r(root, "",
                 {"version", "environment", "agent", "K_schedule", "seeds",
                  "output_dir", "parallelism"});
  if (r.Has("version") && r.Int("version") != kConfigVersion) {
    ObjectReader::Fail("version", "unsupported config version");
  }
  ExperimentConfig config;
  config.environment = ParseEnvironment(r.Get("environment"));
  if (r.Has("agent")) config.agent = ParseAgent(r.Get("agent"));

  const json& schedule = r.Get("K_schedule");
  if (!schedule.is_array() || schedule.empty()) {
    ObjectReader::Fail("K_schedule", "expected a nonempty array");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const json& k = schedule[i];
    if (!k.is_number_integer() || k.get<std::int64_t>() < 1 ||
        k.get<std::int64_t>() > std::numeric_limits<int>::max()) {
      ObjectReader::Fail("K_schedule[" + std::to_string(i) + "]",
                         "must be a positive integer");
    }
    config.k_schedule.push_back(k.get<int>());
  }
  const json& seeds = r.Get("seeds");
  if (!seeds.is_array() || seeds.empty()) {
    ObjectReader::Fail("seeds", "expected a nonempty array");
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const json& s = seeds[i];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      ObjectReader::Fail("seeds[" + std::to_string(i) + "]",
                         "must be a nonnegative integer");
    }
    config.seeds.push_back(s.get<std::uint64_t>());
  }
  if (r.Has("output_dir")) config.output_dir = r.String("output_dir");
  if (r.Has("parallelism")) config.parallelism = r.PositiveInt("parallelism");
  config.agent.num_episodes = config.k_schedule.front();
  ValidateConfig(config.agent);
  return config;
}

json ConfigToJson(const ExperimentConfig& config) {
  json agent = AgentConfigToJson(config.agent);
  agent.erase("K");
  return {{"version", kConfigVersion},
          {"environment", EnvironmentToJson(config.environment)},
          {"agent", agent},
          {"K_schedule", config.k_schedule},
          {"seeds", config.seeds},
          {"output_dir", config.output_dir},
          {"parallelism", config.parallelism}};
}

LinearMdp BuildEnvironment(const EnvironmentConfig& environment,
                           std::uint64_t run_seed) {
  return std::visit(
      [run_seed](const auto& e) -> LinearMdp {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, TabularRandomEnv>) {
          return LinearMdp(EmbedTabular(
              RandomTabular(e.num_states, e.num_actions, e.horizon, e.sparsity,
                            e.seed.value_or(run_seed))));
        } else if constexpr (std::is_same_v<T, LinearRandomEnv>) {
          RandomLinearOptions options;
          options.dim = e.dim;
          options.horizon = e.horizon;
          options.num_states = e.num_states;
          options.num_actions = e.num_actions;
          options.seed = e.seed.value_or(run_seed);
          return LinearMdp(RandomLinear(options));
        } else if constexpr (std::is_same_v<T, HardInstanceEnv>) {
          HardInstanceParams params;
          params.d0 = e.d0;
          params.H0 = e.H0;
          params.h_star = e.h_star;
          params.correct_actions = e.correct_actions;
          params.j_star = e.j_star;
          params.seed = e.seed.value_or(run_seed);
          return LinearMdp(BuildHardInstance(params).spec);
        } else {
          return LinearMdp(LoadSpecFile(e.path));
        }
      },
      environment);
}

std::string RunResult::TraceFileName() const {
  return "trace_K" + std::to_string(num_episodes) + "_seed" +
         std::to_string(seed) + ".csv";
}

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options) {
  struct Job {
    int k;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int k : config.k_schedule) {
    for (std::uint64_t seed : config.seeds) jobs.push_back({k, seed});
  }
  ExperimentResult result;
  result.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      try {
        const LinearMdp mdp = BuildEnvironment(config.environment, jobs[i].seed);
        AgentConfig agent = config.agent;
        agent.num_episodes = jobs[i].k;
        RunResult& run = result.runs[i];
        run.num_episodes = jobs[i].k;
        run.seed = jobs[i].seed;
        run.trace = RunAgent(mdp, agent, jobs[i].seed, options);
        ValidateTrace(run.trace);
        run.report = MakeSwitchReport(run.trace);
        run.csv = TraceToCsv(run.trace);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::max(
      1, std::min<int>(config.parallelism, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  json runs = json::array();
  for (const auto& run : result.runs) {
    json entry = RunSummaryJson(run.trace, run.report);
    entry["trace_file"] = run.TraceFileName();
    runs.push_back(std::move(entry));
  }
  json replicates = json::array();
  for (int k : config.k_schedule) {
    std::vector<RunTrace> group;
    for (const auto& run : result.runs) {
      if (run.num_episodes == k) group.push_back(run.trace);
    }
    const ReplicateSummary stats = ReplicateStats(group);
    replicates.push_back(
        {{"K", k},
         {"num_runs", stats.num_runs},
         {"mean_cumulative_regret", stats.mean_cumulative_regret.back()},
         {"stderr_cumulative_regret", stats.stderr_cumulative_regret.back()},
         {"min_global_switches", stats.min_switches},
         {"median_global_switches", stats.median_switches},
         {"max_global_switches", stats.max_switches},
         {"mean_bound_ratio", stats.mean_bound_ratio}});
  }
  result.summary = {{"config", ConfigToJson(config)},
                    {"runs", runs},
                    {"replicates", replicates}};
  result.scaling = ScalingJson(result.runs);
  return result;
}

void WriteExperimentOutputs(const ExperimentResult& result,
                            const std::string& output_dir) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + output_dir +
                  "': " + ec.message());
  }
  const std::filesystem::path dir(output_dir);
  for (const auto& run : result.runs) {
    WriteTextFile((dir / run.TraceFileName()).string(), run.csv);
  }
  WriteTextFile((dir / "summary.json").string(), result.summary.dump(2) + "\n");
  WriteTextFile((dir / "scaling_fit.json").string(),
                result.scaling.dump(2) + "\n");
}

}  // namespace lowswitch
