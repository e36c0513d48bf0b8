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


#include <vector>

#include "Eigen/Core"
#include "benchmark/benchmark.h"
#include "lowswitch/agent.h"
#include "lowswitch/covariance.h"
#include "lowswitch/generators.h"
#include "lowswitch/hard_instance.h"
#include "lowswitch/lemma_checks.h"
#include "lowswitch/linear_mdp.h"
#include "lowswitch/rng.h"

namespace lowswitch {
namespace {

std::vector<Eigen::VectorXd> UnitStream(int dim, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  const Eigen::VectorXd anchor = Eigen::VectorXd::Unit(dim, 0);
  for (int i = 0; i < count; ++i) out.push_back(RandomUnitFeature(anchor, rng));
  return out;
}

void BM_Rank1Update(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const std::vector<Eigen::VectorXd> stream = UnitStream(dim, 4096, 1);
  Covariance cov(dim, 1.0);
  std::size_t i = 0;
  for (auto _ : state) {
    cov.Update(stream[i++ % stream.size()]);
    benchmark::DoNotOptimize(cov.logdet());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Rank1Update)->Arg(4)->Arg(16)->Arg(64);

void BM_QuadForm(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const std::vector<Eigen::VectorXd> stream = UnitStream(dim, 256, 2);
  Covariance cov(dim, 1.0);
  for (const auto& phi : stream) cov.Update(phi);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cov.QuadForm(stream[i++ % stream.size()]));
  }
}
BENCHMARK(BM_QuadForm)->Arg(4)->Arg(16)->Arg(64);

void BM_SwitchRequired(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const std::vector<Eigen::VectorXd> stream = UnitStream(dim, 64, 3);
  Covariance ref(dim, 1.0);
  for (int i = 0; i < 32; ++i) ref.Update(stream[i]);
  Covariance cur = ref;
  for (int i = 32; i < 64; ++i) cur.Update(stream[i]);
  for (auto _ : state) benchmark::DoNotOptimize(SwitchRequired(ref, cur));
}
BENCHMARK(BM_SwitchRequired)->Arg(4)->Arg(16)->Arg(64);

void BM_AgentEpisodesTabular(benchmark::State& state) {
  const LinearMdp mdp(EmbedTabular(RandomTabular(4, 3, 4, 1.0, 0)));
  AgentConfig config;
  config.num_episodes = static_cast<int>(state.range(0));
  config.c_beta = 0.02;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunAgent(mdp, config, 0).CumulativeRegret());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AgentEpisodesTabular)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_AgentEpisodesHardInstance(benchmark::State& state) {
  const HardInstance inst = BuildHardInstance({.d0 = 8, .H0 = 4, .seed = 1});
  const LinearMdp mdp(inst.spec);
  AgentConfig config;
  config.num_episodes = 2000;
  config.c_beta = 0.02;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunAgent(mdp, config, 0).CumulativeRegret());
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_AgentEpisodesHardInstance)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace lowswitch

BENCHMARK_MAIN();
