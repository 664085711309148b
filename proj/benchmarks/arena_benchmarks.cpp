// Copyright 2026 The Arena Authors
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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "arena/pairing.hpp"
#include "arena/pii.hpp"
#include "arena/ranking.hpp"

namespace {

using namespace arena;

std::vector<RankingVote> synthetic_votes(int models, int votes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> strength(models);
  std::normal_distribution<double> theta(0.0, 0.7);
  for (auto& s : strength) s = std::exp(theta(rng));
  std::uniform_int_distribution<int> pick(0, models - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RankingVote> out;
  out.reserve(votes);
  for (int k = 0; k < votes; ++k) {
    int i = pick(rng);
    int j = pick(rng);
    while (j == i) j = pick(rng);
    RankingVote v;
    v.conversation_id = "c" + std::to_string(k);
    v.model_a = "m" + std::to_string(i);
    v.model_b = "m" + std::to_string(j);
    v.choice = u(rng) < strength[i] / (strength[i] + strength[j]) ? VoteChoice::a : VoteChoice::b;
    out.push_back(std::move(v));
  }
  return out;
}

void BM_FitBradleyTerry(benchmark::State& state) {
  const auto votes = synthetic_votes(static_cast<int>(state.range(0)), 20 * static_cast<int>(state.range(0)), 1);
  const auto matrix = build_outcome_matrix(votes, {}, RankingWeights{}, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_bradley_terry(matrix));
}
BENCHMARK(BM_FitBradleyTerry)->Arg(5)->Arg(20)->Arg(50);

void BM_Bootstrap(benchmark::State& state) {
  const auto votes = synthetic_votes(10, static_cast<int>(state.range(0)), 2);
  RankingConfig cfg;
  cfg.bootstrap_rounds = 200;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_intervals(votes, {}, cfg));
}
BENCHMARK(BM_Bootstrap)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_DetectPii(benchmark::State& state) {
  Conversation c;
  c.pairing = {"m1", "m2"};
  for (int t = 0; t < 4; ++t) {
    Turn turn;
    turn.turn_index = t;
    turn.user_text = "Pouvez-vous resumer ce texte sur la politique agricole commune et ses effets regionaux ?";
    turn.assistant_a = AssistantMessage{std::string(1500, 'x') + " la reponse continue ici.", 400};
    turn.assistant_b = AssistantMessage{std::string(1500, 'y') + " une autre reponse.", 400};
    c.turns.push_back(std::move(turn));
  }
  const auto detectors = baseline_detectors();
  for (auto _ : state) benchmark::DoNotOptimize(detect_pii(c, detectors));
}
BENCHMARK(BM_DetectPii);

void BM_DrawPair(benchmark::State& state) {
  std::vector<ModelCard> registry(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < registry.size(); ++i) registry[i].model_id = "m" + std::to_string(i);
  PairCounts history;
  PairSampler sampler({PairingMode::coverage_balanced, 7});
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw_pair(registry, history));
}
BENCHMARK(BM_DrawPair)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
