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

#include <cmath>

#include <gtest/gtest.h>

#include "arena/error.hpp"
#include "arena/pairing.hpp"
#include "fixtures.hpp"

namespace arena {
namespace {

std::vector<ModelCard> registry(int n) {
  std::vector<ModelCard> r;
  for (int i = 1; i <= n; ++i) r.push_back(testing::make_card("m" + std::to_string(i)));
  return r;
}

// Binomial 3-sigma check of observed pair frequencies against weights.
void expect_within_3_sigma(const std::map<std::pair<ModelId, ModelId>, int>& counts,
                           const std::vector<std::pair<std::pair<ModelId, ModelId>, double>>& weights, int draws) {
  double total = 0;
  for (const auto& [_, w] : weights) total += w;
  for (const auto& [pair, w] : weights) {
    const double p = w / total;
    const double mean = draws * p;
    const double sigma = std::sqrt(draws * p * (1 - p));
    const auto it = counts.find(pair);
    const int observed = it == counts.end() ? 0 : it->second;
    EXPECT_LE(std::abs(observed - mean), 3 * sigma) << pair.first << "," << pair.second;
  }
}

TEST(Pairing, TwoModelsAlwaysPairedWithBalancedSides) {
  auto reg = registry(2);
  PairSampler sampler({PairingMode::uniform, 3});
  int a_first = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto p = sampler.draw_pair(reg, {});
    EXPECT_EQ(unordered_key(p.model_a, p.model_b), (std::pair<ModelId, ModelId>{"m1", "m2"}));
    a_first += p.model_a == "m1";
  }
  EXPECT_LE(std::abs(a_first - n / 2.0), 3 * std::sqrt(n * 0.25));
}

TEST(Pairing, UniformDrawsWithinThreeSigma) {
  auto reg = registry(5);
  PairSampler sampler({PairingMode::uniform, 2024});
  std::map<std::pair<ModelId, ModelId>, int> counts;
  for (int i = 0; i < 10'000; ++i) {
    const auto p = sampler.draw_pair(reg, {});
    ++counts[unordered_key(p.model_a, p.model_b)];
  }
  EXPECT_EQ(counts.size(), 10u);
  expect_within_3_sigma(counts, pair_weights(reg, {}, PairingMode::uniform), 10'000);
}

TEST(Pairing, CoverageBalancedWeights) {
  auto reg = registry(5);
  PairCounts history{{{"m1", "m2"}, 99}};
  const auto weights = pair_weights(reg, history, PairingMode::coverage_balanced);
  ASSERT_EQ(weights.size(), 10u);
  double total = 0;
  for (const auto& [_, w] : weights) total += w;
  EXPECT_DOUBLE_EQ(weights[0].second / total, 0.01 / (0.01 + 9.0));

  PairSampler sampler({PairingMode::coverage_balanced, 77});
  std::map<std::pair<ModelId, ModelId>, int> counts;
  for (int i = 0; i < 10'000; ++i) {
    const auto p = sampler.draw_pair(reg, history);
    ++counts[unordered_key(p.model_a, p.model_b)];
  }
  expect_within_3_sigma(counts, weights, 10'000);
}

TEST(Pairing, InsufficientModels) {
  auto reg = registry(3);
  reg[1].enabled = false;
  reg[2].enabled = false;
  PairSampler sampler({});
  try {
    sampler.draw_pair(reg, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_models);
  }
}

TEST(PairingProperty, NeverDisabledNorIdentical) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto reg = registry(2 + static_cast<int>(rng() % 6));
    int enabled = 0;
    for (auto& m : reg) enabled += (m.enabled = rng() % 3 != 0);
    if (enabled < 2) continue;
    PairCounts history;
    for (std::size_t i = 0; i + 1 < reg.size(); ++i) history[unordered_key(reg[i].model_id, reg[i + 1].model_id)] = rng() % 20;
    PairSampler sampler({trial % 2 ? PairingMode::uniform : PairingMode::coverage_balanced, rng()});
    for (int d = 0; d < 50; ++d) {
      const auto p = sampler.draw_pair(reg, history);
      EXPECT_NE(p.model_a, p.model_b);
      for (const auto& m : reg) {
        if (m.model_id == p.model_a || m.model_id == p.model_b) EXPECT_TRUE(m.enabled);
      }
    }
  }
}

TEST(PairingProperty, SeededSequenceIsReproducible) {
  auto reg = registry(6);
  for (auto mode : {PairingMode::uniform, PairingMode::coverage_balanced}) {
    PairSampler s1({mode, 123});
    PairSampler s2({mode, 123});
    PairCounts history{{{"m1", "m3"}, 4}};
    for (int i = 0; i < 500; ++i) EXPECT_EQ(s1.draw_pair(reg, history), s2.draw_pair(reg, history));
  }
}

TEST(Pairing, ModeParsing) {
  EXPECT_EQ(parse_pairing_mode("coverage_balanced"), PairingMode::coverage_balanced);
  EXPECT_EQ(to_string(PairingMode::uniform), "uniform");
  EXPECT_THROW(parse_pairing_mode("elo"), Error);
}

}  // namespace
}  // namespace arena
