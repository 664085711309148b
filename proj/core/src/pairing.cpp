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

#include "arena/pairing.hpp"

#include <algorithm>

#include "arena/error.hpp"

namespace arena {

std::string_view to_string(PairingMode m) {
  return m == PairingMode::uniform ? "uniform" : "coverage_balanced";
}

PairingMode parse_pairing_mode(std::string_view s) {
  if (s == "uniform") return PairingMode::uniform;
  if (s == "coverage_balanced") return PairingMode::coverage_balanced;
  throw Error(ErrorCode::invalid_config, "unknown pairing mode '" + std::string(s) + "'");
}

std::pair<ModelId, ModelId> unordered_key(const ModelId& x, const ModelId& y) {
  return x < y ? std::pair{x, y} : std::pair{y, x};
}

std::vector<std::pair<std::pair<ModelId, ModelId>, double>> pair_weights(std::span<const ModelCard> registry,
                                                                        const PairCounts& history,
                                                                        PairingMode mode) {
  std::vector<ModelId> ids;
  for (const auto& card : registry) {
    if (card.enabled) ids.push_back(card.model_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<std::pair<std::pair<ModelId, ModelId>, double>> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      double w = 1.0;
      if (mode == PairingMode::coverage_balanced) {
        auto it = history.find({ids[i], ids[j]});
        const auto past = it == history.end() ? 0 : std::max<std::int64_t>(it->second, 0);
        w = 1.0 / (1.0 + static_cast<double>(past));
      }
      out.push_back({{ids[i], ids[j]}, w});
    }
  }
  return out;
}

namespace {
std::mt19937_64 make_generator(const PairingPolicy& policy) {
  if (policy.rng_seed) return std::mt19937_64{*policy.rng_seed};
  std::random_device rd;
  std::seed_seq seq{rd(), rd(), rd(), rd()};
  return std::mt19937_64{seq};
}
}  // namespace

PairSampler::PairSampler(PairingPolicy policy) : policy_(policy), gen_(make_generator(policy)) {}

double PairSampler::next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

Pairing PairSampler::draw_pair(std::span<const ModelCard> registry, const PairCounts& history) {
  const auto weights = pair_weights(registry, history, policy_.mode);
  if (weights.empty()) {
    throw Error(ErrorCode::insufficient_models, "at least two enabled models are required");
  }
  double total = 0;
  for (const auto& [_, w] : weights) total += w;

  std::lock_guard lock(mu_);
  const double target = next_unit() * total;
  std::size_t chosen = weights.size() - 1;
  double acc = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k].second;
    if (target < acc) {
      chosen = k;
      break;
    }
  }
  const auto& [lo, hi] = weights[chosen].first;
  const bool swap_sides = (gen_() >> 63) != 0;
  return swap_sides ? Pairing{hi, lo} : Pairing{lo, hi};
}

}  // namespace arena
