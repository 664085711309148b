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

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "arena/domain.hpp"

namespace arena {

enum class PairingMode { uniform, coverage_balanced };

std::string_view to_string(PairingMode m);
PairingMode parse_pairing_mode(std::string_view s);

struct PairingPolicy {
  PairingMode mode = PairingMode::uniform;
  std::optional<std::uint64_t> rng_seed;
};

// Past comparison counts per unordered pair, keyed (min id, max id).
using PairCounts = std::map<std::pair<ModelId, ModelId>, std::int64_t>;

std::pair<ModelId, ModelId> unordered_key(const ModelId& x, const ModelId& y);

// Selection weights over unordered pairs of the enabled models, in the same
// (lexicographic, i < j) order draw_pair uses. Uniform mode gives 1 per
// pair; coverage_balanced gives 1 / (1 + past_count).
std::vector<std::pair<std::pair<ModelId, ModelId>, double>> pair_weights(std::span<const ModelCard> registry,
                                                                        const PairCounts& history,
                                                                        PairingMode mode);

// Draws pairings. Thread-safe; with a seed the sequence of draws is
// reproducible bit for bit (the generator and the mapping from raw bits to
// choices are both fixed, no std distributions involved).
class PairSampler {
 public:
  explicit PairSampler(PairingPolicy policy);

  // Throws Error(insufficient_models) with fewer than two enabled models.
  // history may be slightly stale under concurrency.
  Pairing draw_pair(std::span<const ModelCard> registry, const PairCounts& history);

  const PairingPolicy& policy() const { return policy_; }

 private:
  double next_unit();

  PairingPolicy policy_;
  std::mutex mu_;
  std::mt19937_64 gen_;
};

}  // namespace arena
