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

#include <string>
#include <vector>

#include "arena/domain.hpp"

namespace arena::testing {

// Identity strings whose presence in a pre-reveal byte stream would break
// blindness. Chosen so they cannot collide with hex ids or mock filler.
inline std::vector<ModelCard> blind_registry(int n) {
  static const char* names[] = {"Zephyrine", "Quokkanet", "Brontide", "Vellichor", "Oxbowyn", "Kestrilux"};
  std::vector<ModelCard> out;
  for (int i = 0; i < n; ++i) {
    ModelCard m;
    m.model_id = std::string("QZ-") + names[i % 6] + "-" + std::to_string(i);
    m.display_name = std::string(names[i % 6]) + " Large v" + std::to_string(i);
    m.organisation = std::string(names[(i + 3) % 6]) + " Labs";
    m.active_param_count = 1 + i;
    m.total_param_count = 1 + i;
    m.provider_route = {"mock", std::string("route-") + names[i % 6]};
    out.push_back(m);
  }
  return out;
}

inline std::vector<std::string> identity_needles(const std::vector<ModelCard>& cards) {
  std::vector<std::string> out;
  for (const auto& c : cards) {
    for (const auto* s : {&c.model_id, &c.display_name, &c.organisation}) {
      if (!s->empty()) out.push_back(*s);
    }
  }
  return out;
}

// Returns the first needle found in haystack, or an empty string.
inline std::string find_identity(const std::string& haystack, const std::vector<std::string>& needles) {
  for (const auto& n : needles)
    if (haystack.find(n) != std::string::npos) return n;
  return {};
}

}  // namespace arena::testing
