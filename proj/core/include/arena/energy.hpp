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
#include <string>

#include "arena/domain.hpp"

namespace arena {

// kwh = output_tokens * (alpha * active_params_billions + beta)
struct EnergyCoefficients {
  double alpha = 0;  // kWh per token per billion active parameters
  double beta = 0;   // kWh per token
  std::string source_label;
};

struct EnergyEstimate {
  double kwh = 0;
  bool estimated = false;

  EnergyEstimate& operator+=(const EnergyEstimate& o) {
    kwh += o.kwh;
    estimated = estimated || o.estimated;
    return *this;
  }
  friend bool operator==(const EnergyEstimate&, const EnergyEstimate&) = default;
};

EnergyEstimate estimate(std::int64_t output_tokens, const ModelCard& model, const EnergyCoefficients& coeffs,
                        bool tokens_estimated = false);

EnergyEstimate estimate(const AssistantMessage& message, const ModelCard& model, const EnergyCoefficients& coeffs);

// Named coefficient sets with one selected source.
class EnergyTable {
 public:
  EnergyTable() = default;
  EnergyTable(std::map<std::string, EnergyCoefficients> sources, std::string selected);

  // The shipped default: a single "placeholder" source that operators are
  // expected to replace.
  static EnergyTable placeholder();

  // Throws Error(missing_coefficients) when the selected source is absent.
  const EnergyCoefficients& selected() const;
  const std::string& selected_name() const { return selected_; }

 private:
  std::map<std::string, EnergyCoefficients> sources_;
  std::string selected_;
};

}  // namespace arena
