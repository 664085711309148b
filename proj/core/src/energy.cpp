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

#include "arena/energy.hpp"

#include <cmath>

#include "arena/error.hpp"

namespace arena {

EnergyEstimate estimate(std::int64_t output_tokens, const ModelCard& model, const EnergyCoefficients& coeffs,
                        bool tokens_estimated) {
  if (output_tokens < 0) throw Error(ErrorCode::invalid_argument, "output_tokens must be nonnegative");
  if (!(coeffs.alpha >= 0) || !(coeffs.beta >= 0)) {
    throw Error(ErrorCode::invalid_config, "energy coefficients must be nonnegative");
  }
  const double per_token = coeffs.alpha * model.active_param_count + coeffs.beta;
  return {static_cast<double>(output_tokens) * per_token, model.params_estimated || tokens_estimated};
}

EnergyEstimate estimate(const AssistantMessage& message, const ModelCard& model, const EnergyCoefficients& coeffs) {
  return estimate(message.output_tokens, model, coeffs, message.tokens_estimated);
}

EnergyTable::EnergyTable(std::map<std::string, EnergyCoefficients> sources, std::string selected)
    : sources_(std::move(sources)), selected_(std::move(selected)) {
  for (const auto& [name, c] : sources_) {
    if (!(c.alpha >= 0) || !(c.beta >= 0)) {
      throw Error(ErrorCode::invalid_config, "energy source '" + name + "' has negative coefficients");
    }
  }
}

EnergyTable EnergyTable::placeholder() {
  // Order-of-magnitude stand-ins only; not measured values.
  return EnergyTable({{"placeholder", {2.0e-7, 1.0e-6, "placeholder"}}}, "placeholder");
}

const EnergyCoefficients& EnergyTable::selected() const {
  auto it = sources_.find(selected_);
  if (it == sources_.end()) {
    throw Error(ErrorCode::missing_coefficients, "no energy coefficients for source '" + selected_ + "'");
  }
  return it->second;
}

}  // namespace arena
