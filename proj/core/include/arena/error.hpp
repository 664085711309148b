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

#include <stdexcept>
#include <string>
#include <string_view>

namespace arena {

// Stable machine-readable error codes. The string form (see to_string) is
// what appears in HTTP error bodies and CLI diagnostics.
enum class ErrorCode {
  invalid_argument,
  invalid_config,
  config_error,
  io_error,
  // gateway
  unknown_provider,
  timeout,
  upstream_error,
  // pairing
  insufficient_models,
  // store
  referential_violation,
  duplicate_vote,
  vote_after_reveal,
  duplicate_model,
  schema_too_new,
  storage_error,
  // ranking
  disconnected_graph,
  no_data,
  invalid_strengths,
  no_finite_mle,
  // energy
  missing_coefficients,
  // api
  consent_required,
  unknown_session,
  empty_prompt,
  prompt_too_long,
  not_found,
  conversation_closed,
  turn_in_progress,
  no_completed_turn,
  feedback_required,
  no_snapshot,
  rate_limited,
  unauthorized,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  explicit Error(ErrorCode code) : Error(code, std::string(to_string(code))) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arena
