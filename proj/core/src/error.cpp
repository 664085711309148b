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

#include "arena/error.hpp"

namespace arena {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::unknown_provider: return "unknown_provider";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::upstream_error: return "upstream_error";
    case ErrorCode::insufficient_models: return "insufficient_models";
    case ErrorCode::referential_violation: return "referential_violation";
    case ErrorCode::duplicate_vote: return "duplicate_vote";
    case ErrorCode::vote_after_reveal: return "vote_after_reveal";
    case ErrorCode::duplicate_model: return "duplicate_model";
    case ErrorCode::schema_too_new: return "schema_too_new";
    case ErrorCode::storage_error: return "storage_error";
    case ErrorCode::disconnected_graph: return "disconnected_graph";
    case ErrorCode::no_data: return "no_data";
    case ErrorCode::invalid_strengths: return "invalid_strengths";
    case ErrorCode::no_finite_mle: return "no_finite_mle";
    case ErrorCode::missing_coefficients: return "missing_coefficients";
    case ErrorCode::consent_required: return "consent_required";
    case ErrorCode::unknown_session: return "unknown_session";
    case ErrorCode::empty_prompt: return "empty_prompt";
    case ErrorCode::prompt_too_long: return "prompt_too_long";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conversation_closed: return "conversation_closed";
    case ErrorCode::turn_in_progress: return "turn_in_progress";
    case ErrorCode::no_completed_turn: return "no_completed_turn";
    case ErrorCode::feedback_required: return "feedback_required";
    case ErrorCode::no_snapshot: return "no_snapshot";
    case ErrorCode::rate_limited: return "rate_limited";
    case ErrorCode::unauthorized: return "unauthorized";
  }
  return "unknown";
}

}  // namespace arena
