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

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using ModelId = std::string;
using ConversationId = std::string;
using SessionId = std::string;

enum class LicenseKind { open_source, open_weight, proprietary };
enum class Side { a, b };
enum class VoteChoice { a, b, tie, both_bad };
enum class Polarity { positive, negative };
enum class Qualifier {
  useful,
  complete,
  creative,
  clear_format,
  incorrect,
  superficial,
  instructions_ignored,
};
enum class FinishReason { stop, length, provider_error };

std::string_view to_string(LicenseKind v);
std::string_view to_string(Side v);
std::string_view to_string(VoteChoice v);
std::string_view to_string(Polarity v);
std::string_view to_string(Qualifier v);
std::string_view to_string(FinishReason v);

// Parsers throw Error(invalid_argument) on unknown spellings.
LicenseKind parse_license_kind(std::string_view s);
Side parse_side(std::string_view s);
VoteChoice parse_vote_choice(std::string_view s);
Polarity parse_polarity(std::string_view s);
Qualifier parse_qualifier(std::string_view s);
FinishReason parse_finish_reason(std::string_view s);

constexpr Side other(Side s) { return s == Side::a ? Side::b : Side::a; }

struct ProviderRoute {
  std::string provider_id;
  std::string model_name;

  friend bool operator==(const ProviderRoute&, const ProviderRoute&) = default;
};

struct ModelCard {
  ModelId model_id;
  std::string display_name;
  std::string organisation;
  LicenseKind license_kind = LicenseKind::open_weight;
  bool training_allowed = true;
  double active_param_count = 1.0;  // billions
  double total_param_count = 1.0;   // billions
  bool params_estimated = false;
  ProviderRoute provider_route;
  bool enabled = true;
  std::string metadata_text;

  friend bool operator==(const ModelCard&, const ModelCard&) = default;
};

struct Session {
  SessionId session_id;
  bool consent = false;
  Timestamp created_at{};

  friend bool operator==(const Session&, const Session&) = default;
};

struct AssistantMessage {
  std::string text;
  std::int64_t output_tokens = 0;
  bool tokens_estimated = false;
  std::int64_t generation_ms = 0;
  FinishReason finish_reason = FinishReason::stop;

  friend bool operator==(const AssistantMessage&, const AssistantMessage&) = default;
};

struct Turn {
  int turn_index = 0;
  std::string user_text;
  std::optional<AssistantMessage> assistant_a;
  std::optional<AssistantMessage> assistant_b;

  const std::optional<AssistantMessage>& assistant(Side s) const {
    return s == Side::a ? assistant_a : assistant_b;
  }
  std::optional<AssistantMessage>& assistant(Side s) {
    return s == Side::a ? assistant_a : assistant_b;
  }
  // Both sides have produced a terminal message (success or failure).
  bool complete() const { return assistant_a.has_value() && assistant_b.has_value(); }

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct Pairing {
  ModelId model_a;
  ModelId model_b;

  const ModelId& model(Side s) const { return s == Side::a ? model_a : model_b; }

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

struct Conversation {
  ConversationId conversation_id;
  SessionId session_id;
  Pairing pairing;
  std::vector<Turn> turns;
  bool revealed = false;
  bool voted = false;
  Timestamp created_at{};

  friend bool operator==(const Conversation&, const Conversation&) = default;
};

struct Vote {
  ConversationId conversation_id;
  VoteChoice choice = VoteChoice::tie;
  Timestamp cast_at{};

  friend bool operator==(const Vote&, const Vote&) = default;
};

struct Reaction {
  ConversationId conversation_id;
  int turn_index = 0;
  Side side = Side::a;
  Polarity polarity = Polarity::positive;
  std::set<Qualifier> qualifiers;
  Timestamp cast_at{};

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

// Returns human-readable descriptions of every violated Conversation/Turn
// invariant; empty when the value is well formed.
std::vector<std::string> validate_conversation(const Conversation& c);

std::vector<std::string> validate_model_card(const ModelCard& m);

// Fallback token count when a provider reports no usage:
// ceil(code_points / 4).
std::int64_t estimate_tokens(std::string_view text);

}  // namespace arena
