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

#include "arena/domain.hpp"

#include <array>
#include <utility>

#include "arena/error.hpp"
#include "arena/util.hpp"

namespace arena {

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<LicenseKind, 3> kLicenseNames{{
    {LicenseKind::open_source, "open_source"},
    {LicenseKind::open_weight, "open_weight"},
    {LicenseKind::proprietary, "proprietary"},
}};
constexpr NameTable<Side, 2> kSideNames{{{Side::a, "a"}, {Side::b, "b"}}};
constexpr NameTable<VoteChoice, 4> kVoteNames{{
    {VoteChoice::a, "a"},
    {VoteChoice::b, "b"},
    {VoteChoice::tie, "tie"},
    {VoteChoice::both_bad, "both_bad"},
}};
constexpr NameTable<Polarity, 2> kPolarityNames{{
    {Polarity::positive, "positive"},
    {Polarity::negative, "negative"},
}};
constexpr NameTable<Qualifier, 7> kQualifierNames{{
    {Qualifier::useful, "useful"},
    {Qualifier::complete, "complete"},
    {Qualifier::creative, "creative"},
    {Qualifier::clear_format, "clear_format"},
    {Qualifier::incorrect, "incorrect"},
    {Qualifier::superficial, "superficial"},
    {Qualifier::instructions_ignored, "instructions_ignored"},
}};
constexpr NameTable<FinishReason, 3> kFinishNames{{
    {FinishReason::stop, "stop"},
    {FinishReason::length, "length"},
    {FinishReason::provider_error, "provider_error"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const NameTable<Enum, N>& table, Enum v) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "?";
}

template <typename Enum, std::size_t N>
Enum parse_in(const NameTable<Enum, N>& table, std::string_view s, std::string_view what) {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(LicenseKind v) { return name_of(kLicenseNames, v); }
std::string_view to_string(Side v) { return name_of(kSideNames, v); }
std::string_view to_string(VoteChoice v) { return name_of(kVoteNames, v); }
std::string_view to_string(Polarity v) { return name_of(kPolarityNames, v); }
std::string_view to_string(Qualifier v) { return name_of(kQualifierNames, v); }
std::string_view to_string(FinishReason v) { return name_of(kFinishNames, v); }

LicenseKind parse_license_kind(std::string_view s) { return parse_in(kLicenseNames, s, "license kind"); }
Side parse_side(std::string_view s) { return parse_in(kSideNames, s, "side"); }
VoteChoice parse_vote_choice(std::string_view s) { return parse_in(kVoteNames, s, "vote choice"); }
Polarity parse_polarity(std::string_view s) { return parse_in(kPolarityNames, s, "polarity"); }
Qualifier parse_qualifier(std::string_view s) { return parse_in(kQualifierNames, s, "qualifier"); }
FinishReason parse_finish_reason(std::string_view s) { return parse_in(kFinishNames, s, "finish reason"); }

std::vector<std::string> validate_conversation(const Conversation& c) {
  std::vector<std::string> violations;
  if (c.pairing.model_a == c.pairing.model_b) {
    violations.emplace_back("pairing sides identical");
  }
  for (std::size_t i = 0; i < c.turns.size(); ++i) {
    if (c.turns[i].turn_index != static_cast<int>(i)) {
      violations.emplace_back("turn indices not contiguous");
      break;
    }
  }
  for (const auto& turn : c.turns) {
    for (Side side : {Side::a, Side::b}) {
      const auto& msg = turn.assistant(side);
      if (!msg) continue;
      if (msg->output_tokens < 0 || msg->generation_ms < 0) {
        violations.emplace_back("negative message counters");
      }
      if (msg->finish_reason != FinishReason::provider_error && !msg->text.empty() &&
          msg->output_tokens <= 0) {
        violations.emplace_back("nonempty message without output tokens");
      }
    }
  }
  return violations;
}

std::vector<std::string> validate_model_card(const ModelCard& m) {
  std::vector<std::string> violations;
  if (m.model_id.empty()) violations.emplace_back("empty model_id");
  if (!(m.active_param_count > 0) || !(m.total_param_count > 0)) {
    violations.emplace_back("parameter counts must be positive");
  }
  if (m.active_param_count > m.total_param_count) {
    violations.emplace_back("active_param_count exceeds total_param_count");
  }
  if (m.license_kind == LicenseKind::proprietary && m.training_allowed) {
    violations.emplace_back("proprietary model cannot allow training");
  }
  return violations;
}

std::int64_t estimate_tokens(std::string_view text) {
  const auto chars = static_cast<std::int64_t>(utf8_length(text));
  return (chars + 3) / 4;
}

}  // namespace arena
