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

// JSON encodings of the domain vocabulary. The same encodings are used for
// store payloads and export records, with fields in fixed order when the
// target is nlohmann::ordered_json.

#include <nlohmann/json.hpp>

#include "arena/domain.hpp"
#include "arena/util.hpp"

namespace arena {

template <typename Json>
void to_json(Json& j, const ProviderRoute& r) {
  j = Json::object();
  j["provider_id"] = r.provider_id;
  j["model_name"] = r.model_name;
}

template <typename Json>
void from_json(const Json& j, ProviderRoute& r) {
  r.provider_id = j.at("provider_id").template get<std::string>();
  r.model_name = j.at("model_name").template get<std::string>();
}

template <typename Json>
void to_json(Json& j, const ModelCard& m) {
  j = Json::object();
  j["model_id"] = m.model_id;
  j["display_name"] = m.display_name;
  j["organisation"] = m.organisation;
  j["license_kind"] = to_string(m.license_kind);
  j["training_allowed"] = m.training_allowed;
  j["active_param_count"] = m.active_param_count;
  j["total_param_count"] = m.total_param_count;
  j["params_estimated"] = m.params_estimated;
  j["provider_route"] = m.provider_route;
  j["enabled"] = m.enabled;
  j["metadata_text"] = m.metadata_text;
}

template <typename Json>
void from_json(const Json& j, ModelCard& m) {
  m.model_id = j.at("model_id").template get<std::string>();
  m.display_name = j.value("display_name", m.model_id);
  m.organisation = j.value("organisation", std::string{});
  m.license_kind = parse_license_kind(j.value("license_kind", std::string{"open_weight"}));
  m.training_allowed = j.value("training_allowed", m.license_kind != LicenseKind::proprietary);
  m.active_param_count = j.at("active_param_count").template get<double>();
  m.total_param_count = j.value("total_param_count", m.active_param_count);
  m.params_estimated = j.value("params_estimated", false);
  m.provider_route = j.at("provider_route").template get<ProviderRoute>();
  m.enabled = j.value("enabled", true);
  m.metadata_text = j.value("metadata_text", std::string{});
}

template <typename Json>
void to_json(Json& j, const AssistantMessage& m) {
  j = Json::object();
  j["text"] = m.text;
  j["output_tokens"] = m.output_tokens;
  j["tokens_estimated"] = m.tokens_estimated;
  j["generation_ms"] = m.generation_ms;
  j["finish_reason"] = to_string(m.finish_reason);
}

template <typename Json>
void from_json(const Json& j, AssistantMessage& m) {
  m.text = j.at("text").template get<std::string>();
  m.output_tokens = j.at("output_tokens").template get<std::int64_t>();
  m.tokens_estimated = j.at("tokens_estimated").template get<bool>();
  m.generation_ms = j.at("generation_ms").template get<std::int64_t>();
  m.finish_reason = parse_finish_reason(j.at("finish_reason").template get<std::string>());
}

template <typename Json>
void to_json(Json& j, const Turn& t) {
  j = Json::object();
  j["turn_index"] = t.turn_index;
  j["user_text"] = t.user_text;
  j["assistant_a"] = t.assistant_a ? Json(*t.assistant_a) : Json(nullptr);
  j["assistant_b"] = t.assistant_b ? Json(*t.assistant_b) : Json(nullptr);
}

template <typename Json>
void from_json(const Json& j, Turn& t) {
  t.turn_index = j.at("turn_index").template get<int>();
  t.user_text = j.at("user_text").template get<std::string>();
  for (Side side : {Side::a, Side::b}) {
    const auto key = side == Side::a ? "assistant_a" : "assistant_b";
    if (j.contains(key) && !j.at(key).is_null()) {
      t.assistant(side) = j.at(key).template get<AssistantMessage>();
    } else {
      t.assistant(side).reset();
    }
  }
}

template <typename Json>
void to_json(Json& j, const Session& s) {
  j = Json::object();
  j["session_id"] = s.session_id;
  j["consent"] = s.consent;
  j["created_at"] = format_timestamp(s.created_at);
}

template <typename Json>
void from_json(const Json& j, Session& s) {
  s.session_id = j.at("session_id").template get<std::string>();
  s.consent = j.at("consent").template get<bool>();
  s.created_at = parse_timestamp(j.at("created_at").template get<std::string>());
}

template <typename Json>
void to_json(Json& j, const Conversation& c) {
  j = Json::object();
  j["conversation_id"] = c.conversation_id;
  j["session_id"] = c.session_id;
  j["model_a"] = c.pairing.model_a;
  j["model_b"] = c.pairing.model_b;
  j["turns"] = c.turns;
  j["revealed"] = c.revealed;
  j["voted"] = c.voted;
  j["created_at"] = format_timestamp(c.created_at);
}

template <typename Json>
void from_json(const Json& j, Conversation& c) {
  c.conversation_id = j.at("conversation_id").template get<std::string>();
  c.session_id = j.value("session_id", std::string{});
  c.pairing.model_a = j.at("model_a").template get<std::string>();
  c.pairing.model_b = j.at("model_b").template get<std::string>();
  c.turns = j.at("turns").template get<std::vector<Turn>>();
  c.revealed = j.value("revealed", false);
  c.voted = j.value("voted", false);
  c.created_at = parse_timestamp(j.at("created_at").template get<std::string>());
}

template <typename Json>
void to_json(Json& j, const Vote& v) {
  j = Json::object();
  j["conversation_id"] = v.conversation_id;
  j["choice"] = to_string(v.choice);
  j["cast_at"] = format_timestamp(v.cast_at);
}

template <typename Json>
void from_json(const Json& j, Vote& v) {
  v.conversation_id = j.at("conversation_id").template get<std::string>();
  v.choice = parse_vote_choice(j.at("choice").template get<std::string>());
  v.cast_at = parse_timestamp(j.at("cast_at").template get<std::string>());
}

template <typename Json>
void to_json(Json& j, const Reaction& r) {
  j = Json::object();
  j["conversation_id"] = r.conversation_id;
  j["turn_index"] = r.turn_index;
  j["side"] = to_string(r.side);
  j["polarity"] = to_string(r.polarity);
  Json qualifiers = Json::array();
  for (auto q : r.qualifiers) qualifiers.push_back(to_string(q));
  j["qualifiers"] = std::move(qualifiers);
  j["cast_at"] = format_timestamp(r.cast_at);
}

template <typename Json>
void from_json(const Json& j, Reaction& r) {
  r.conversation_id = j.at("conversation_id").template get<std::string>();
  r.turn_index = j.at("turn_index").template get<int>();
  r.side = parse_side(j.at("side").template get<std::string>());
  r.polarity = parse_polarity(j.at("polarity").template get<std::string>());
  r.qualifiers.clear();
  if (j.contains("qualifiers")) {
    for (const auto& q : j.at("qualifiers")) r.qualifiers.insert(parse_qualifier(q.template get<std::string>()));
  }
  r.cast_at = parse_timestamp(j.at("cast_at").template get<std::string>());
}

}  // namespace arena
