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

#include <random>

#include <gtest/gtest.h>

#include "arena/domain.hpp"
#include "arena/error.hpp"
#include "arena/serialization.hpp"
#include "arena/util.hpp"
#include "fixtures.hpp"

namespace arena {
namespace {

using testing::at_ms;

Conversation two_turn_conversation() {
  Conversation c;
  c.conversation_id = "c1";
  c.session_id = "s1";
  c.pairing = {"m1", "m2"};
  c.created_at = at_ms(0);
  for (int t = 0; t < 2; ++t) {
    Turn turn;
    turn.turn_index = t;
    turn.user_text = "question " + std::to_string(t);
    turn.assistant_a = AssistantMessage{"answer a", 2, false, 10, FinishReason::stop};
    turn.assistant_b = AssistantMessage{"answer b", 2, true, 12, FinishReason::length};
    c.turns.push_back(turn);
  }
  return c;
}

TEST(Domain, IdenticalPairingIsReported) {
  Conversation c;
  c.pairing = {"m1", "m1"};
  EXPECT_EQ(validate_conversation(c), std::vector<std::string>{"pairing sides identical"});
}

TEST(Domain, EmptyConversationIsValid) {
  Conversation c;
  c.pairing = {"m1", "m2"};
  EXPECT_TRUE(validate_conversation(c).empty());
}

TEST(Domain, NonContiguousTurnsAreReported) {
  Conversation c = two_turn_conversation();
  c.turns[1].turn_index = 2;
  EXPECT_EQ(validate_conversation(c), std::vector<std::string>{"turn indices not contiguous"});
}

TEST(Domain, MessageCountersMustBeConsistent) {
  Conversation c = two_turn_conversation();
  c.turns[0].assistant_a->output_tokens = 0;
  EXPECT_EQ(validate_conversation(c), std::vector<std::string>{"nonempty message without output tokens"});
  c = two_turn_conversation();
  c.turns[0].assistant_b->generation_ms = -1;
  EXPECT_EQ(validate_conversation(c), std::vector<std::string>{"negative message counters"});
}

TEST(Domain, ModelCardRules) {
  ModelCard m = testing::make_card("m1");
  EXPECT_TRUE(validate_model_card(m).empty());
  m.active_param_count = 8;
  EXPECT_FALSE(validate_model_card(m).empty());
  m = testing::make_card("m1");
  m.license_kind = LicenseKind::proprietary;
  m.training_allowed = true;
  EXPECT_FALSE(validate_model_card(m).empty());
  m.training_allowed = false;
  EXPECT_TRUE(validate_model_card(m).empty());
}

TEST(Domain, EnumSpellingsRoundTrip) {
  for (auto v : {VoteChoice::a, VoteChoice::b, VoteChoice::tie, VoteChoice::both_bad}) {
    EXPECT_EQ(parse_vote_choice(to_string(v)), v);
  }
  for (auto q : {Qualifier::useful, Qualifier::complete, Qualifier::creative, Qualifier::clear_format,
                 Qualifier::incorrect, Qualifier::superficial, Qualifier::instructions_ignored}) {
    EXPECT_EQ(parse_qualifier(to_string(q)), q);
  }
  for (auto l : {LicenseKind::open_source, LicenseKind::open_weight, LicenseKind::proprietary}) {
    EXPECT_EQ(parse_license_kind(to_string(l)), l);
  }
  EXPECT_THROW(parse_vote_choice("draw"), Error);
}

TEST(Domain, TokenEstimateCountsCodePoints) {
  EXPECT_EQ(estimate_tokens(""), 0);
  EXPECT_EQ(estimate_tokens("abcd"), 1);
  EXPECT_EQ(estimate_tokens("abcde"), 2);
  EXPECT_EQ(estimate_tokens("éééé"), 1);  // 8 bytes, 4 code points
}

TEST(Domain, TimestampFormatRoundTrips) {
  const Timestamp t = at_ms(123);
  EXPECT_EQ(parse_timestamp(format_timestamp(t)), t);
  EXPECT_EQ(format_timestamp(from_millis(0)), "1970-01-01T00:00:00.000Z");
  EXPECT_THROW(parse_timestamp("yesterday"), Error);
}

// Property: randomly generated domain values survive encode/decode.
std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"a", "é", "\n", "\"", "日本", " ", "{}", "\\", "z9"};
  std::uniform_int_distribution<std::size_t> len(0, 12), pick(0, pieces.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += pieces[pick(rng)];
  return s;
}

TEST(DomainProperty, SerializationRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    Conversation c;
    c.conversation_id = random_id();
    c.session_id = random_id();
    c.pairing = {"m" + std::to_string(small(rng)), "n" + std::to_string(small(rng))};
    c.revealed = small(rng) == 0;
    c.voted = small(rng) == 0;
    c.created_at = at_ms(static_cast<std::int64_t>(rng() % 1'000'000));
    for (int t = 0, turns = small(rng); t < turns; ++t) {
      Turn turn;
      turn.turn_index = t;
      turn.user_text = random_text(rng);
      if (small(rng) > 0) turn.assistant_a = AssistantMessage{random_text(rng), small(rng) + 1, small(rng) == 0, small(rng),
                                                              static_cast<FinishReason>(small(rng) % 3)};
      if (small(rng) > 0) turn.assistant_b = AssistantMessage{random_text(rng), small(rng) + 1, small(rng) == 0, small(rng),
                                                              static_cast<FinishReason>(small(rng) % 3)};
      c.turns.push_back(turn);
    }
    const auto decoded = nlohmann::json::parse(nlohmann::json(c).dump()).get<Conversation>();
    EXPECT_EQ(decoded, c);

    Vote v{c.conversation_id, static_cast<VoteChoice>(small(rng)), at_ms(small(rng))};
    EXPECT_EQ(nlohmann::json(v).get<Vote>(), v);

    Reaction r{c.conversation_id, small(rng), small(rng) % 2 ? Side::a : Side::b,
               small(rng) % 2 ? Polarity::positive : Polarity::negative, {}, at_ms(small(rng))};
    if (small(rng) == 0) r.qualifiers = {Qualifier::useful, Qualifier::creative};
    EXPECT_EQ(nlohmann::json(r).get<Reaction>(), r);

    ModelCard m = testing::make_card("model-" + std::to_string(trial));
    m.metadata_text = random_text(rng);
    m.enabled = small(rng) != 0;
    EXPECT_EQ(nlohmann::ordered_json(m).get<ModelCard>(), m);
  }
}

}  // namespace
}  // namespace arena
