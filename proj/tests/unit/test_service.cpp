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
#include <thread>

#include <gtest/gtest.h>

#include "arena/error.hpp"
#include "arena/http_api.hpp"
#include "arena/service.hpp"
#include "blindness.hpp"
#include "fixtures.hpp"

namespace arena {
namespace {

using testing::MockArena;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::invalid_argument;
}

std::string drain_bytes(TurnStream& s) {
  std::string bytes;
  for (const auto& ev : s.drain()) bytes += sse_frame(ev);
  return bytes;
}

TEST(Service, SessionsRequireConsent) {
  auto arena = MockArena::with_models(2);
  EXPECT_FALSE(arena.service->create_session(true).empty());
  EXPECT_EQ(code_of([&] { arena.service->create_session(false); }), ErrorCode::consent_required);
  EXPECT_EQ(code_of([&] { arena.service->create_session(std::nullopt); }), ErrorCode::consent_required);
}

TEST(Service, HappyPathPersistsBothSides) {
  auto arena = MockArena::with_models(3);
  const auto session = arena.service->create_session(true);
  auto stream = arena.service->start_conversation(session, "Explique la gravité.");
  const auto events = stream->drain();
  int terminals = 0;
  for (const auto& e : events) terminals += e.event.terminal();
  EXPECT_EQ(terminals, 2);
  const auto c = arena.store->get_conversation(stream->conversation_id());
  ASSERT_TRUE(c);
  ASSERT_EQ(c->turns.size(), 1u);
  EXPECT_TRUE(c->turns[0].complete());
  EXPECT_NE(c->pairing.model_a, c->pairing.model_b);
  EXPECT_TRUE(validate_conversation(*c).empty());
  EXPECT_EQ(c->session_id, session);
}

TEST(Service, StreamMatchesPersistedText) {
  auto arena = MockArena::with_models(2);
  auto stream = arena.service->start_conversation(arena.service->create_session(true), "hello");
  std::map<Side, std::string> text;
  for (const auto& e : stream->drain()) {
    if (e.event.kind == StreamEvent::Kind::delta) text[e.side] += e.event.text_delta;
  }
  const auto c = arena.store->get_conversation(stream->conversation_id());
  EXPECT_EQ(c->turns[0].assistant_a->text, text[Side::a]);
  EXPECT_EQ(c->turns[0].assistant_b->text, text[Side::b]);
}

TEST(Service, PromptValidation) {
  ServiceOptions opts;
  opts.max_prompt_chars = 10;
  MockArena arena(testing::blind_registry(2), opts);
  const auto session = arena.service->create_session(true);
  EXPECT_EQ(code_of([&] { arena.service->start_conversation(session, ""); }), ErrorCode::empty_prompt);
  EXPECT_EQ(code_of([&] { arena.service->start_conversation(session, "  \n\t"); }), ErrorCode::empty_prompt);
  EXPECT_EQ(code_of([&] { arena.service->start_conversation(session, "01234567890"); }), ErrorCode::prompt_too_long);
  EXPECT_NO_THROW(arena.service->start_conversation(session, "éééééééééé")->drain());
  EXPECT_EQ(code_of([&] { arena.service->start_conversation("nope", "hi"); }), ErrorCode::unknown_session);
}

TEST(Service, SessionsExpire) {
  testing::StepClock clock;
  ServiceOptions opts;
  opts.session_ttl = std::chrono::minutes(5);
  MockArena arena(testing::blind_registry(2), opts, {{}, 1}, clock.clock());
  const auto session = arena.service->create_session(true);
  clock.advance(std::chrono::minutes(6));
  EXPECT_EQ(code_of([&] { arena.service->start_conversation(session, "hi"); }), ErrorCode::unknown_session);
}

TEST(Service, InsufficientModels) {
  auto cards = testing::blind_registry(3);
  cards[1].enabled = false;
  cards[2].provider_route.provider_id = "not-configured";
  MockArena arena(cards);
  EXPECT_EQ(code_of([&] { arena.service->start_conversation(arena.service->create_session(true), "hi"); }),
            ErrorCode::insufficient_models);
}

TEST(Service, SecondTurnAppendsAndCarriesSideHistory) {
  auto arena = MockArena::with_models(2);
  auto first = arena.service->start_conversation(arena.service->create_session(true), "echo:one");
  first->drain();
  const auto id = first->conversation_id();
  auto second = arena.service->continue_conversation(id, "echo:two");
  EXPECT_EQ(second->turn_index(), 1);
  second->drain();
  const auto c = arena.store->get_conversation(id);
  ASSERT_EQ(c->turns.size(), 2u);
  EXPECT_EQ(c->turns[1].assistant_a->text, "two");
  // Each side only sees its own previous answer.
  for (const auto& call : arena.mock->calls()) {
    if (call.messages.size() < 4) continue;
    EXPECT_EQ(call.messages[1].content, "echo:one");
    EXPECT_EQ(call.messages[2].content, "one");
    EXPECT_EQ(call.messages[3].content, "echo:two");
  }
}

TEST(Service, OneSideFailureKeepsTheOther) {
  auto cards = testing::blind_registry(2);
  MockArena arena(cards);
  arena.mock->set_script(cards[0].provider_route.model_name, {{"partial"}, true, true});
  auto stream = arena.service->start_conversation(arena.service->create_session(true), "echo:fine");
  int errors = 0, dones = 0;
  for (const auto& e : stream->drain()) {
    errors += e.event.kind == StreamEvent::Kind::error;
    dones += e.event.kind == StreamEvent::Kind::done;
  }
  EXPECT_EQ(errors, 1);
  EXPECT_EQ(dones, 1);
  const auto c = arena.store->get_conversation(stream->conversation_id());
  const auto& t = c->turns[0];
  const auto& failed = c->pairing.model_a == cards[0].model_id ? t.assistant_a : t.assistant_b;
  EXPECT_EQ(failed->finish_reason, FinishReason::provider_error);
  // A failed side still allows voting on the turn.
  EXPECT_NO_THROW(arena.service->vote(c->conversation_id, VoteChoice::b));
}

TEST(Service, MissingUsageFallsBackToEstimate) {
  auto arena = MockArena::with_models(2);
  arena.mock->set_report_usage(false);
  auto stream = arena.service->start_conversation(arena.service->create_session(true), "echo:abcdefgh");
  for (const auto& e : stream->drain()) {
    if (e.event.terminal()) {
      EXPECT_TRUE(e.tokens_estimated);
      EXPECT_EQ(e.output_tokens, 2);
    }
  }
  const auto c = arena.store->get_conversation(stream->conversation_id());
  EXPECT_TRUE(c->turns[0].assistant_a->tokens_estimated);
  EXPECT_EQ(c->turns[0].assistant_a->output_tokens, 2);
}

TEST(Service, VoteRevealStateMachine) {
  auto arena = MockArena::with_models(2);
  auto stream = arena.service->start_conversation(arena.service->create_session(true), "hello");
  stream->drain();
  const auto id = stream->conversation_id();
  EXPECT_EQ(code_of([&] { arena.service->reveal(id, false); }), ErrorCode::feedback_required);
  arena.service->react({id, 0, Side::a, Polarity::positive, {Qualifier::useful}});
  EXPECT_EQ(arena.store->reactions_for(id).size(), 1u);
  EXPECT_EQ(code_of([&] { arena.service->react({id, 3, Side::a, Polarity::positive, {}}); }), ErrorCode::not_found);
  arena.service->vote(id, VoteChoice::a);
  EXPECT_EQ(code_of([&] { arena.service->vote(id, VoteChoice::b); }), ErrorCode::duplicate_vote);
  const auto payload = arena.service->reveal(id, false);
  EXPECT_EQ(payload.vote, VoteChoice::a);
  EXPECT_FALSE(payload.give_up);
  EXPECT_FALSE(payload.a.model.model_id.empty());
  EXPECT_NE(payload.a.model.model_id, payload.b.model.model_id);
  EXPECT_GT(payload.a.energy.kwh, 0.0);
  EXPECT_EQ(code_of([&] { arena.service->vote(id, VoteChoice::b); }), ErrorCode::vote_after_reveal);
  EXPECT_EQ(code_of([&] { arena.service->react({id, 0, Side::b, Polarity::negative, {}}); }),
            ErrorCode::conversation_closed);
  EXPECT_EQ(code_of([&] { arena.service->continue_conversation(id, "more"); }), ErrorCode::conversation_closed);
  EXPECT_EQ(code_of([&] { arena.service->reveal(id, true); }), ErrorCode::conversation_closed);
  EXPECT_EQ(code_of([&] { arena.service->vote("ghost", VoteChoice::b); }), ErrorCode::not_found);
}

TEST(Service, GiveUpReveal) {
  auto arena = MockArena::with_models(2);
  auto stream = arena.service->start_conversation(arena.service->create_session(true), "hello");
  stream->drain();
  const auto payload = arena.service->reveal(stream->conversation_id(), true);
  EXPECT_TRUE(payload.give_up);
  EXPECT_FALSE(payload.vote.has_value());
  EXPECT_TRUE(arena.store->reveal_state(stream->conversation_id()).give_up);
}

TEST(Service, RevealWaitsForStreaming) {
  auto arena = MockArena::with_models(2);
  arena.mock->set_delta_delay(std::chrono::milliseconds(30));
  auto first = arena.service->start_conversation(arena.service->create_session(true), "echo:ab");
  first->drain();
  const auto id = first->conversation_id();
  auto second = arena.service->continue_conversation(id, "echo:abcdef");
  EXPECT_EQ(code_of([&] { arena.service->reveal(id, true); }), ErrorCode::turn_in_progress);
  EXPECT_EQ(code_of([&] { arena.service->continue_conversation(id, "again"); }), ErrorCode::turn_in_progress);
  second->drain();
  EXPECT_NO_THROW(arena.service->reveal(id, true));
}

TEST(Service, NoCompletedTurnBlocksVote) {
  auto arena = MockArena::with_models(2);
  arena.mock->set_delta_delay(std::chrono::milliseconds(50));
  auto stream = arena.service->start_conversation(arena.service->create_session(true), "echo:abcd");
  EXPECT_EQ(code_of([&] { arena.service->vote(stream->conversation_id(), VoteChoice::a); }),
            ErrorCode::no_completed_turn);
  stream->drain();
}

TEST(Service, ConcurrentVoteStorm) {
  auto arena = MockArena::with_models(2);
  auto stream = arena.service->start_conversation(arena.service->create_session(true), "hello");
  stream->drain();
  const auto id = stream->conversation_id();
  std::atomic<int> ok{0}, rejected{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 100; ++t) {
    threads.emplace_back([&, t] {
      try {
        arena.service->vote(id, static_cast<VoteChoice>(t % 4));
        ++ok;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::duplicate_vote) ++rejected;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(rejected.load(), 99);
}

TEST(Service, StreamIsBlind) {
  auto cards = testing::blind_registry(4);
  MockArena arena(cards);
  const auto needles = testing::identity_needles(cards);
  for (int i = 0; i < 20; ++i) {
    auto stream = arena.service->start_conversation(arena.service->create_session(true), "Parle-moi de la mer.");
    const auto bytes = drain_bytes(*stream);
    EXPECT_EQ(testing::find_identity(bytes, needles), "");
    const auto after = arena.service->reveal(stream->conversation_id(), true);
    EXPECT_NE(testing::find_identity(to_json(after).dump(), needles), "");
  }
}

TEST(Service, LeaderboardLifecycle) {
  auto arena = MockArena::with_models(3);
  EXPECT_EQ(code_of([&] { arena.service->get_leaderboard(); }), ErrorCode::no_snapshot);
  for (int i = 0; i < 12; ++i) {
    auto s = arena.service->start_conversation(arena.service->create_session(true), "q" + std::to_string(i));
    s->drain();
    arena.service->vote(s->conversation_id(), i % 3 == 0 ? VoteChoice::b : VoteChoice::a);
  }
  const auto snap = arena.service->refresh_leaderboard();
  EXPECT_EQ(arena.service->get_leaderboard()->as_of, snap->as_of);
  EXPECT_EQ(snap->vote_count, 12);
  EXPECT_TRUE(arena.store->latest_snapshot().has_value());
}

TEST(Service, PublicModelsHideRouting) {
  auto arena = MockArena::with_models(2);
  const auto models = arena.service->public_models();
  ASSERT_EQ(models.size(), 2u);
  EXPECT_EQ(to_json(models[0]).dump().find("route"), std::string::npos);
}

TEST(RateLimiter, WindowedCounts) {
  RateLimiter limiter(2, std::chrono::seconds(1));
  const auto t0 = testing::at_ms(0);
  EXPECT_TRUE(limiter.allow("k", t0));
  EXPECT_TRUE(limiter.allow("k", t0));
  EXPECT_FALSE(limiter.allow("k", t0));
  EXPECT_TRUE(limiter.allow("other", t0));
  EXPECT_TRUE(limiter.allow("k", t0 + std::chrono::seconds(2)));
}

}  // namespace
}  // namespace arena
