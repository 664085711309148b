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

#include <sys/wait.h>
#include <unistd.h>

#include <sqlite3.h>

#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "arena/error.hpp"
#include "arena/store.hpp"
#include "fixtures.hpp"

namespace arena {
namespace {

using testing::at_ms;
using testing::make_card;
using testing::TempDir;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::invalid_argument;
}

Conversation answered(const std::string& id, const std::string& session, Timestamp created) {
  Conversation c;
  c.conversation_id = id;
  c.session_id = session;
  c.pairing = {"m1", "m2"};
  c.created_at = created;
  Turn t;
  t.user_text = "hello";
  t.assistant_a = AssistantMessage{"a", 1, false, 1, FinishReason::stop};
  t.assistant_b = AssistantMessage{"b", 1, false, 1, FinishReason::stop};
  c.turns.push_back(t);
  return c;
}

struct StoreTest : ::testing::Test {
  TempDir dir;
  std::unique_ptr<Store> store = open_sqlite_store(dir / "s.db");

  void SetUp() override {
    store->upsert_model(make_card("m1"));
    store->upsert_model(make_card("m2"));
    store->put_session({"s1", true, at_ms(0)});
  }
};

TEST_F(StoreTest, SingleVoteThenDuplicate) {
  store->put_conversation(answered("c1", "s1", at_ms(1)));
  store->put_vote({"c1", VoteChoice::a, at_ms(2)});
  EXPECT_EQ(code_of([&] { store->put_vote({"c1", VoteChoice::b, at_ms(3)}); }), ErrorCode::duplicate_vote);
  EXPECT_EQ(store->get_vote("c1")->choice, VoteChoice::a);
  EXPECT_TRUE(store->get_conversation("c1")->voted);
}

TEST_F(StoreTest, VoteAfterRevealRejected) {
  store->put_conversation(answered("c1", "s1", at_ms(1)));
  EXPECT_TRUE(store->mark_revealed("c1", at_ms(2), true));
  EXPECT_EQ(code_of([&] { store->put_vote({"c1", VoteChoice::a, at_ms(3)}); }), ErrorCode::vote_after_reveal);
  EXPECT_EQ(code_of([&] { store->put_reaction({"c1", 0, Side::a, Polarity::positive, {}, at_ms(3)}); }),
            ErrorCode::conversation_closed);
}

TEST_F(StoreTest, RevealIsOneWay) {
  store->put_conversation(answered("c1", "s1", at_ms(1)));
  EXPECT_FALSE(store->reveal_state("c1").revealed);
  EXPECT_TRUE(store->mark_revealed("c1", at_ms(5), false));
  EXPECT_FALSE(store->mark_revealed("c1", at_ms(6), true));
  const auto st = store->reveal_state("c1");
  EXPECT_TRUE(st.revealed);
  EXPECT_FALSE(st.give_up);
  EXPECT_EQ(st.revealed_at, at_ms(5));
}

TEST_F(StoreTest, RevealTimeFollowsVote) {
  store->put_conversation(answered("c1", "s1", at_ms(1)));
  store->put_vote({"c1", VoteChoice::tie, at_ms(100)});
  store->mark_revealed("c1", at_ms(50), false);
  EXPECT_GT(*store->reveal_state("c1").revealed_at, at_ms(100));
}

TEST_F(StoreTest, ReferentialChecks) {
  EXPECT_EQ(code_of([&] { store->put_vote({"ghost", VoteChoice::a, at_ms(1)}); }), ErrorCode::referential_violation);
  auto c = answered("c1", "ghost-session", at_ms(1));
  EXPECT_THROW(store->put_conversation(c), Error);
  c = answered("c1", "s1", at_ms(1));
  c.pairing.model_b = "unknown";
  EXPECT_THROW(store->put_conversation(c), Error);
  EXPECT_EQ(code_of([&] { store->put_session({"s2", false, at_ms(0)}); }), ErrorCode::consent_required);
  EXPECT_EQ(code_of([&] { store->add_model(make_card("m1")); }), ErrorCode::duplicate_model);
}

TEST_F(StoreTest, ReactionNeedsExistingMessageAndUpserts) {
  auto c = answered("c1", "s1", at_ms(1));
  c.turns[0].assistant_b.reset();
  store->put_conversation(c);
  EXPECT_EQ(code_of([&] { store->put_reaction({"c1", 0, Side::b, Polarity::positive, {}, at_ms(2)}); }),
            ErrorCode::referential_violation);
  store->put_reaction({"c1", 0, Side::a, Polarity::positive, {Qualifier::useful}, at_ms(2)});
  store->put_reaction({"c1", 0, Side::a, Polarity::negative, {Qualifier::incorrect}, at_ms(3)});
  const auto rs = store->reactions_for("c1");
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].polarity, Polarity::negative);
  EXPECT_EQ(rs[0].qualifiers, std::set<Qualifier>{Qualifier::incorrect});
}

TEST_F(StoreTest, QueryVotesOrderAndWindow) {
  EXPECT_TRUE(store->query_votes().empty());
  for (int i : {3, 1, 2}) {
    const std::string id = "c" + std::to_string(i);
    store->put_conversation(answered(id, "s1", at_ms(i)));
    store->put_vote({id, VoteChoice::a, at_ms(100 * i)});
  }
  const auto votes = store->query_votes();
  ASSERT_EQ(votes.size(), 3u);
  EXPECT_EQ(votes[0].conversation_id, "c1");
  EXPECT_EQ(votes[1].conversation_id, "c2");
  EXPECT_EQ(votes[2].conversation_id, "c3");
  EXPECT_EQ(votes[0].model_a, "m1");
  TimeWindow none{at_ms(1000), std::nullopt};
  EXPECT_TRUE(store->query_votes(none).empty());
  TimeWindow middle{at_ms(200), at_ms(300)};
  ASSERT_EQ(store->query_votes(middle).size(), 1u);
  const auto counts = store->pair_counts();
  EXPECT_EQ(counts.at({"m1", "m2"}), 3);
}

TEST_F(StoreTest, TurnsAndMessages) {
  Conversation c = answered("c1", "s1", at_ms(1));
  store->put_conversation(c);
  EXPECT_EQ(store->append_turn("c1", "again"), 1);
  store->set_assistant_message("c1", 1, Side::a, {"x", 1, true, 3, FinishReason::length});
  EXPECT_THROW(store->set_assistant_message("c1", 1, Side::a, {"y", 1, false, 3, FinishReason::stop}), Error);
  const auto got = store->get_conversation("c1");
  ASSERT_EQ(got->turns.size(), 2u);
  EXPECT_EQ(got->turns[1].assistant_a->text, "x");
  EXPECT_FALSE(got->turns[1].assistant_b.has_value());
  EXPECT_TRUE(validate_conversation(*got).empty());
  store->mark_revealed("c1", at_ms(10), true);
  EXPECT_EQ(code_of([&] { store->append_turn("c1", "more"); }), ErrorCode::conversation_closed);
}

TEST_F(StoreTest, ExclusionsAreIdempotent) {
  store->put_conversation(answered("c1", "s1", at_ms(1)));
  const auto first = store->exclude("c1", ExclusionReason::takedown, at_ms(5), "");
  const auto second = store->exclude("c1", ExclusionReason::takedown, at_ms(9), "");
  EXPECT_EQ(first.excluded_at, second.excluded_at);
  EXPECT_EQ(store->exclusions().size(), 1u);
  EXPECT_EQ(code_of([&] { store->exclude("ghost", ExclusionReason::takedown, at_ms(5), ""); }), ErrorCode::not_found);
}

TEST_F(StoreTest, SnapshotsPersist) {
  EXPECT_FALSE(store->latest_snapshot().has_value());
  LeaderboardSnapshot s;
  s.as_of = at_ms(10);
  s.entries.push_back({"m1", 2.0, 1120.4, 1100, 1130, 4, 0});
  store->put_snapshot(s);
  s.as_of = at_ms(20);
  store->put_snapshot(s);
  EXPECT_EQ(store->latest_snapshot()->as_of, at_ms(20));
  EXPECT_EQ(store->latest_snapshot()->entries[0].model_id, "m1");
}

TEST(Store, RefusesNewerSchema) {
  TempDir dir;
  { auto s = open_sqlite_store(dir / "s.db"); }
  // Simulate a file written by a newer build.
  sqlite3* db = nullptr;
  ASSERT_EQ(sqlite3_open((dir / "s.db").c_str(), &db), SQLITE_OK);
  ASSERT_EQ(sqlite3_exec(db, "UPDATE meta SET value='99' WHERE key='schema_version'", nullptr, nullptr, nullptr),
            SQLITE_OK);
  sqlite3_close(db);
  try {
    open_sqlite_store(dir / "s.db");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema_too_new);
  }
}

// Durability harness: a child process writes 100 records and dies without
// closing the store; every committed record must be readable afterwards.
TEST(StoreDurability, SurvivesAbruptProcessDeath) {
  TempDir dir;
  const auto path = dir / "crash.db";
  {
    auto s = open_sqlite_store(path);
    s->upsert_model(make_card("m1"));
    s->upsert_model(make_card("m2"));
  }
  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    auto s = open_sqlite_store(path);
    s->put_session({"s1", true, at_ms(0)});
    for (int i = 0; i < 50; ++i) {
      const std::string id = "c" + std::to_string(i);
      s->put_conversation(answered(id, "s1", at_ms(i)));
      s->put_vote({id, VoteChoice::b, at_ms(1000 + i)});
    }
    ::kill(::getpid(), SIGKILL);
    _exit(3);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFSIGNALED(status));
  auto s = open_sqlite_store(path);
  EXPECT_EQ(s->list_conversations().size(), 50u);
  EXPECT_EQ(s->query_votes().size(), 50u);
}

TEST(StoreConcurrency, VoteStormHasExactlyOneWinner) {
  TempDir dir;
  auto store = std::shared_ptr<Store>(open_sqlite_store(dir / "s.db"));
  store->upsert_model(make_card("m1"));
  store->upsert_model(make_card("m2"));
  store->put_session({"s1", true, at_ms(0)});
  store->put_conversation(answered("c1", "s1", at_ms(1)));
  std::atomic<int> ok{0}, dup{0}, other{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 100; ++t) {
    threads.emplace_back([&, t] {
      try {
        store->put_vote({"c1", static_cast<VoteChoice>(t % 4), at_ms(10 + t)});
        ++ok;
      } catch (const Error& e) {
        (e.code() == ErrorCode::duplicate_vote ? dup : other)++;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(dup.load(), 99);
  EXPECT_EQ(other.load(), 0);
}

// Property: concurrent writers referencing a mix of real and missing
// conversations never leave a dangling vote or reaction.
TEST(StoreConcurrency, ReferentialIntegrityUnderStorm) {
  TempDir dir;
  auto store = std::shared_ptr<Store>(open_sqlite_store(dir / "s.db"));
  store->upsert_model(make_card("m1"));
  store->upsert_model(make_card("m2"));
  store->put_session({"s1", true, at_ms(0)});
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      std::mt19937_64 rng(t);
      for (int k = 0; k < 40; ++k) {
        const std::string id = "c" + std::to_string(rng() % 30);
        try {
          switch (rng() % 4) {
            case 0: store->put_conversation(answered(id, "s1", at_ms(k))); break;
            case 1: store->put_vote({id, VoteChoice::a, at_ms(100 + k)}); break;
            case 2: store->put_reaction({id, 0, Side::a, Polarity::positive, {}, at_ms(100 + k)}); break;
            default: store->mark_revealed(id, at_ms(200 + k), true); break;
          }
        } catch (const Error&) {
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  std::set<std::string> ids;
  for (const auto& c : store->list_conversations()) ids.insert(c.conversation_id);
  for (const auto& v : store->query_votes()) {
    EXPECT_TRUE(ids.count(v.conversation_id));
    const auto st = store->reveal_state(v.conversation_id);
    if (st.revealed) EXPECT_GT(*st.revealed_at, store->get_vote(v.conversation_id)->cast_at);
  }
  for (const auto& r : store->query_reactions()) EXPECT_TRUE(ids.count(r.conversation_id));
  for (const auto& rec : store->all_records()) EXPECT_EQ(rec.schema_version, kStoreSchemaVersion);
}

}  // namespace
}  // namespace arena
