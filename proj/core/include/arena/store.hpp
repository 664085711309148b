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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/domain.hpp"
#include "arena/pairing.hpp"
#include "arena/ranking.hpp"

namespace arena {

inline constexpr int kStoreSchemaVersion = 1;

struct TimeWindow {
  std::optional<Timestamp> since;  // inclusive
  std::optional<Timestamp> until;  // exclusive

  bool contains(Timestamp t) const { return (!since || t >= *since) && (!until || t < *until); }
};

enum class RecordKind { conversation, vote, reaction, model_card };
std::string_view to_string(RecordKind k);

struct StoreRecord {
  RecordKind record_kind = RecordKind::conversation;
  std::variant<Conversation, Vote, Reaction, ModelCard> payload;
  Timestamp written_at{};
  int schema_version = kStoreSchemaVersion;
};

enum class ExclusionReason { pii_flagged, takedown };
std::string_view to_string(ExclusionReason r);

struct Exclusion {
  ConversationId conversation_id;
  ExclusionReason reason = ExclusionReason::takedown;
  Timestamp excluded_at{};
  std::string detail;
};

struct RevealState {
  bool revealed = false;
  bool give_up = false;
  std::optional<Timestamp> revealed_at;
};

// Storage contract. Every mutation validates its payload and referential
// integrity; vote insertion checks the unrevealed state in the same
// transaction as the insert. Implementations are safe for concurrent use.
class Store {
 public:
  virtual ~Store() = default;

  // Models. add_model rejects an existing id with Error(duplicate_model).
  virtual std::int64_t upsert_model(const ModelCard& card) = 0;
  virtual std::int64_t add_model(const ModelCard& card) = 0;
  virtual std::optional<ModelCard> get_model(const ModelId& id) const = 0;
  virtual std::vector<ModelCard> list_models() const = 0;
  virtual void set_model_enabled(const ModelId& id, bool enabled) = 0;

  virtual void put_session(const Session& session) = 0;
  virtual std::optional<Session> get_session(const SessionId& id) const = 0;

  // Conversations are inserted with their initial turns.
  virtual std::int64_t put_conversation(const Conversation& c) = 0;
  // Appends a turn holding only the user text; Error(conversation_closed)
  // once revealed. Returns the new turn index.
  virtual int append_turn(const ConversationId& id, const std::string& user_text) = 0;
  virtual void set_assistant_message(const ConversationId& id, int turn_index, Side side,
                                     const AssistantMessage& message) = 0;
  virtual std::optional<Conversation> get_conversation(const ConversationId& id) const = 0;
  // Ordered by (created_at, conversation_id).
  virtual std::vector<Conversation> list_conversations(const TimeWindow& window = {}) const = 0;

  // Errors: referential_violation, duplicate_vote, vote_after_reveal.
  virtual std::int64_t put_vote(const Vote& v) = 0;
  virtual std::optional<Vote> get_vote(const ConversationId& id) const = 0;
  // Last write wins per (conversation, turn, side). Error(conversation_closed)
  // after reveal, referential_violation when the message does not exist.
  virtual std::int64_t put_reaction(const Reaction& r) = 0;
  virtual std::vector<Reaction> reactions_for(const ConversationId& id) const = 0;

  // One-way. Returns false if it was already revealed. When a vote exists
  // the stored reveal time is forced strictly after its cast_at.
  virtual bool mark_revealed(const ConversationId& id, Timestamp at, bool give_up) = 0;
  virtual RevealState reveal_state(const ConversationId& id) const = 0;

  // Votes with pairings resolved, ordered by cast_at (ties by id).
  virtual std::vector<RankingVote> query_votes(const TimeWindow& window = {}) const = 0;
  virtual std::vector<RankingReaction> query_reactions(const TimeWindow& window = {}) const = 0;
  virtual PairCounts pair_counts() const = 0;

  // One-way exclusion, idempotent per (id, reason): a repeated call returns
  // the original record. Error(not_found) for unknown conversations.
  virtual Exclusion exclude(const ConversationId& id, ExclusionReason reason, Timestamp at,
                            const std::string& detail) = 0;
  virtual std::vector<Exclusion> exclusions() const = 0;

  virtual void put_snapshot(const LeaderboardSnapshot& snapshot) = 0;
  virtual std::optional<LeaderboardSnapshot> latest_snapshot() const = 0;

  virtual std::vector<StoreRecord> all_records() const = 0;
};

// Embedded single-file relational store. Refuses to open a file written
// with a newer schema (Error(schema_too_new)).
std::unique_ptr<Store> open_sqlite_store(const std::filesystem::path& path);

}  // namespace arena
