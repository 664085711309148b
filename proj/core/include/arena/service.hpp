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
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "arena/energy.hpp"
#include "arena/gateway.hpp"
#include "arena/pairing.hpp"
#include "arena/ranking.hpp"
#include "arena/store.hpp"
#include "arena/util.hpp"

namespace arena {

// Fixed-window request counter per key.
class RateLimiter {
 public:
  RateLimiter(int max_requests, std::chrono::milliseconds window);
  // False once the key exceeded max_requests in the current window.
  bool allow(const std::string& key, Timestamp now);

 private:
  struct Bucket {
    Timestamp window_start{};
    int count = 0;
  };
  int max_requests_;
  std::chrono::milliseconds window_;
  std::mutex mu_;
  std::map<std::string, Bucket> buckets_;
};

struct ServiceOptions {
  std::size_t max_prompt_chars = 8000;
  std::chrono::milliseconds session_ttl = std::chrono::hours(24);
  GenerationParams generation;
  std::vector<std::string> suggestions;
  RankingConfig ranking;
  std::chrono::milliseconds leaderboard_interval = std::chrono::hours(24 * 7);
  std::chrono::milliseconds leaderboard_poll = std::chrono::minutes(1);
};

// One event of a turn's multiplexed stream. Terminal events carry the
// token count recorded for that side.
struct SideEvent {
  Side side = Side::a;
  StreamEvent event;
  std::int64_t output_tokens = 0;
  bool tokens_estimated = false;
};

class ArenaService;

// Multiplexed events of both sides of one turn, in arrival order, with
// per-side order preserved. Each side's assistant message is persisted
// before its terminal event is delivered. Destruction waits for both
// sides to finish.
class TurnStream {
 public:
  ~TurnStream();
  TurnStream(const TurnStream&) = delete;
  TurnStream& operator=(const TurnStream&) = delete;

  const ConversationId& conversation_id() const { return conversation_id_; }
  int turn_index() const { return turn_index_; }

  // Blocks; nullopt once both sides terminated and everything was read.
  std::optional<SideEvent> next();
  std::vector<SideEvent> drain();

  struct State;

 private:
  friend class ArenaService;
  TurnStream(ConversationId id, int turn_index, std::shared_ptr<State> state);

  ConversationId conversation_id_;
  int turn_index_ = 0;
  std::shared_ptr<State> state_;
  FanOut handle_;
};

// Card fields safe to show at reveal (no provider routing).
struct PublicModelCard {
  ModelId model_id;
  std::string display_name;
  std::string organisation;
  LicenseKind license_kind = LicenseKind::open_weight;
  bool training_allowed = true;
  double active_param_count = 0;
  double total_param_count = 0;
  bool params_estimated = false;
  std::string metadata_text;
};

PublicModelCard public_card(const ModelCard& card);

struct RevealSide {
  PublicModelCard model;
  EnergyEstimate energy;
  std::int64_t output_tokens = 0;
};

struct RevealPayload {
  ConversationId conversation_id;
  RevealSide a;
  RevealSide b;
  std::optional<VoteChoice> vote;
  bool give_up = false;
};

struct ReactionRequest {
  ConversationId conversation_id;
  int turn_index = 0;
  Side side = Side::a;
  Polarity polarity = Polarity::positive;
  std::set<Qualifier> qualifiers;
};

// Arena workflow over a store and a gateway. Must outlive every TurnStream
// it returns.
class ArenaService {
 public:
  ArenaService(std::shared_ptr<Store> store, std::shared_ptr<const Gateway> gateway, PairingPolicy pairing,
               EnergyTable energy, ServiceOptions options = {}, Clock clock = system_now);
  ~ArenaService();

  // Absent consent counts as refused: Error(consent_required).
  SessionId create_session(std::optional<bool> consent);

  // Errors: unknown_session, empty_prompt, prompt_too_long,
  // insufficient_models.
  std::unique_ptr<TurnStream> start_conversation(const SessionId& session, const std::string& prompt);
  // Errors: not_found, conversation_closed, turn_in_progress, empty_prompt,
  // prompt_too_long.
  std::unique_ptr<TurnStream> continue_conversation(const ConversationId& id, const std::string& prompt);

  // Errors: not_found, conversation_closed.
  void react(const ReactionRequest& request);
  // Errors: not_found, vote_after_reveal, duplicate_vote, no_completed_turn.
  void vote(const ConversationId& id, VoteChoice choice);
  // Errors: not_found, feedback_required, conversation_closed (already
  // revealed), turn_in_progress.
  RevealPayload reveal(const ConversationId& id, bool give_up);

  // Error(no_snapshot) until a snapshot exists.
  std::shared_ptr<const LeaderboardSnapshot> get_leaderboard() const;
  // Recomputes from the store, persists and publishes the snapshot.
  std::shared_ptr<const LeaderboardSnapshot> refresh_leaderboard();
  // Publishes the newest snapshot persisted in the store, if any.
  void reload_leaderboard();
  // Background thread: reloads every poll period and recomputes when the
  // newest snapshot is older than the interval.
  void start_scheduler();
  void stop_scheduler();

  std::vector<PublicModelCard> public_models() const;
  const std::vector<std::string>& suggestions() const { return options_.suggestions; }

  Store& store() { return *store_; }
  const ServiceOptions& options() const { return options_; }
  Timestamp now() const { return clock_(); }

 private:
  friend class TurnStream;

  void check_prompt(const std::string& prompt) const;
  std::vector<ModelCard> drawable_models() const;
  std::unique_ptr<TurnStream> launch_turn(const Conversation& c, int turn_index);
  void finish_turn(const ConversationId& id);

  std::shared_ptr<Store> store_;
  std::shared_ptr<const Gateway> gateway_;
  PairSampler sampler_;
  EnergyTable energy_;
  ServiceOptions options_;
  Clock clock_;

  std::mutex turn_mu_;
  std::set<ConversationId> in_flight_;

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const LeaderboardSnapshot> snapshot_;

  std::mutex scheduler_mu_;
  std::condition_variable scheduler_cv_;
  bool scheduler_stop_ = false;
  std::jthread scheduler_;
};

}  // namespace arena
