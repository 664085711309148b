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

#include "arena/service.hpp"

#include <algorithm>
#include <cctype>

#include "arena/error.hpp"

namespace arena {

RateLimiter::RateLimiter(int max_requests, std::chrono::milliseconds window)
    : max_requests_(max_requests), window_(window) {}

bool RateLimiter::allow(const std::string& key, Timestamp now) {
  if (max_requests_ <= 0) return true;
  std::lock_guard lock(mu_);
  auto& b = buckets_[key];
  if (now - b.window_start >= window_) {
    b.window_start = now;
    b.count = 0;
  }
  if (b.count >= max_requests_) return false;
  ++b.count;
  if (buckets_.size() > 100'000) {
    std::erase_if(buckets_, [&](const auto& kv) { return now - kv.second.window_start >= window_; });
  }
  return true;
}

PublicModelCard public_card(const ModelCard& card) {
  return {card.model_id,          card.display_name,      card.organisation,
          card.license_kind,      card.training_allowed,  card.active_param_count,
          card.total_param_count, card.params_estimated,  card.metadata_text};
}

struct TurnStream::State {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<SideEvent> queue;
  int terminated = 0;
  std::string text[2];
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

TurnStream::TurnStream(ConversationId id, int turn_index, std::shared_ptr<State> state)
    : conversation_id_(std::move(id)), turn_index_(turn_index), state_(std::move(state)) {}

TurnStream::~TurnStream() { handle_.wait(); }

std::optional<SideEvent> TurnStream::next() {
  std::unique_lock lock(state_->mu);
  state_->cv.wait(lock, [&] { return !state_->queue.empty() || state_->terminated == 2; });
  if (state_->queue.empty()) return std::nullopt;
  auto ev = std::move(state_->queue.front());
  state_->queue.pop_front();
  return ev;
}

std::vector<SideEvent> TurnStream::drain() {
  std::vector<SideEvent> out;
  while (auto ev = next()) out.push_back(std::move(*ev));
  return out;
}

ArenaService::ArenaService(std::shared_ptr<Store> store, std::shared_ptr<const Gateway> gateway,
                           PairingPolicy pairing, EnergyTable energy, ServiceOptions options, Clock clock)
    : store_(std::move(store)),
      gateway_(std::move(gateway)),
      sampler_(pairing),
      energy_(std::move(energy)),
      options_(std::move(options)),
      clock_(std::move(clock)) {
  if (!store_ || !gateway_) throw Error(ErrorCode::invalid_config, "service needs a store and a gateway");
  energy_.selected();  // fail fast on missing coefficients
  reload_leaderboard();
}

ArenaService::~ArenaService() { stop_scheduler(); }

SessionId ArenaService::create_session(std::optional<bool> consent) {
  if (!consent.value_or(false)) throw Error(ErrorCode::consent_required, "data reuse consent is required");
  Session s{random_id(16), true, clock_()};
  store_->put_session(s);
  return s.session_id;
}

void ArenaService::check_prompt(const std::string& prompt) const {
  const bool blank = std::all_of(prompt.begin(), prompt.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  if (blank) throw Error(ErrorCode::empty_prompt, "prompt is empty");
  if (utf8_length(prompt) > options_.max_prompt_chars) {
    throw Error(ErrorCode::prompt_too_long, "prompt exceeds " + std::to_string(options_.max_prompt_chars) + " characters");
  }
}

std::vector<ModelCard> ArenaService::drawable_models() const {
  std::vector<ModelCard> out;
  for (auto& card : store_->list_models()) {
    if (card.enabled && gateway_->has_provider(card.provider_route.provider_id)) out.push_back(std::move(card));
  }
  return out;
}

std::unique_ptr<TurnStream> ArenaService::start_conversation(const SessionId& session_id, const std::string& prompt) {
  const auto session = store_->get_session(session_id);
  const auto now = clock_();
  if (!session || !session->consent || now - session->created_at > options_.session_ttl) {
    throw Error(ErrorCode::unknown_session, "unknown or expired session");
  }
  check_prompt(prompt);

  const auto registry = drawable_models();
  const Pairing pairing = sampler_.draw_pair(registry, store_->pair_counts());

  Conversation c;
  c.conversation_id = random_id(16);
  c.session_id = session_id;
  c.pairing = pairing;
  c.turns.push_back(Turn{0, prompt, std::nullopt, std::nullopt});
  c.created_at = now;
  {
    std::lock_guard lock(turn_mu_);
    in_flight_.insert(c.conversation_id);
  }
  try {
    store_->put_conversation(c);
    return launch_turn(c, 0);
  } catch (...) {
    finish_turn(c.conversation_id);
    throw;
  }
}

std::unique_ptr<TurnStream> ArenaService::continue_conversation(const ConversationId& id, const std::string& prompt) {
  check_prompt(prompt);
  {
    std::lock_guard lock(turn_mu_);
    if (in_flight_.count(id)) throw Error(ErrorCode::turn_in_progress, "previous turn still streaming");
    in_flight_.insert(id);
  }
  try {
    auto existing = store_->get_conversation(id);
    if (!existing) throw Error(ErrorCode::not_found, "unknown conversation");
    if (existing->revealed) throw Error(ErrorCode::conversation_closed, "conversation already revealed");
    const int index = store_->append_turn(id, prompt);
    auto c = store_->get_conversation(id);
    return launch_turn(*c, index);
  } catch (...) {
    finish_turn(id);
    throw;
  }
}

void ArenaService::finish_turn(const ConversationId& id) {
  std::lock_guard lock(turn_mu_);
  in_flight_.erase(id);
}

std::unique_ptr<TurnStream> ArenaService::launch_turn(const Conversation& c, int turn_index) {
  const auto card_a = store_->get_model(c.pairing.model_a);
  const auto card_b = store_->get_model(c.pairing.model_b);
  if (!card_a || !card_b) throw Error(ErrorCode::referential_violation, "pairing references unknown model");

  // Each side sees the shared user messages and only its own replies.
  auto history_for = [&](Side side) {
    std::vector<ChatMessage> h;
    for (const auto& t : c.turns) {
      if (t.turn_index > turn_index) break;
      h.push_back({ChatMessage::Role::user, t.user_text});
      if (t.turn_index == turn_index) break;
      if (const auto& msg = t.assistant(side); msg && !msg->text.empty()) {
        h.push_back({ChatMessage::Role::assistant, msg->text});
      }
    }
    return h;
  };

  auto state = std::make_shared<TurnStream::State>();
  const ConversationId id = c.conversation_id;
  auto sink = [this, state, id, turn_index](Side side, const StreamEvent& ev) {
    const auto s = static_cast<std::size_t>(side);
    SideEvent out{side, ev, 0, false};
    if (ev.kind == StreamEvent::Kind::delta) {
      std::lock_guard lock(state->mu);
      state->text[s] += ev.text_delta;
      state->queue.push_back(std::move(out));
      state->cv.notify_all();
      return;
    }

    AssistantMessage msg;
    {
      std::lock_guard lock(state->mu);
      msg.text = state->text[s];
    }
    if (ev.kind == StreamEvent::Kind::done && ev.usage) {
      msg.output_tokens = *ev.usage;
    } else {
      msg.output_tokens = estimate_tokens(msg.text);
      msg.tokens_estimated = true;
    }
    if (!msg.text.empty() && msg.output_tokens <= 0) {
      msg.output_tokens = estimate_tokens(msg.text);
      msg.tokens_estimated = true;
    }
    msg.generation_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - state->started)
                            .count();
    msg.finish_reason = ev.kind == StreamEvent::Kind::done ? FinishReason::stop : FinishReason::provider_error;
    try {
      store_->set_assistant_message(id, turn_index, side, msg);
    } catch (const std::exception&) {
      // The stream still terminates; the turn simply stays incomplete.
    }
    out.output_tokens = msg.output_tokens;
    out.tokens_estimated = msg.tokens_estimated;

    std::lock_guard lock(state->mu);
    if (state->terminated + 1 == 2) finish_turn(id);
    state->queue.push_back(std::move(out));
    ++state->terminated;
    state->cv.notify_all();
  };

  std::unique_ptr<TurnStream> stream(new TurnStream(id, turn_index, state));
  stream->handle_ = gateway_->fan_out_pair({card_a->provider_route, history_for(Side::a)},
                                           {card_b->provider_route, history_for(Side::b)}, options_.generation, sink);
  return stream;
}

void ArenaService::react(const ReactionRequest& request) {
  const auto c = store_->get_conversation(request.conversation_id);
  if (!c) throw Error(ErrorCode::not_found, "unknown conversation");
  if (c->revealed) throw Error(ErrorCode::conversation_closed, "conversation already revealed");
  if (request.turn_index < 0 || request.turn_index >= static_cast<int>(c->turns.size()) ||
      !c->turns[static_cast<std::size_t>(request.turn_index)].assistant(request.side)) {
    throw Error(ErrorCode::not_found, "no assistant message for that turn and side");
  }
  Reaction r{request.conversation_id, request.turn_index, request.side, request.polarity, request.qualifiers, clock_()};
  try {
    store_->put_reaction(r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::referential_violation) throw Error(ErrorCode::not_found, e.what());
    throw;
  }
}

void ArenaService::vote(const ConversationId& id, VoteChoice choice) {
  const auto c = store_->get_conversation(id);
  if (!c) throw Error(ErrorCode::not_found, "unknown conversation");
  if (c->revealed) throw Error(ErrorCode::vote_after_reveal, "conversation already revealed");
  if (c->voted) throw Error(ErrorCode::duplicate_vote, "conversation already has a vote");
  if (std::none_of(c->turns.begin(), c->turns.end(), [](const Turn& t) { return t.complete(); })) {
    throw Error(ErrorCode::no_completed_turn, "no completed turn to vote on");
  }
  store_->put_vote(Vote{id, choice, clock_()});
}

RevealPayload ArenaService::reveal(const ConversationId& id, bool give_up) {
  const auto c = store_->get_conversation(id);
  if (!c) throw Error(ErrorCode::not_found, "unknown conversation");
  if (c->revealed) throw Error(ErrorCode::conversation_closed, "conversation already revealed");
  {
    std::lock_guard lock(turn_mu_);
    if (in_flight_.count(id)) throw Error(ErrorCode::turn_in_progress, "turn still streaming");
  }
  const auto vote = store_->get_vote(id);
  if (!vote && !give_up) throw Error(ErrorCode::feedback_required, "vote first, or give up explicitly");
  const bool gave_up = !vote;
  if (!store_->mark_revealed(id, clock_(), gave_up)) {
    throw Error(ErrorCode::conversation_closed, "conversation already revealed");
  }

  const auto& coeffs = energy_.selected();
  RevealPayload payload;
  payload.conversation_id = id;
  payload.give_up = gave_up;
  if (vote) payload.vote = vote->choice;
  for (Side side : {Side::a, Side::b}) {
    const auto card = store_->get_model(c->pairing.model(side));
    if (!card) throw Error(ErrorCode::referential_violation, "unknown model");
    RevealSide& out = side == Side::a ? payload.a : payload.b;
    out.model = public_card(*card);
    for (const auto& t : c->turns) {
      if (const auto& msg = t.assistant(side)) {
        out.energy += estimate(*msg, *card, coeffs);
        out.output_tokens += msg->output_tokens;
      }
    }
    out.energy.estimated = out.energy.estimated || card->params_estimated;
  }
  return payload;
}

std::shared_ptr<const LeaderboardSnapshot> ArenaService::get_leaderboard() const {
  std::lock_guard lock(snapshot_mu_);
  if (!snapshot_) throw Error(ErrorCode::no_snapshot, "no leaderboard computed yet");
  return snapshot_;
}

std::shared_ptr<const LeaderboardSnapshot> ArenaService::refresh_leaderboard() {
  const auto votes = store_->query_votes();
  const auto reactions = store_->query_reactions();
  auto snap = std::make_shared<const LeaderboardSnapshot>(
      compute_leaderboard(votes, reactions, options_.ranking, clock_()));
  store_->put_snapshot(*snap);
  std::lock_guard lock(snapshot_mu_);
  snapshot_ = snap;
  return snap;
}

void ArenaService::reload_leaderboard() {
  auto latest = store_->latest_snapshot();
  if (!latest) return;
  auto snap = std::make_shared<const LeaderboardSnapshot>(std::move(*latest));
  std::lock_guard lock(snapshot_mu_);
  if (!snapshot_ || snapshot_->as_of <= snap->as_of) snapshot_ = std::move(snap);
}

void ArenaService::start_scheduler() {
  if (scheduler_.joinable()) return;
  {
    std::lock_guard lock(scheduler_mu_);
    scheduler_stop_ = false;
  }
  scheduler_ = std::jthread([this] {
    std::unique_lock lock(scheduler_mu_);
    while (!scheduler_stop_) {
      lock.unlock();
      try {
        reload_leaderboard();
        std::shared_ptr<const LeaderboardSnapshot> current;
        {
          std::lock_guard snap_lock(snapshot_mu_);
          current = snapshot_;
        }
        if (!current || clock_() - current->as_of >= options_.leaderboard_interval) refresh_leaderboard();
      } catch (const Error&) {
        // no data yet; try again next period
      }
      lock.lock();
      scheduler_cv_.wait_for(lock, options_.leaderboard_poll, [&] { return scheduler_stop_; });
    }
  });
}

void ArenaService::stop_scheduler() {
  {
    std::lock_guard lock(scheduler_mu_);
    scheduler_stop_ = true;
  }
  scheduler_cv_.notify_all();
  if (scheduler_.joinable()) scheduler_.join();
}

std::vector<PublicModelCard> ArenaService::public_models() const {
  std::vector<PublicModelCard> out;
  for (const auto& card : store_->list_models()) {
    if (card.enabled) out.push_back(public_card(card));
  }
  return out;
}

}  // namespace arena
