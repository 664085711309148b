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
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "arena/domain.hpp"

namespace arena {

struct ChatMessage {
  enum class Role { system, user, assistant };
  Role role = Role::user;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

std::string_view to_string(ChatMessage::Role r);

// Unset fields mean "provider default"; sampling parameters are never
// persisted with conversations.
struct GenerationParams {
  std::optional<double> temperature;
  std::optional<int> max_tokens;
};

struct ProviderConfig {
  std::string provider_id;
  std::string kind = "openai_compatible";  // or "mock"
  std::string base_url;
  std::string api_key_env;
  int timeout_ms = 60'000;
  int max_retries = 2;
};

// Throws Error(invalid_config) when timeout_ms < 1000 or max_retries is
// outside [0, 3].
void validate(const ProviderConfig& cfg);

struct StreamEvent {
  enum class Kind { delta, done, error };
  Kind kind = Kind::delta;
  std::string text_delta;           // kind == delta
  std::optional<std::int64_t> usage;  // kind == done, when reported
  std::string error_code;           // kind == error

  bool terminal() const { return kind != Kind::delta; }

  static StreamEvent delta(std::string text) { return {Kind::delta, std::move(text), std::nullopt, {}}; }
  static StreamEvent done(std::optional<std::int64_t> usage) { return {Kind::done, {}, usage, {}}; }
  static StreamEvent error(std::string code) { return {Kind::error, {}, std::nullopt, std::move(code)}; }

  friend bool operator==(const StreamEvent&, const StreamEvent&) = default;
};

std::string_view to_string(StreamEvent::Kind k);

struct CompletionRequest {
  std::string model_name;
  std::vector<ChatMessage> messages;
  GenerationParams params;
};

// Result of one upstream attempt as reported by a provider adapter.
struct AttemptOutcome {
  enum class Status { ok, transient_failure, fatal_failure, timed_out };
  Status status = Status::ok;
  std::optional<std::int64_t> usage;
  std::string detail;
};

using DeltaSink = std::function<void(std::string_view)>;
using Deadline = std::chrono::steady_clock::time_point;

// A provider adapter performs a single attempt. It must stop calling
// on_delta and return timed_out once the deadline has passed.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual AttemptOutcome attempt(const CompletionRequest& request, const DeltaSink& on_delta,
                                 Deadline deadline) = 0;
};

// Unbounded single-consumer queue of StreamEvents. Closed after the first
// terminal event; later pushes are dropped.
class EventChannel {
 public:
  void push(StreamEvent ev);
  // Blocks until an event is available; nullopt once closed and drained.
  std::optional<StreamEvent> next();
  std::optional<StreamEvent> next_for(std::chrono::milliseconds wait);
  bool closed() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<StreamEvent> queue_;
  bool closed_ = false;
};

using EventSink = std::function<void(const StreamEvent&)>;

struct StreamOutcome {
  StreamEvent terminal;
  std::string text;  // concatenated deltas
  int retries = 0;
  std::int64_t elapsed_ms = 0;
};

struct ProviderStats {
  std::int64_t attempts = 0;
  std::int64_t retries = 0;
  std::int64_t failures = 0;
};

struct SideRequest {
  ProviderRoute route;
  std::vector<ChatMessage> history;
};

using PairSink = std::function<void(Side, const StreamEvent&)>;

// Handle over the two producer threads of a paired completion. Destruction
// waits for both sides to terminate.
class FanOut {
 public:
  FanOut() = default;
  FanOut(FanOut&&) = default;
  FanOut& operator=(FanOut&&) = default;
  ~FanOut();

  void wait();
  const StreamOutcome& outcome(Side s) const { return s == Side::a ? *a_ : *b_; }

 private:
  friend class Gateway;
  std::shared_ptr<StreamOutcome> a_ = std::make_shared<StreamOutcome>();
  std::shared_ptr<StreamOutcome> b_ = std::make_shared<StreamOutcome>();
  std::jthread thread_a_;
  std::jthread thread_b_;
};

struct PairChannels {
  std::shared_ptr<EventChannel> a;
  std::shared_ptr<EventChannel> b;
  FanOut handle;

  std::shared_ptr<EventChannel>& channel(Side s) { return s == Side::a ? a : b; }
};

class Gateway {
 public:
  // system_prompt is prepended identically to both sides of every request;
  // empty means none.
  explicit Gateway(std::string system_prompt = {});

  void add_provider(const ProviderConfig& cfg, std::shared_ptr<Provider> provider);
  bool has_provider(std::string_view provider_id) const;
  std::vector<std::string> provider_ids() const;

  // Runs one stream to completion on the calling thread, forwarding every
  // event to sink. Throws Error(unknown_provider) before emitting anything
  // when the route does not resolve, and Error(invalid_argument) when the
  // history is empty or does not end with a user message.
  StreamOutcome complete_stream(const ProviderRoute& route, const std::vector<ChatMessage>& history,
                                const GenerationParams& params, const EventSink& sink) const;

  // Same as above on a background thread; events arrive on the channel.
  std::pair<std::shared_ptr<EventChannel>, std::jthread> stream(const ProviderRoute& route,
                                                                std::vector<ChatMessage> history,
                                                                const GenerationParams& params) const;

  // Runs both sides concurrently. sink is called from both producer
  // threads and must be thread-safe. Both routes are validated up front.
  FanOut fan_out_pair(const SideRequest& a, const SideRequest& b, const GenerationParams& params,
                      PairSink sink) const;

  PairChannels fan_out_pair(const SideRequest& a, const SideRequest& b,
                            const GenerationParams& params) const;

  ProviderStats stats(std::string_view provider_id) const;

 private:
  struct Entry {
    ProviderConfig config;
    std::shared_ptr<Provider> provider;
  };

  Entry resolve(const ProviderRoute& route) const;

  std::string system_prompt_;
  mutable std::mutex mu_;
  std::map<std::string, Entry, std::less<>> providers_;
  mutable std::map<std::string, ProviderStats, std::less<>> stats_;
};

}  // namespace arena
