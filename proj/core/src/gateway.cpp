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

#include "arena/gateway.hpp"

#include "arena/error.hpp"

namespace arena {

std::string_view to_string(ChatMessage::Role r) {
  switch (r) {
    case ChatMessage::Role::system: return "system";
    case ChatMessage::Role::user: return "user";
    case ChatMessage::Role::assistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(StreamEvent::Kind k) {
  switch (k) {
    case StreamEvent::Kind::delta: return "delta";
    case StreamEvent::Kind::done: return "done";
    case StreamEvent::Kind::error: return "error";
  }
  return "error";
}

void validate(const ProviderConfig& cfg) {
  if (cfg.provider_id.empty()) throw Error(ErrorCode::invalid_config, "provider_id is empty");
  if (cfg.timeout_ms < 1000) {
    throw Error(ErrorCode::invalid_config, "provider '" + cfg.provider_id + "': timeout_ms must be >= 1000");
  }
  if (cfg.max_retries < 0 || cfg.max_retries > 3) {
    throw Error(ErrorCode::invalid_config, "provider '" + cfg.provider_id + "': max_retries must be in [0, 3]");
  }
}

void EventChannel::push(StreamEvent ev) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    closed_ = ev.terminal();
    queue_.push_back(std::move(ev));
  }
  cv_.notify_all();
}

std::optional<StreamEvent> EventChannel::next() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !queue_.empty() || closed_; });
  if (queue_.empty()) return std::nullopt;
  auto ev = std::move(queue_.front());
  queue_.pop_front();
  return ev;
}

std::optional<StreamEvent> EventChannel::next_for(std::chrono::milliseconds wait) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, wait, [&] { return !queue_.empty() || closed_; })) return std::nullopt;
  if (queue_.empty()) return std::nullopt;
  auto ev = std::move(queue_.front());
  queue_.pop_front();
  return ev;
}

bool EventChannel::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

FanOut::~FanOut() { wait(); }

void FanOut::wait() {
  if (thread_a_.joinable()) thread_a_.join();
  if (thread_b_.joinable()) thread_b_.join();
}

Gateway::Gateway(std::string system_prompt) : system_prompt_(std::move(system_prompt)) {}

void Gateway::add_provider(const ProviderConfig& cfg, std::shared_ptr<Provider> provider) {
  validate(cfg);
  if (!provider) throw Error(ErrorCode::invalid_config, "null provider for '" + cfg.provider_id + "'");
  std::lock_guard lock(mu_);
  providers_.insert_or_assign(cfg.provider_id, Entry{cfg, std::move(provider)});
}

bool Gateway::has_provider(std::string_view provider_id) const {
  std::lock_guard lock(mu_);
  return providers_.find(provider_id) != providers_.end();
}

std::vector<std::string> Gateway::provider_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : providers_) ids.push_back(id);
  return ids;
}

ProviderStats Gateway::stats(std::string_view provider_id) const {
  std::lock_guard lock(mu_);
  auto it = stats_.find(provider_id);
  return it == stats_.end() ? ProviderStats{} : it->second;
}

Gateway::Entry Gateway::resolve(const ProviderRoute& route) const {
  std::lock_guard lock(mu_);
  auto it = providers_.find(route.provider_id);
  if (it == providers_.end()) {
    throw Error(ErrorCode::unknown_provider, "unknown provider '" + route.provider_id + "'");
  }
  return it->second;
}

namespace {

void check_history(const std::vector<ChatMessage>& history) {
  if (history.empty() || history.back().role != ChatMessage::Role::user) {
    throw Error(ErrorCode::invalid_argument, "history must be nonempty and end with a user message");
  }
}

}  // namespace

StreamOutcome Gateway::complete_stream(const ProviderRoute& route, const std::vector<ChatMessage>& history,
                                       const GenerationParams& params, const EventSink& sink) const {
  check_history(history);
  const Entry entry = resolve(route);

  CompletionRequest request;
  request.model_name = route.model_name;
  request.params = params;
  if (!system_prompt_.empty()) {
    request.messages.push_back({ChatMessage::Role::system, system_prompt_});
  }
  request.messages.insert(request.messages.end(), history.begin(), history.end());

  auto bump = [&](auto field) {
    std::lock_guard lock(mu_);
    ++(stats_[route.provider_id].*field);
  };

  StreamOutcome result;
  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 0;; ++attempt) {
    bump(&ProviderStats::attempts);
    bool emitted = false;
    const Deadline deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(entry.config.timeout_ms);
    AttemptOutcome outcome;
    try {
      outcome = entry.provider->attempt(
          request,
          [&](std::string_view piece) {
            if (piece.empty()) return;
            emitted = true;
            result.text.append(piece);
            sink(StreamEvent::delta(std::string(piece)));
          },
          deadline);
    } catch (const std::exception& e) {
      outcome = {AttemptOutcome::Status::fatal_failure, std::nullopt, e.what()};
    }

    if (outcome.status == AttemptOutcome::Status::ok) {
      result.terminal = StreamEvent::done(outcome.usage);
      break;
    }
    if (outcome.status == AttemptOutcome::Status::timed_out) {
      result.terminal = StreamEvent::error(std::string(to_string(ErrorCode::timeout)));
    } else if (outcome.status == AttemptOutcome::Status::transient_failure && !emitted &&
               attempt < entry.config.max_retries) {
      ++result.retries;
      bump(&ProviderStats::retries);
      std::this_thread::sleep_for(std::chrono::milliseconds(10 << attempt));
      continue;
    } else {
      result.terminal = StreamEvent::error(std::string(to_string(ErrorCode::upstream_error)));
    }
    bump(&ProviderStats::failures);
    break;
  }
  result.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  sink(result.terminal);
  return result;
}

std::pair<std::shared_ptr<EventChannel>, std::jthread> Gateway::stream(const ProviderRoute& route,
                                                                       std::vector<ChatMessage> history,
                                                                       const GenerationParams& params) const {
  check_history(history);
  resolve(route);
  auto channel = std::make_shared<EventChannel>();
  std::jthread worker([this, route, history = std::move(history), params, channel] {
    complete_stream(route, history, params, [&](const StreamEvent& ev) { channel->push(ev); });
  });
  return {channel, std::move(worker)};
}

FanOut Gateway::fan_out_pair(const SideRequest& a, const SideRequest& b, const GenerationParams& params,
                             PairSink sink) const {
  check_history(a.history);
  check_history(b.history);
  resolve(a.route);
  resolve(b.route);

  FanOut handle;
  auto run = [this, params, sink](SideRequest req, Side side, std::shared_ptr<StreamOutcome> out) {
    *out = complete_stream(req.route, req.history, params, [&](const StreamEvent& ev) { sink(side, ev); });
  };
  handle.thread_a_ = std::jthread(run, a, Side::a, handle.a_);
  handle.thread_b_ = std::jthread(run, b, Side::b, handle.b_);
  return handle;
}

PairChannels Gateway::fan_out_pair(const SideRequest& a, const SideRequest& b,
                                   const GenerationParams& params) const {
  PairChannels out{std::make_shared<EventChannel>(), std::make_shared<EventChannel>(), {}};
  out.handle = fan_out_pair(a, b, params, [ca = out.a, cb = out.b](Side side, const StreamEvent& ev) {
    (side == Side::a ? ca : cb)->push(ev);
  });
  return out;
}

}  // namespace arena
