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

#include "arena/mock_provider.hpp"

#include <array>
#include <charconv>
#include <functional>
#include <random>
#include <string_view>
#include <thread>

#include "arena/util.hpp"

namespace arena {

namespace {

constexpr std::array<std::string_view, 24> kFiller{
    "the",     "answer", "depends", "on",     "context", "and",    "several", "factors",
    "first",   "note",   "that",    "this",   "usually", "works",  "because", "energy",
    "moves",   "through", "simple", "steps",  "overall", "result", "remains", "clear",
};

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> filler_for(const CompletionRequest& request) {
  std::uint64_t seed = fnv1a(request.model_name);
  for (const auto& m : request.messages) seed = fnv1a(m.content, seed);
  std::mt19937_64 gen(seed);
  const std::size_t words = 5 + gen() % 30;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words; ++i) {
    std::string w(kFiller[gen() % kFiller.size()]);
    if (i + 1 < words) w.push_back(' ');
    out.push_back(std::move(w));
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

void MockProvider::inject_transient_failures(int n) {
  std::lock_guard lock(mu_);
  transient_failures_ = n;
}

void MockProvider::set_report_usage(bool report) {
  std::lock_guard lock(mu_);
  report_usage_ = report;
}

void MockProvider::set_delta_delay(std::chrono::milliseconds delay) {
  std::lock_guard lock(mu_);
  delta_delay_ = delay;
}

void MockProvider::set_script(const std::string& model_name, Script script) {
  std::lock_guard lock(mu_);
  scripts_[model_name] = std::move(script);
}

void MockProvider::clear_scripts() {
  std::lock_guard lock(mu_);
  scripts_.clear();
}

std::vector<MockProvider::CallRecord> MockProvider::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

void MockProvider::clear_calls() {
  std::lock_guard lock(mu_);
  calls_.clear();
}

AttemptOutcome MockProvider::attempt(const CompletionRequest& request, const DeltaSink& on_delta,
                                     Deadline deadline) {
  std::optional<Script> script;
  bool report_usage = true;
  std::chrono::milliseconds delay{0};
  bool transient = false;
  std::size_t call_index = 0;
  {
    std::lock_guard lock(mu_);
    if (auto it = scripts_.find(request.model_name); it != scripts_.end()) script = it->second;
    report_usage = report_usage_;
    delay = delta_delay_;
    if (transient_failures_ > 0) {
      --transient_failures_;
      transient = true;
    }
    call_index = calls_.size();
    calls_.push_back({request.model_name, request.messages, AttemptOutcome::Status::ok});
  }
  auto finish = [&](AttemptOutcome outcome) {
    std::lock_guard lock(mu_);
    calls_[call_index].status = outcome.status;
    return outcome;
  };

  if (transient) return finish({AttemptOutcome::Status::transient_failure, std::nullopt, "injected"});

  std::string_view prompt;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == ChatMessage::Role::user) {
      prompt = it->content;
      break;
    }
  }

  std::vector<std::string> deltas;
  bool fail_after = false;
  if (script) {
    deltas = script->deltas;
    fail_after = script->fail_after;
    report_usage = report_usage && script->report_usage;
  } else if (starts_with(prompt, "echo:")) {
    deltas = utf8_chars(prompt.substr(5));
  } else if (prompt == "fail") {
    return finish({AttemptOutcome::Status::fatal_failure, std::nullopt, "mock failure"});
  } else if (starts_with(prompt, "fail-mid:")) {
    deltas = utf8_chars(prompt.substr(9));
    fail_after = true;
  } else if (starts_with(prompt, "sleep:")) {
    int ms = 0;
    const auto rest = prompt.substr(6);
    std::from_chars(rest.data(), rest.data() + rest.size(), ms);
    const auto wake = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
    while (std::chrono::steady_clock::now() < wake) {
      if (std::chrono::steady_clock::now() >= deadline) {
        return finish({AttemptOutcome::Status::timed_out, std::nullopt, "deadline"});
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    deltas = {"ok"};
  } else {
    deltas = filler_for(request);
  }

  std::int64_t emitted = 0;
  for (const auto& d : deltas) {
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    if (std::chrono::steady_clock::now() >= deadline) {
      return finish({AttemptOutcome::Status::timed_out, std::nullopt, "deadline"});
    }
    on_delta(d);
    ++emitted;
  }
  if (fail_after) return finish({AttemptOutcome::Status::fatal_failure, std::nullopt, "mock mid-stream failure"});
  return finish({AttemptOutcome::Status::ok, report_usage ? std::optional<std::int64_t>(emitted) : std::nullopt, {}});
}

}  // namespace arena
