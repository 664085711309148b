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

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arena/gateway.hpp"

namespace arena {

// Deterministic in-process provider for tests and demos. Behaviour is keyed
// off the last user message:
//   "echo:<text>"       one delta per code point of <text>, usage = count
//   "fail"              upstream failure before any output
//   "fail-mid:<text>"   streams <text>, then fails
//   "sleep:<ms>"        waits <ms> (honouring the deadline), then replies "ok"
//   anything else       pseudo-random filler words seeded by model + history
// A per-model script, when set, overrides the prompt-driven behaviour.
class MockProvider : public Provider {
 public:
  struct Script {
    std::vector<std::string> deltas;
    bool fail_after = false;  // fail (non-retryable) after the deltas
    bool report_usage = true;
  };

  struct CallRecord {
    std::string model_name;
    std::vector<ChatMessage> messages;
    AttemptOutcome::Status status = AttemptOutcome::Status::ok;
  };

  AttemptOutcome attempt(const CompletionRequest& request, const DeltaSink& on_delta,
                         Deadline deadline) override;

  // The next n attempts fail transiently before streaming anything.
  void inject_transient_failures(int n);
  void set_report_usage(bool report);
  void set_delta_delay(std::chrono::milliseconds delay);
  void set_script(const std::string& model_name, Script script);
  void clear_scripts();

  std::vector<CallRecord> calls() const;
  void clear_calls();

 private:
  mutable std::mutex mu_;
  int transient_failures_ = 0;
  bool report_usage_ = true;
  std::chrono::milliseconds delta_delay_{0};
  std::map<std::string, Script> scripts_;
  std::vector<CallRecord> calls_;
};

}  // namespace arena
