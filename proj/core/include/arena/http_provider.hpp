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

#include <string>

#include "arena/gateway.hpp"

namespace arena {

// Adapter for chat-completion endpoints that speak the OpenAI-style
// streaming protocol (OpenRouter, Hugging Face router, vLLM, ...).
// POSTs {base_url}/chat/completions with "stream": true and reads the
// server-sent "data:" lines until "[DONE]". No tools are ever requested.
class OpenAiCompatibleProvider : public Provider {
 public:
  OpenAiCompatibleProvider(std::string base_url, std::string api_key);

  AttemptOutcome attempt(const CompletionRequest& request, const DeltaSink& on_delta,
                         Deadline deadline) override;

  // Request body sent for a completion (exposed for tests).
  static std::string request_body(const CompletionRequest& request);

 private:
  std::string origin_;     // scheme://host[:port]
  std::string base_path_;  // path prefix without trailing slash
  std::string api_key_;
};

// Incremental parser for the streaming response body. Feed arbitrary
// chunks; complete "data:" lines are decoded as they arrive.
class ChatCompletionSseParser {
 public:
  struct Result {
    bool done = false;
    bool malformed = false;
    std::optional<std::int64_t> usage;
    std::string error_message;
  };

  explicit ChatCompletionSseParser(DeltaSink on_delta) : on_delta_(std::move(on_delta)) {}

  void feed(std::string_view chunk);
  void finish();
  const Result& result() const { return result_; }

 private:
  void handle_line(std::string_view line);

  DeltaSink on_delta_;
  std::string buffer_;
  Result result_;
};

}  // namespace arena
