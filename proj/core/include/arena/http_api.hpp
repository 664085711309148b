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

#include <memory>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "arena/error.hpp"
#include "arena/service.hpp"

namespace arena {

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  int rate_limit_requests = 120;
  std::chrono::milliseconds rate_limit_window = std::chrono::minutes(1);
  // Bearer token for the takedown endpoint; empty disables it.
  std::string admin_token;
};

int http_status(ErrorCode code);
nlohmann::json error_body(const Error& e);

// JSON bodies returned by the endpoints.
nlohmann::ordered_json to_json(const PublicModelCard& card);
nlohmann::ordered_json to_json(const RevealPayload& payload);

// Server-sent-event framing of one multiplexed stream event:
// "event: <kind>\ndata: {\"side\":..}\n\n".
std::string sse_frame(std::string_view event, const nlohmann::json& data);
std::string sse_frame(const SideEvent& ev);

// HTTP front end over an ArenaService.
//   POST /api/sessions                         {"consent": true}
//   POST /api/conversations                    {"session_id", "prompt"}  -> SSE
//   POST /api/conversations/{id}/messages      {"prompt"}                -> SSE
//   POST /api/conversations/{id}/reactions     {"turn_index", "side", "polarity", "qualifiers"}
//   POST /api/conversations/{id}/vote          {"choice"}
//   POST /api/conversations/{id}/reveal        {"give_up"}
//   GET  /api/leaderboard, /api/models, /api/suggestions, /healthz
//   POST /api/admin/takedown/{id}              (Authorization: Bearer <token>)
class HttpApi {
 public:
  HttpApi(ArenaService& service, HttpOptions options);
  ~HttpApi();

  // Binds the listening socket; Error(io_error) when the address is taken.
  // Returns the bound port.
  int bind();
  // Serves until stop(); bind() must have succeeded.
  void serve();
  // bind() + serve() on a background thread.
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace arena
