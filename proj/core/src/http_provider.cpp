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

#include "arena/http_provider.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "arena/error.hpp"

namespace arena {

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::invalid_config, "base_url must include a scheme: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? std::string{} : url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {origin, path};
}

}  // namespace

OpenAiCompatibleProvider::OpenAiCompatibleProvider(std::string base_url, std::string api_key)
    : api_key_(std::move(api_key)) {
  std::tie(origin_, base_path_) = split_url(base_url);
}

std::string OpenAiCompatibleProvider::request_body(const CompletionRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model_name;
  auto& messages = body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  body["stream"] = true;
  body["stream_options"] = {{"include_usage", true}};
  if (request.params.temperature) body["temperature"] = *request.params.temperature;
  if (request.params.max_tokens) body["max_tokens"] = *request.params.max_tokens;
  return body.dump();
}

void ChatCompletionSseParser::feed(std::string_view chunk) {
  buffer_.append(chunk);
  std::size_t pos;
  while ((pos = buffer_.find('\n')) != std::string::npos) {
    std::string line = buffer_.substr(0, pos);
    buffer_.erase(0, pos + 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    handle_line(line);
  }
}

void ChatCompletionSseParser::finish() {
  if (!buffer_.empty()) {
    handle_line(buffer_);
    buffer_.clear();
  }
}

void ChatCompletionSseParser::handle_line(std::string_view line) {
  if (result_.done || line.substr(0, 5) != "data:") return;
  line.remove_prefix(5);
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  if (line == "[DONE]") {
    result_.done = true;
    return;
  }
  const auto payload = nlohmann::json::parse(line, nullptr, false);
  if (payload.is_discarded()) {
    result_.malformed = true;
    return;
  }
  if (payload.contains("error")) {
    result_.error_message = payload["error"].dump();
    return;
  }
  if (auto it = payload.find("choices"); it != payload.end() && it->is_array()) {
    for (const auto& choice : *it) {
      const auto delta = choice.find("delta");
      if (delta == choice.end() || !delta->is_object()) continue;
      const auto content = delta->find("content");
      if (content != delta->end() && content->is_string()) {
        on_delta_(content->get_ref<const std::string&>());
      }
    }
  }
  if (auto it = payload.find("usage"); it != payload.end() && it->is_object()) {
    if (auto tokens = it->find("completion_tokens"); tokens != it->end() && tokens->is_number_integer()) {
      result_.usage = tokens->get<std::int64_t>();
    }
  }
}

AttemptOutcome OpenAiCompatibleProvider::attempt(const CompletionRequest& request, const DeltaSink& on_delta,
                                                 Deadline deadline) {
  using Status = AttemptOutcome::Status;
  const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  if (remaining.count() <= 0) return {Status::timed_out, std::nullopt, "deadline"};

  httplib::Client client(origin_);
  client.set_connection_timeout(remaining);
  client.set_read_timeout(remaining);
  client.set_write_timeout(remaining);

  httplib::Headers headers{{"Accept", "text/event-stream"}};
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  bool emitted = false;
  bool deadline_hit = false;
  ChatCompletionSseParser parser([&](std::string_view piece) {
    emitted = emitted || !piece.empty();
    on_delta(piece);
  });

  int status = 0;
  std::string error_body;
  httplib::Request req;
  req.method = "POST";
  req.path = base_path_ + "/chat/completions";
  req.headers = headers;
  req.body = request_body(request);
  req.set_header("Content-Type", "application/json");
  req.response_handler = [&](const httplib::Response& response) {
    status = response.status;
    return true;
  };
  req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
    if (std::chrono::steady_clock::now() >= deadline) {
      deadline_hit = true;
      return false;
    }
    if (status != 200) {
      error_body.append(data, len);
      return error_body.size() < 64 * 1024;
    }
    parser.feed(std::string_view(data, len));
    return !parser.result().done;
  };

  httplib::Response response;
  httplib::Error err = httplib::Error::Success;
  const bool sent = client.send(req, response, err);
  parser.finish();

  if (deadline_hit || std::chrono::steady_clock::now() >= deadline) {
    return {Status::timed_out, std::nullopt, "deadline"};
  }
  if (!sent && !parser.result().done) {
    if (err == httplib::Error::Read && std::chrono::steady_clock::now() >= deadline) {
      return {Status::timed_out, std::nullopt, "read timeout"};
    }
    const Status s = emitted ? Status::fatal_failure : Status::transient_failure;
    return {s, std::nullopt, httplib::to_string(err)};
  }
  if (status != 200) {
    const bool retryable = status == 408 || status == 429 || status >= 500;
    return {retryable ? Status::transient_failure : Status::fatal_failure, std::nullopt,
            "HTTP " + std::to_string(status)};
  }
  const auto& result = parser.result();
  if (!result.error_message.empty()) {
    return {emitted ? Status::fatal_failure : Status::transient_failure, std::nullopt, result.error_message};
  }
  if (!result.done) {
    return {emitted ? Status::fatal_failure : Status::transient_failure, std::nullopt, "stream ended early"};
  }
  return {Status::ok, result.usage, {}};
}

}  // namespace arena
