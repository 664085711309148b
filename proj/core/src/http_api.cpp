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

#include "arena/http_api.hpp"

#include <httplib.h>

#include "arena/export.hpp"
#include "arena/serialization.hpp"

namespace arena {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::empty_prompt:
    case ErrorCode::prompt_too_long:
      return 400;
    case ErrorCode::unauthorized:
      return 401;
    case ErrorCode::consent_required:
    case ErrorCode::unknown_session:
      return 403;
    case ErrorCode::not_found:
    case ErrorCode::no_snapshot:
      return 404;
    case ErrorCode::duplicate_vote:
    case ErrorCode::vote_after_reveal:
    case ErrorCode::conversation_closed:
    case ErrorCode::turn_in_progress:
    case ErrorCode::no_completed_turn:
    case ErrorCode::feedback_required:
      return 409;
    case ErrorCode::rate_limited:
      return 429;
    case ErrorCode::unknown_provider:
    case ErrorCode::upstream_error:
    case ErrorCode::timeout:
      return 502;
    case ErrorCode::insufficient_models:
      return 503;
    default:
      return 500;
  }
}

nlohmann::json error_body(const Error& e) { return {{"code", to_string(e.code())}, {"message", e.what()}}; }

nlohmann::ordered_json to_json(const PublicModelCard& card) {
  nlohmann::ordered_json j;
  j["model_id"] = card.model_id;
  j["display_name"] = card.display_name;
  j["organisation"] = card.organisation;
  j["license_kind"] = to_string(card.license_kind);
  j["training_allowed"] = card.training_allowed;
  j["active_param_count"] = card.active_param_count;
  j["total_param_count"] = card.total_param_count;
  j["params_estimated"] = card.params_estimated;
  j["metadata_text"] = card.metadata_text;
  return j;
}

nlohmann::ordered_json to_json(const RevealPayload& p) {
  auto side = [](const RevealSide& s) {
    nlohmann::ordered_json j;
    j["model"] = to_json(s.model);
    j["output_tokens"] = s.output_tokens;
    j["energy_kwh"] = s.energy.kwh;
    j["energy_estimated"] = s.energy.estimated;
    return j;
  };
  nlohmann::ordered_json j;
  j["conversation_id"] = p.conversation_id;
  j["vote"] = p.vote ? nlohmann::ordered_json(to_string(*p.vote)) : nlohmann::ordered_json(nullptr);
  j["give_up"] = p.give_up;
  j["a"] = side(p.a);
  j["b"] = side(p.b);
  return j;
}

std::string sse_frame(std::string_view event, const nlohmann::json& data) {
  std::string out = "event: ";
  out.append(event);
  out += "\ndata: ";
  out += data.dump();
  out += "\n\n";
  return out;
}

std::string sse_frame(const SideEvent& ev) {
  nlohmann::json data{{"side", to_string(ev.side)}};
  switch (ev.event.kind) {
    case StreamEvent::Kind::delta:
      data["text"] = ev.event.text_delta;
      break;
    case StreamEvent::Kind::done:
      data["usage"] = ev.output_tokens;
      data["tokens_estimated"] = ev.tokens_estimated;
      break;
    case StreamEvent::Kind::error:
      data["code"] = ev.event.error_code;
      data["usage"] = ev.output_tokens;
      data["tokens_estimated"] = ev.tokens_estimated;
      break;
  }
  return sse_frame(to_string(ev.event.kind), data);
}

struct HttpApi::Impl {
  ArenaService& service;
  HttpOptions options;
  RateLimiter limiter;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  Impl(ArenaService& s, HttpOptions o)
      : service(s), options(std::move(o)), limiter(options.rate_limit_requests, options.rate_limit_window) {
    // The library default adds SO_REUSEPORT, which would let a second
    // instance share an already bound port instead of failing.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
  }

  static void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, const Error& e) {
    res.status = http_status(e.code());
    res.set_content(error_body(e).dump(), "application/json");
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
    return j;
  }

  void limit(const httplib::Request& req, const std::string& scope) {
    if (!limiter.allow(req.remote_addr + "|" + scope, service.now())) {
      throw Error(ErrorCode::rate_limited, "too many requests");
    }
  }

  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const nlohmann::json::exception& e) {
        send_error(res, Error(ErrorCode::invalid_argument, e.what()));
      } catch (const std::exception& e) {
        send_error(res, Error(ErrorCode::storage_error, e.what()));
      }
    };
  }

  void stream_turn(httplib::Response& res, std::unique_ptr<TurnStream> turn) {
    struct Cursor {
      std::shared_ptr<TurnStream> turn;
      bool sent_header = false;
      bool finished = false;
    };
    auto cursor = std::make_shared<Cursor>(Cursor{std::shared_ptr<TurnStream>(std::move(turn))});
    res.status = 200;
    res.set_header("Cache-Control", "no-cache");
    res.set_header("X-Accel-Buffering", "no");
    res.set_chunked_content_provider("text/event-stream", [cursor](std::size_t, httplib::DataSink& sink) {
      std::string frame;
      if (!cursor->sent_header) {
        cursor->sent_header = true;
        frame = sse_frame("conversation", {{"conversation_id", cursor->turn->conversation_id()},
                                           {"turn_index", cursor->turn->turn_index()}});
      } else if (auto ev = cursor->turn->next()) {
        frame = sse_frame(*ev);
      } else {
        frame = sse_frame("end", nlohmann::json::object());
        cursor->finished = true;
      }
      if (!sink.write(frame.data(), frame.size())) return false;
      if (cursor->finished) sink.done();
      return true;
    });
  }

  void routes() {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      limit(req, "sessions");
      const auto body = parse_body(req);
      std::optional<bool> consent;
      if (auto it = body.find("consent"); it != body.end() && it->is_boolean()) consent = it->get<bool>();
      const auto id = service.create_session(consent);
      send_json(res, 201, {{"session_id", id}});
    }));

    server.Post("/api/conversations", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto session = body.value("session_id", std::string{});
      limit(req, session);
      stream_turn(res, service.start_conversation(session, body.value("prompt", std::string{})));
    }));

    server.Post(R"(/api/conversations/([0-9a-zA-Z_-]+)/messages)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  limit(req, req.matches[1]);
                  const auto body = parse_body(req);
                  stream_turn(res, service.continue_conversation(req.matches[1], body.value("prompt", std::string{})));
                }));

    server.Post(R"(/api/conversations/([0-9a-zA-Z_-]+)/reactions)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  limit(req, req.matches[1]);
                  const auto body = parse_body(req);
                  ReactionRequest r;
                  r.conversation_id = req.matches[1];
                  r.turn_index = body.at("turn_index").get<int>();
                  r.side = parse_side(body.at("side").get<std::string>());
                  r.polarity = parse_polarity(body.at("polarity").get<std::string>());
                  if (auto it = body.find("qualifiers"); it != body.end()) {
                    for (const auto& q : *it) r.qualifiers.insert(parse_qualifier(q.get<std::string>()));
                  }
                  service.react(r);
                  send_json(res, 200, {{"ok", true}});
                }));

    server.Post(R"(/api/conversations/([0-9a-zA-Z_-]+)/vote)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  limit(req, req.matches[1]);
                  const auto body = parse_body(req);
                  service.vote(req.matches[1], parse_vote_choice(body.at("choice").get<std::string>()));
                  send_json(res, 200, {{"ok", true}});
                }));

    server.Post(R"(/api/conversations/([0-9a-zA-Z_-]+)/reveal)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  limit(req, req.matches[1]);
                  const auto body = parse_body(req);
                  send_json(res, 200, to_json(service.reveal(req.matches[1], body.value("give_up", false))));
                }));

    server.Get("/api/leaderboard", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, to_json(*service.get_leaderboard()));
    }));

    server.Get("/api/models", guarded([this](const httplib::Request&, httplib::Response& res) {
      auto list = nlohmann::ordered_json::array();
      for (const auto& card : service.public_models()) list.push_back(to_json(card));
      send_json(res, 200, list);
    }));

    server.Get("/api/suggestions", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, service.suggestions());
    }));

    server.Post(R"(/api/admin/takedown/([0-9a-zA-Z_-]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  if (options.admin_token.empty() ||
                      req.get_header_value("Authorization") != "Bearer " + options.admin_token) {
                    throw Error(ErrorCode::unauthorized, "admin token required");
                  }
                  const auto receipt = takedown(service.store(), req.matches[1], service.now());
                  send_json(res, 200, {{"conversation_id", receipt.conversation_id},
                                       {"taken_down_at", format_timestamp(receipt.taken_down_at)}});
                }));
  }
};

HttpApi::HttpApi(ArenaService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind() {
  if (impl_->options.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(impl_->options.host);
    if (impl_->port < 0) throw Error(ErrorCode::io_error, "cannot bind " + impl_->options.host);
  } else {
    if (!impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) {
      throw Error(ErrorCode::io_error, "cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
    }
    impl_->port = impl_->options.port;
  }
  return impl_->port;
}

void HttpApi::serve() { impl_->server.listen_after_bind(); }

int HttpApi::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpApi::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace arena
