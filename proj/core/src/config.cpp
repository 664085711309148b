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

#include "arena/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "arena/http_provider.hpp"
#include "arena/mock_provider.hpp"
#include "arena/serialization.hpp"

namespace arena {
namespace {

using nlohmann::json;

template <typename T>
T get(const json& j, const char* key, T fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::invalid_config, where + "." + key + " has the wrong type");
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  auto it = root.find(key);
  if (it == root.end() || it->is_null()) return empty;
  if (!it->is_object()) throw Error(ErrorCode::invalid_config, std::string(key) + " must be an object");
  return *it;
}

ProviderConfig parse_provider(const json& j, std::size_t index) {
  const std::string where = "providers[" + std::to_string(index) + "]";
  if (!j.is_object()) throw Error(ErrorCode::invalid_config, where + " must be an object");
  ProviderConfig p;
  p.provider_id = get<std::string>(j, "provider_id", "", where);
  if (p.provider_id.empty()) throw Error(ErrorCode::invalid_config, where + ".provider_id is required");
  p.kind = get<std::string>(j, "kind", p.kind, where);
  if (p.kind != "openai_compatible" && p.kind != "mock") {
    throw Error(ErrorCode::invalid_config, where + ".kind must be openai_compatible or mock");
  }
  p.base_url = get<std::string>(j, "base_url", "", where);
  if (p.kind == "openai_compatible" && p.base_url.empty()) {
    throw Error(ErrorCode::invalid_config, where + ".base_url is required");
  }
  p.api_key_env = get<std::string>(j, "api_key_env", "", where);
  p.timeout_ms = get<int>(j, "timeout_ms", p.timeout_ms, where);
  p.max_retries = get<int>(j, "max_retries", p.max_retries, where);
  validate(p);
  return p;
}

EnergyTable parse_energy(const json& j) {
  if (j.empty()) return EnergyTable::placeholder();
  std::map<std::string, EnergyCoefficients> sources;
  const json& src = section(j, "sources");
  for (const auto& [name, c] : src.items()) {
    const std::string where = "energy.sources." + name;
    EnergyCoefficients coeffs;
    coeffs.alpha = get<double>(c, "alpha", 0.0, where);
    coeffs.beta = get<double>(c, "beta", 0.0, where);
    coeffs.source_label = get<std::string>(c, "label", name, where);
    if (coeffs.alpha < 0 || coeffs.beta < 0) throw Error(ErrorCode::invalid_config, where + " coefficients must be >= 0");
    sources.emplace(name, coeffs);
  }
  auto selected = get<std::string>(j, "selected", sources.empty() ? "" : sources.begin()->first, "energy");
  if (sources.empty()) return EnergyTable::placeholder();
  if (!sources.count(selected)) throw Error(ErrorCode::invalid_config, "energy.selected names an unknown source");
  return EnergyTable(std::move(sources), std::move(selected));
}

RankingConfig parse_ranking(const json& j) {
  RankingConfig r;
  r.weights.vote_w = get<double>(j, "vote_weight", r.weights.vote_w, "ranking");
  r.weights.reaction_w = get<double>(j, "reaction_weight", r.weights.reaction_w, "ranking");
  r.lambda = get<double>(j, "lambda", r.lambda, "ranking");
  r.bootstrap_rounds = get<int>(j, "bootstrap_rounds", r.bootstrap_rounds, "ranking");
  r.seed = get<std::uint64_t>(j, "seed", r.seed, "ranking");
  r.fit.tol = get<double>(j, "tol", r.fit.tol, "ranking");
  r.fit.max_iter = get<int>(j, "max_iter", r.fit.max_iter, "ranking");
  r.fit.per_component = get<bool>(j, "per_component", r.fit.per_component, "ranking");
  if (r.weights.vote_w < 0 || r.weights.reaction_w < 0 || r.lambda < 0) {
    throw Error(ErrorCode::invalid_config, "ranking weights and lambda must be >= 0");
  }
  if (r.bootstrap_rounds < 50) throw Error(ErrorCode::invalid_config, "ranking.bootstrap_rounds must be >= 50");
  return r;
}

}  // namespace

PlatformConfig parse_config(std::string_view text) {
  json root = json::parse(text, nullptr, false, /*ignore_comments=*/true);
  if (root.is_discarded()) throw Error(ErrorCode::invalid_config, "configuration is not valid JSON");
  if (!root.is_object()) throw Error(ErrorCode::invalid_config, "configuration must be a JSON object");

  PlatformConfig cfg;
  cfg.store_path = get<std::string>(root, "store_path", cfg.store_path, "config");
  cfg.system_prompt = get<std::string>(root, "system_prompt", "", "config");
  cfg.license_notice = get<std::string>(root, "license_notice", "", "config");
  cfg.admin_token_env = get<std::string>(root, "admin_token_env", cfg.admin_token_env, "config");

  const json& listen = section(root, "listen");
  cfg.http.host = get<std::string>(listen, "host", cfg.http.host, "listen");
  cfg.http.port = get<int>(listen, "port", cfg.http.port, "listen");
  if (cfg.http.port < 0 || cfg.http.port > 65535) throw Error(ErrorCode::invalid_config, "listen.port out of range");

  const json& limits = section(root, "rate_limit");
  cfg.http.rate_limit_requests = get<int>(limits, "requests", cfg.http.rate_limit_requests, "rate_limit");
  cfg.http.rate_limit_window =
      std::chrono::milliseconds(get<std::int64_t>(limits, "window_ms", cfg.http.rate_limit_window.count(), "rate_limit"));
  if (cfg.http.rate_limit_requests < 1 || cfg.http.rate_limit_window.count() < 1) {
    throw Error(ErrorCode::invalid_config, "rate_limit values must be positive");
  }

  if (auto it = root.find("providers"); it != root.end()) {
    if (!it->is_array()) throw Error(ErrorCode::invalid_config, "providers must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) cfg.providers.push_back(parse_provider((*it)[i], i));
  }

  if (auto it = root.find("models"); it != root.end()) {
    if (!it->is_array()) throw Error(ErrorCode::invalid_config, "models must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      try {
        auto card = (*it)[i].get<ModelCard>();
        if (auto problems = validate_model_card(card); !problems.empty()) {
          throw Error(ErrorCode::invalid_config, "models[" + std::to_string(i) + "]: " + problems.front());
        }
        cfg.models.push_back(std::move(card));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, "models[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }

  cfg.energy = parse_energy(section(root, "energy"));

  const json& pairing = section(root, "pairing");
  cfg.pairing.mode = parse_pairing_mode(get<std::string>(pairing, "mode", "uniform", "pairing"));
  if (auto it = pairing.find("seed"); it != pairing.end() && !it->is_null()) {
    cfg.pairing.rng_seed = get<std::uint64_t>(pairing, "seed", 0, "pairing");
  }

  cfg.service.ranking = parse_ranking(section(root, "ranking"));
  const json& service = section(root, "service");
  cfg.service.max_prompt_chars = get<std::size_t>(service, "max_prompt_chars", cfg.service.max_prompt_chars, "service");
  cfg.service.session_ttl = std::chrono::milliseconds(
      get<std::int64_t>(service, "session_ttl_ms", cfg.service.session_ttl.count(), "service"));
  cfg.service.leaderboard_interval = std::chrono::milliseconds(
      get<std::int64_t>(service, "leaderboard_interval_ms", cfg.service.leaderboard_interval.count(), "service"));
  if (service.contains("temperature")) {
    cfg.service.generation.temperature = get<double>(service, "temperature", 0.0, "service");
  }
  if (service.contains("max_tokens")) {
    cfg.service.generation.max_tokens = get<int>(service, "max_tokens", 0, "service");
  }
  cfg.service.suggestions = get<std::vector<std::string>>(root, "suggestions", {}, "config");

  if (auto it = root.find("pii_judge"); it != root.end() && !it->is_null()) {
    try {
      cfg.pii_judge = it->get<ProviderRoute>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_config, std::string("pii_judge: ") + e.what());
    }
  }
  return cfg;
}

PlatformConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_config, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

BuiltGateway build_gateway(const PlatformConfig& cfg, const EnvLookup& env) {
  BuiltGateway out{std::make_shared<Gateway>(cfg.system_prompt), {}};
  for (const auto& p : cfg.providers) {
    if (p.kind == "mock") {
      out.gateway->add_provider(p, std::make_shared<MockProvider>());
      continue;
    }
    std::string key;
    if (!p.api_key_env.empty()) {
      auto value = env(p.api_key_env);
      if (!value) {
        out.warnings.push_back("provider " + p.provider_id + " disabled: " + p.api_key_env + " is not set");
        continue;
      }
      key = *value;
    }
    out.gateway->add_provider(p, std::make_shared<OpenAiCompatibleProvider>(p.base_url, key));
  }
  for (const auto& m : cfg.models) {
    if (!out.gateway->has_provider(m.provider_route.provider_id)) {
      out.warnings.push_back("model " + m.model_id + " has no available provider and will not be paired");
    }
  }
  return out;
}

void seed_models(Store& store, const PlatformConfig& cfg) {
  for (auto m : cfg.models) {
    // An operator's enable/disable through the CLI outlives restarts.
    if (const auto existing = store.get_model(m.model_id)) m.enabled = existing->enabled;
    store.upsert_model(m);
  }
}

DetectorList build_detectors(const PlatformConfig& cfg, std::shared_ptr<const Gateway> gateway) {
  DetectorList list = baseline_detectors();
  if (cfg.pii_judge) {
    list.push_back(std::make_shared<LlmJudgeDetector>(make_gateway_judge(std::move(gateway), *cfg.pii_judge)));
  }
  return list;
}

}  // namespace arena
