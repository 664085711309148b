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

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arena/domain.hpp"
#include "arena/energy.hpp"
#include "arena/gateway.hpp"
#include "arena/http_api.hpp"
#include "arena/pairing.hpp"
#include "arena/pii.hpp"
#include "arena/ranking.hpp"
#include "arena/service.hpp"
#include "arena/store.hpp"

namespace arena {

// Operator configuration, read from a JSON document (comments allowed).
// Every key is optional; see config/arena.example.json.
struct PlatformConfig {
  std::string store_path = "arena.db";
  HttpOptions http;
  std::string admin_token_env = "ARENA_ADMIN_TOKEN";
  std::string system_prompt;
  std::vector<ProviderConfig> providers;
  std::vector<ModelCard> models;
  EnergyTable energy = EnergyTable::placeholder();
  PairingPolicy pairing;
  ServiceOptions service;
  std::optional<ProviderRoute> pii_judge;
  std::string license_notice;
};

// Throws Error(invalid_config) naming the offending key.
PlatformConfig parse_config(std::string_view text);
PlatformConfig load_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

struct BuiltGateway {
  std::shared_ptr<Gateway> gateway;
  // One line per provider left out, e.g. a missing credential variable.
  std::vector<std::string> warnings;
};

// Instantiates every configured provider. A provider whose credential
// variable is unset is skipped with a warning; "mock" providers need none.
BuiltGateway build_gateway(const PlatformConfig& cfg, const EnvLookup& env = process_env);

// Inserts or updates the configured model cards, keeping the stored
// enabled flag of cards that already exist.
void seed_models(Store& store, const PlatformConfig& cfg);

// Baseline pattern detectors, plus the LLM judge when one is configured.
DetectorList build_detectors(const PlatformConfig& cfg, std::shared_ptr<const Gateway> gateway);

}  // namespace arena
