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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "arena/gateway.hpp"
#include "arena/mock_provider.hpp"
#include "arena/service.hpp"
#include "arena/store.hpp"
#include "arena/util.hpp"

namespace arena::testing {

// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("arena-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + random_id(4));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline ModelCard make_card(const std::string& id, const std::string& provider = "mock") {
  ModelCard m;
  m.model_id = id;
  m.display_name = id + " display";
  m.organisation = id + " org";
  m.active_param_count = 7;
  m.total_param_count = 7;
  m.provider_route = {provider, id + "-route"};
  return m;
}

inline Timestamp at_ms(std::int64_t ms) { return from_millis(1'700'000'000'000 + ms); }

// Deterministic clock advancing 1 ms per reading.
class StepClock {
 public:
  explicit StepClock(Timestamp start = at_ms(0)) : now_(std::make_shared<std::atomic<std::int64_t>>(to_millis(start))) {}
  Clock clock() const {
    auto now = now_;
    return [now] { return from_millis(now->fetch_add(1)); };
  }
  void advance(std::chrono::milliseconds d) { now_->fetch_add(d.count()); }

 private:
  std::shared_ptr<std::atomic<std::int64_t>> now_;
};

// Store + mock gateway + service wired together for end-to-end tests.
struct MockArena {
  TempDir dir;
  std::shared_ptr<Store> store;
  std::shared_ptr<MockProvider> mock;
  std::shared_ptr<Gateway> gateway;
  std::unique_ptr<ArenaService> service;
  std::vector<ModelCard> cards;

  explicit MockArena(std::vector<ModelCard> models, ServiceOptions options = {}, PairingPolicy pairing = {{}, 42},
                     Clock clock = system_now, std::string system_prompt = "You are a helpful assistant.")
      : store(open_sqlite_store(dir / "arena.db")),
        mock(std::make_shared<MockProvider>()),
        gateway(std::make_shared<Gateway>(std::move(system_prompt))),
        cards(std::move(models)) {
    ProviderConfig cfg;
    cfg.provider_id = "mock";
    cfg.kind = "mock";
    cfg.timeout_ms = 5000;
    gateway->add_provider(cfg, mock);
    for (const auto& c : cards) store->upsert_model(c);
    service = std::make_unique<ArenaService>(store, gateway, pairing, EnergyTable::placeholder(), std::move(options),
                                             std::move(clock));
  }

  static MockArena with_models(int n) {
    std::vector<ModelCard> cards;
    for (int i = 0; i < n; ++i) cards.push_back(make_card("m" + std::to_string(i + 1)));
    return MockArena(std::move(cards));
  }
};

}  // namespace arena::testing
