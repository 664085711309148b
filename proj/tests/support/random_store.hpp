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

#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/pii.hpp"
#include "arena/store.hpp"
#include "fixtures.hpp"

namespace arena::testing {

// Texts with no digits, no '@' and no street vocabulary, so that no
// baseline detector can fire on them.
inline const std::vector<std::string>& clean_phrases() {
  static const std::vector<std::string> v = {
      "Bonjour, peux-tu m'expliquer la photosynthèse ?",
      "Quelle est la différence entre une loi et un décret ?",
      "Write a short poem about autumn leaves.",
      "Explique le fonctionnement d'un moteur électrique.",
      "Voici une réponse détaillée et nuancée.",
      "The answer depends on several factors.",
      "Je ne suis pas certain, mais voici une piste.",
  };
  return v;
}

inline const std::vector<std::string>& pii_phrases() {
  static const std::vector<std::string> v = {
      "écris à jean.dupont@example.com",
      "mon numéro est +33 6 12 34 56 78",
      "appelle le 06 12 34 56 78 demain",
      "IBAN FR76 3000 6000 0112 3456 7890 189",
      "j'habite au 12 rue des Lilas",
  };
  return v;
}

// Marker that makes FlakyDetector throw.
inline constexpr std::string_view kFlakyMarker = "[[judge-offline]]";

// Stand-in for an unreachable remote detector.
class FlakyDetector final : public PiiDetector {
 public:
  std::string id() const override { return "flaky_judge"; }
  std::string failure_label() const override { return "judge_unavailable"; }
  std::set<PiiCategory> inspect(const Conversation& c) const override {
    for (const auto& t : c.turns)
      if (t.user_text.find(kFlakyMarker) != std::string::npos) throw std::runtime_error("judge offline");
    return {};
  }
};

struct GeneratedStore {
  std::set<ConversationId> all;
  std::set<ConversationId> with_pii;     // must be excluded by detectors
  std::set<ConversationId> detector_errors;  // must be excluded fail-closed
  std::set<ConversationId> taken_down;
  std::set<ConversationId> expected_clean() const {
    std::set<ConversationId> out;
    for (const auto& id : all)
      if (!with_pii.count(id) && !detector_errors.count(id) && !taken_down.count(id)) out.insert(id);
    return out;
  }
};

// Adds a random batch of conversations, votes, reactions, reveals and
// takedowns. Call repeatedly to grow a store.
inline void populate_random_store(Store& store, std::mt19937_64& rng, GeneratedStore& g, int batch) {
  auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  if (store.list_models().empty()) {
    for (int i = 1; i <= 4; ++i) store.upsert_model(make_card("model" + std::to_string(i)));
  }
  const auto models = store.list_models();
  const std::string session = "sess" + std::to_string(batch);
  store.put_session({session, true, at_ms(batch * 100000)});

  const int n = 1 + static_cast<int>(rng() % 10);
  for (int k = 0; k < n; ++k) {
    Conversation c;
    c.conversation_id = "b" + std::to_string(batch) + "c" + std::to_string(k);
    c.session_id = session;
    const std::size_t i = rng() % models.size();
    std::size_t j = rng() % models.size();
    while (j == i) j = rng() % models.size();
    c.pairing = {models[i].model_id, models[j].model_id};
    c.created_at = at_ms(batch * 100000 + k * 100);
    bool pii = false;
    bool flaky = false;
    const int turns = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < turns; ++t) {
      Turn turn;
      turn.turn_index = t;
      turn.user_text = pick(clean_phrases());
      if (coin(0.15)) {
        turn.user_text += " " + pick(pii_phrases());
        pii = true;
      }
      if (coin(0.05)) {
        turn.user_text += std::string(" ") + std::string(kFlakyMarker);
        flaky = true;
      }
      for (Side s : {Side::a, Side::b}) {
        if (!coin(0.9)) continue;
        std::string text = pick(clean_phrases());
        if (coin(0.05)) {
          text += " " + pick(pii_phrases());
          pii = true;
        }
        turn.assistant(s) = AssistantMessage{text, 1 + static_cast<std::int64_t>(rng() % 400), coin(0.2),
                                             static_cast<std::int64_t>(rng() % 3000), FinishReason::stop};
      }
      c.turns.push_back(std::move(turn));
    }
    store.put_conversation(c);
    g.all.insert(c.conversation_id);
    if (pii) g.with_pii.insert(c.conversation_id);
    if (flaky) g.detector_errors.insert(c.conversation_id);

    for (const auto& turn : c.turns) {
      for (Side s : {Side::a, Side::b}) {
        if (turn.assistant(s) && coin(0.4)) {
          std::set<Qualifier> q;
          if (coin(0.5)) q.insert(static_cast<Qualifier>(rng() % 7));
          store.put_reaction({c.conversation_id, turn.turn_index, s, coin(0.5) ? Polarity::positive : Polarity::negative,
                              q, c.created_at + std::chrono::milliseconds(10 + turn.turn_index)});
        }
      }
    }
    if (coin(0.6)) store.put_vote({c.conversation_id, static_cast<VoteChoice>(rng() % 4), c.created_at + std::chrono::milliseconds(50)});
    if (coin(0.5)) store.mark_revealed(c.conversation_id, c.created_at + std::chrono::milliseconds(60), coin(0.3));
  }
  // Take down a few conversations, old or new.
  std::vector<ConversationId> ids(g.all.begin(), g.all.end());
  for (int t = static_cast<int>(rng() % 3); t > 0; --t) {
    const auto& id = ids[rng() % ids.size()];
    store.exclude(id, ExclusionReason::takedown, at_ms(batch * 100000 + 99999), "");
    g.taken_down.insert(id);
  }
}

inline std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace arena::testing
