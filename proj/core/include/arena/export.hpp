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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/energy.hpp"
#include "arena/language.hpp"
#include "arena/pii.hpp"
#include "arena/store.hpp"
#include "arena/util.hpp"

namespace arena {

inline constexpr int kExportSchemaVersion = 1;
inline constexpr std::string_view kConversationsFile = "conversations.jsonl";
inline constexpr std::string_view kVotesFile = "votes.jsonl";
inline constexpr std::string_view kReactionsFile = "reactions.jsonl";
inline constexpr std::string_view kManifestFile = "manifest.json";

struct ExportConfig {
  std::filesystem::path out_dir;
  TimeWindow window;
  std::string license_notice =
      "Etalab-2.0. Responses from models marked training_allowed=false must not be used to train models.";
  // Defaults to the clock at export time; fix it for reproducible manifests.
  std::optional<Timestamp> generated_at;
};

struct ExportCounts {
  std::int64_t considered = 0;
  std::int64_t conversations = 0;
  std::int64_t votes = 0;
  std::int64_t reactions = 0;
  std::int64_t excluded_pii = 0;
  std::int64_t excluded_takedown = 0;
  std::int64_t excluded_non_consent = 0;

  std::int64_t excluded() const { return excluded_pii + excluded_takedown + excluded_non_consent; }
  double filter_rate() const {
    return considered == 0 ? 0.0 : static_cast<double>(excluded()) / static_cast<double>(considered);
  }
};

struct ExportBundle {
  std::filesystem::path conversations_file;
  std::filesystem::path votes_file;
  std::filesystem::path reactions_file;
  std::filesystem::path manifest_file;
  ExportCounts counts;
  nlohmann::ordered_json manifest;
};

struct ExportContext {
  Store& store;
  const DetectorList& detectors;
  const LanguageDetector& language;
  const EnergyTable& energy;
  Clock clock = system_now;
};

// Writes the three newline-delimited record files plus the manifest.
// Conversations already excluded (PII flag or takedown) are skipped; newly
// flagged ones are recorded as excluded in the store, so exclusion is
// permanent. Votes and reactions of any skipped conversation are dropped.
// Errors: config_error (no detectors), io_error (unwritable destination),
// missing_coefficients.
ExportBundle export_datasets(const ExportContext& ctx, const ExportConfig& config);

// Record encoders (fixed field order).
nlohmann::ordered_json conversation_record(const Conversation& c,
                                           const std::map<ModelId, ModelCard>& models,
                                           const EnergyCoefficients& coeffs, const std::string& language,
                                           const RevealState& reveal);
nlohmann::ordered_json vote_record(const Vote& v, const Pairing& pairing);
nlohmann::ordered_json reaction_record(const Reaction& r, const Pairing& pairing);

// Offline readers for the votes / reactions files, as ranking input.
std::vector<RankingVote> read_votes_file(const std::filesystem::path& path);
std::vector<RankingReaction> read_reactions_file(const std::filesystem::path& path);

struct ScanResult {
  struct Row {
    ConversationId conversation_id;
    PiiVerdict verdict;
  };
  std::vector<Row> rows;
  std::int64_t flagged = 0;
  double flag_rate() const {
    return rows.empty() ? 0.0 : static_cast<double>(flagged) / static_cast<double>(rows.size());
  }
};

// Verdicts for every conversation in the window; writes nothing.
ScanResult scan_store(const Store& store, const DetectorList& detectors, const TimeWindow& window = {});

struct TakedownReceipt {
  ConversationId conversation_id;
  Timestamp taken_down_at{};
};

// Idempotent; a second call returns the original receipt. Error(not_found)
// for unknown ids.
TakedownReceipt takedown(Store& store, const ConversationId& id, Timestamp now);

}  // namespace arena
