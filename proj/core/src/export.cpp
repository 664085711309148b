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

#include "arena/export.hpp"

#include <fstream>
#include <set>

#include "arena/error.hpp"
#include "arena/serialization.hpp"

namespace arena {

namespace {

using ojson = nlohmann::ordered_json;

ojson model_summary(const ModelCard& card) {
  ojson j;
  j["model_id"] = card.model_id;
  j["organisation"] = card.organisation;
  j["license_kind"] = to_string(card.license_kind);
  j["training_allowed"] = card.training_allowed;
  j["active_param_count"] = card.active_param_count;
  j["total_param_count"] = card.total_param_count;
  j["params_estimated"] = card.params_estimated;
  return j;
}

const ModelCard& card_for(const std::map<ModelId, ModelCard>& models, const ModelId& id) {
  auto it = models.find(id);
  if (it == models.end()) throw Error(ErrorCode::referential_violation, "conversation references unknown model '" + id + "'");
  return it->second;
}

class LineWriter {
 public:
  explicit LineWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  }
  void write(const ojson& record) {
    out_ << record.dump() << '\n';
    ++lines_;
  }
  std::int64_t lines() const { return lines_; }
  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::io_error, "write failed for '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::int64_t lines_ = 0;
};

}  // namespace

ojson conversation_record(const Conversation& c, const std::map<ModelId, ModelCard>& models,
                          const EnergyCoefficients& coeffs, const std::string& language, const RevealState& reveal) {
  const ModelCard& card_a = card_for(models, c.pairing.model_a);
  const ModelCard& card_b = card_for(models, c.pairing.model_b);

  EnergyEstimate total_a, total_b;
  std::int64_t tokens_a = 0, tokens_b = 0;
  ojson turns = ojson::array();
  for (const auto& t : c.turns) {
    ojson turn;
    turn["turn_index"] = t.turn_index;
    turn["user_text"] = t.user_text;
    for (Side side : {Side::a, Side::b}) {
      const auto key = side == Side::a ? "assistant_a" : "assistant_b";
      const auto& msg = t.assistant(side);
      if (!msg) {
        turn[key] = nullptr;
        continue;
      }
      const auto e = estimate(*msg, side == Side::a ? card_a : card_b, coeffs);
      ojson m = *msg;
      m["energy_kwh"] = e.kwh;
      m["energy_estimated"] = e.estimated;
      turn[key] = std::move(m);
      (side == Side::a ? total_a : total_b) += e;
      (side == Side::a ? tokens_a : tokens_b) += msg->output_tokens;
    }
    turns.push_back(std::move(turn));
  }

  ojson j;
  j["conversation_id"] = c.conversation_id;
  j["created_at"] = format_timestamp(c.created_at);
  j["language"] = language;
  j["model_a"] = c.pairing.model_a;
  j["model_b"] = c.pairing.model_b;
  j["model_a_info"] = model_summary(card_a);
  j["model_b_info"] = model_summary(card_b);
  j["revealed"] = reveal.revealed;
  j["give_up"] = reveal.give_up;
  j["voted"] = c.voted;
  j["turns"] = std::move(turns);
  j["total_output_tokens_a"] = tokens_a;
  j["total_output_tokens_b"] = tokens_b;
  j["energy_kwh_a"] = total_a.kwh;
  j["energy_kwh_b"] = total_b.kwh;
  j["energy_estimated"] = total_a.estimated || total_b.estimated;
  j["energy_source"] = coeffs.source_label;
  return j;
}

ojson vote_record(const Vote& v, const Pairing& pairing) {
  ojson j;
  j["conversation_id"] = v.conversation_id;
  j["model_a"] = pairing.model_a;
  j["model_b"] = pairing.model_b;
  j["choice"] = to_string(v.choice);
  j["cast_at"] = format_timestamp(v.cast_at);
  return j;
}

ojson reaction_record(const Reaction& r, const Pairing& pairing) {
  ojson j;
  j["conversation_id"] = r.conversation_id;
  j["model_a"] = pairing.model_a;
  j["model_b"] = pairing.model_b;
  j["turn_index"] = r.turn_index;
  j["side"] = to_string(r.side);
  j["model_id"] = pairing.model(r.side);
  j["polarity"] = to_string(r.polarity);
  ojson quals = ojson::array();
  for (auto q : r.qualifiers) quals.push_back(to_string(q));
  j["qualifiers"] = std::move(quals);
  j["cast_at"] = format_timestamp(r.cast_at);
  return j;
}

ExportBundle export_datasets(const ExportContext& ctx, const ExportConfig& config) {
  if (ctx.detectors.empty()) throw Error(ErrorCode::config_error, "no PII detectors configured");
  const EnergyCoefficients& coeffs = ctx.energy.selected();

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec || !std::filesystem::is_directory(config.out_dir)) {
    throw Error(ErrorCode::io_error, "cannot create output directory '" + config.out_dir.string() + "'");
  }

  ExportBundle bundle;
  bundle.conversations_file = config.out_dir / kConversationsFile;
  bundle.votes_file = config.out_dir / kVotesFile;
  bundle.reactions_file = config.out_dir / kReactionsFile;
  bundle.manifest_file = config.out_dir / kManifestFile;

  std::map<ModelId, ModelCard> models;
  for (auto& card : ctx.store.list_models()) models.emplace(card.model_id, std::move(card));

  std::set<ConversationId> pii_excluded, taken_down;
  for (const auto& ex : ctx.store.exclusions()) {
    (ex.reason == ExclusionReason::pii_flagged ? pii_excluded : taken_down).insert(ex.conversation_id);
  }

  LineWriter conversations(bundle.conversations_file);
  LineWriter votes(bundle.votes_file);
  LineWriter reactions(bundle.reactions_file);
  ExportCounts& counts = bundle.counts;

  for (const auto& c : ctx.store.list_conversations(config.window)) {
    ++counts.considered;
    if (taken_down.count(c.conversation_id)) {
      ++counts.excluded_takedown;
      continue;
    }
    if (pii_excluded.count(c.conversation_id)) {
      ++counts.excluded_pii;
      continue;
    }
    const auto session = ctx.store.get_session(c.session_id);
    if (!session || !session->consent) {
      ++counts.excluded_non_consent;
      continue;
    }
    const PiiVerdict verdict = detect_pii(c, ctx.detectors);
    if (verdict.flagged) {
      std::string detail;
      for (const auto& label : verdict.detector_labels) detail += (detail.empty() ? "" : ",") + label;
      ctx.store.exclude(c.conversation_id, ExclusionReason::pii_flagged, ctx.clock(), detail);
      ++counts.excluded_pii;
      continue;
    }

    const auto reveal = ctx.store.reveal_state(c.conversation_id);
    conversations.write(conversation_record(c, models, coeffs, tag_language(c, ctx.language), reveal));
    if (auto v = ctx.store.get_vote(c.conversation_id)) votes.write(vote_record(*v, c.pairing));
    for (const auto& r : ctx.store.reactions_for(c.conversation_id)) reactions.write(reaction_record(r, c.pairing));
  }
  conversations.close();
  votes.close();
  reactions.close();
  counts.conversations = conversations.lines();
  counts.votes = votes.lines();
  counts.reactions = reactions.lines();

  ojson manifest;
  manifest["schema_version"] = kExportSchemaVersion;
  manifest["generated_at"] = format_timestamp(config.generated_at.value_or(ctx.clock()));
  manifest["license_notice"] = config.license_notice;
  manifest["files"] = {
      {"conversations", {{"path", kConversationsFile}, {"records", counts.conversations}}},
      {"votes", {{"path", kVotesFile}, {"records", counts.votes}}},
      {"reactions", {{"path", kReactionsFile}, {"records", counts.reactions}}},
  };
  manifest["window"] = {
      {"since", config.window.since ? ojson(format_timestamp(*config.window.since)) : ojson(nullptr)},
      {"until", config.window.until ? ojson(format_timestamp(*config.window.until)) : ojson(nullptr)},
  };
  manifest["conversations_considered"] = counts.considered;
  manifest["excluded"] = {
      {"pii_flagged", counts.excluded_pii},
      {"takedown", counts.excluded_takedown},
      {"non_consent", counts.excluded_non_consent},
  };
  manifest["filter_rate"] = counts.filter_rate();
  ojson detector_ids = ojson::array();
  for (const auto& d : ctx.detectors) detector_ids.push_back(d->id());
  manifest["pii_detectors"] = std::move(detector_ids);
  manifest["energy_source"] = coeffs.source_label;
  manifest["reaction_qualifier_taxonomy"] = "local convention: useful, complete, creative, clear_format, "
                                            "incorrect, superficial, instructions_ignored";
  manifest["tie_handling"] = "tie and both_bad are distinct labels in votes.jsonl";
  bundle.manifest = manifest;

  std::ofstream out(bundle.manifest_file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + bundle.manifest_file.string() + "'");
  out << manifest.dump(2) << '\n';
  out.close();
  if (!out) throw Error(ErrorCode::io_error, "write failed for '" + bundle.manifest_file.string() + "'");
  return bundle;
}

namespace {

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::invalid_argument, path.string() + ":" + std::to_string(line_no) + ": malformed record");
    }
    try {
      fn(j);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::invalid_argument, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<RankingVote> read_votes_file(const std::filesystem::path& path) {
  std::vector<RankingVote> out;
  for_each_line(path, [&](const nlohmann::json& j) {
    out.push_back({j.at("conversation_id").get<std::string>(), j.at("model_a").get<std::string>(),
                   j.at("model_b").get<std::string>(), parse_vote_choice(j.at("choice").get<std::string>()),
                   parse_timestamp(j.at("cast_at").get<std::string>())});
  });
  return out;
}

std::vector<RankingReaction> read_reactions_file(const std::filesystem::path& path) {
  std::vector<RankingReaction> out;
  for_each_line(path, [&](const nlohmann::json& j) {
    out.push_back({j.at("conversation_id").get<std::string>(), j.at("model_a").get<std::string>(),
                   j.at("model_b").get<std::string>(), j.at("turn_index").get<int>(),
                   parse_side(j.at("side").get<std::string>()), parse_polarity(j.at("polarity").get<std::string>())});
  });
  return out;
}

ScanResult scan_store(const Store& store, const DetectorList& detectors, const TimeWindow& window) {
  if (detectors.empty()) throw Error(ErrorCode::config_error, "no PII detectors configured");
  ScanResult result;
  for (const auto& c : store.list_conversations(window)) {
    auto verdict = detect_pii(c, detectors);
    result.flagged += verdict.flagged ? 1 : 0;
    result.rows.push_back({c.conversation_id, std::move(verdict)});
  }
  return result;
}

TakedownReceipt takedown(Store& store, const ConversationId& id, Timestamp now) {
  const auto ex = store.exclude(id, ExclusionReason::takedown, now, "takedown request");
  return {ex.conversation_id, ex.excluded_at};
}

}  // namespace arena
