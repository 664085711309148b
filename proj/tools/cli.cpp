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

#include "cli.hpp"

#include <pthread.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "arena/config.hpp"
#include "arena/export.hpp"
#include "arena/http_api.hpp"
#include "arena/language.hpp"
#include "arena/ranking.hpp"
#include "arena/serialization.hpp"
#include "arena/service.hpp"
#include "arena/store.hpp"
#include "arena/util.hpp"

namespace arena::cli {
namespace {

struct WindowFlags {
  std::string since;
  std::string until;

  TimeWindow window() const {
    TimeWindow w;
    if (!since.empty()) w.since = parse_timestamp(since);
    if (!until.empty()) w.until = parse_timestamp(until);
    return w;
  }
};

struct Ctx {
  std::ostream& out;
  std::ostream& err;
  std::string config_path;
};

PlatformConfig config_or_default(const Ctx& ctx) {
  if (ctx.config_path.empty()) return PlatformConfig{};
  return load_config(ctx.config_path);
}

std::shared_ptr<Store> open_store(const PlatformConfig& cfg) {
  auto store = open_sqlite_store(cfg.store_path);
  seed_models(*store, cfg);
  return store;
}

// Blocks SIGINT/SIGTERM in every thread and stops the server from a
// dedicated sigwait thread, which is safe to call into the server from.
class SignalStopper {
 public:
  explicit SignalStopper(HttpApi& api) {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, &previous_);
    waiter_ = std::thread([this, &api] {
      int sig = 0;
      sigwait(&set_, &sig);
      if (!done_.load()) api.stop();
    });
  }
  ~SignalStopper() {
    done_.store(true);
    pthread_kill(waiter_.native_handle(), SIGTERM);
    waiter_.join();
    pthread_sigmask(SIG_SETMASK, &previous_, nullptr);
  }

 private:
  sigset_t set_{};
  sigset_t previous_{};
  std::atomic<bool> done_{false};
  std::thread waiter_;
};

int cmd_serve(const Ctx& ctx, const std::string& host, int port) {
  PlatformConfig cfg = load_config(ctx.config_path);
  if (!host.empty()) cfg.http.host = host;
  if (port >= 0) cfg.http.port = port;
  auto store = open_store(cfg);
  auto built = build_gateway(cfg);
  for (const auto& w : built.warnings) ctx.err << "warning: " << w << "\n";
  cfg.http.admin_token = process_env(cfg.admin_token_env).value_or("");
  if (cfg.http.admin_token.empty()) ctx.err << "warning: " << cfg.admin_token_env << " unset; takedown endpoint disabled\n";

  ArenaService service(store, built.gateway, cfg.pairing, cfg.energy, cfg.service);
  service.reload_leaderboard();
  HttpApi api(service, cfg.http);
  SignalStopper stopper(api);
  const int bound = api.bind();
  service.start_scheduler();
  ctx.out << "listening on " << cfg.http.host << ":" << bound << std::endl;
  api.serve();
  service.stop_scheduler();
  ctx.out << "shut down" << std::endl;
  return 0;
}

struct RankFlags {
  std::string votes_file;
  std::string reactions_file;
  std::string out_file = "leaderboard.json";
  std::string as_of;
  std::optional<double> lambda;
  std::optional<double> vote_weight;
  std::optional<double> reaction_weight;
  std::optional<int> bootstrap;
  std::optional<std::uint64_t> seed;
};

int cmd_rank(const Ctx& ctx, const RankFlags& f) {
  if (ctx.config_path.empty() && f.votes_file.empty()) {
    throw Error(ErrorCode::invalid_argument, "rank needs --config or --votes");
  }
  PlatformConfig cfg = config_or_default(ctx);
  RankingConfig rc = cfg.service.ranking;
  if (f.lambda) rc.lambda = *f.lambda;
  if (f.vote_weight) rc.weights.vote_w = *f.vote_weight;
  if (f.reaction_weight) rc.weights.reaction_w = *f.reaction_weight;
  if (f.bootstrap) rc.bootstrap_rounds = *f.bootstrap;
  if (f.seed) rc.seed = *f.seed;

  std::shared_ptr<Store> store;
  if (!ctx.config_path.empty()) store = open_store(cfg);

  std::vector<RankingVote> votes;
  std::vector<RankingReaction> reactions;
  std::optional<Timestamp> as_of;
  if (!f.as_of.empty()) as_of = parse_timestamp(f.as_of);
  if (!f.votes_file.empty()) {
    votes = read_votes_file(f.votes_file);
    if (!f.reactions_file.empty()) reactions = read_reactions_file(f.reactions_file);
    // File input carries its own clock so reruns produce identical files.
    if (!as_of) {
      Timestamp latest{};
      for (const auto& v : votes) latest = std::max(latest, v.cast_at);
      as_of = latest;
    }
  } else {
    votes = store->query_votes();
    reactions = store->query_reactions();
  }
  const auto snapshot = compute_leaderboard(votes, reactions, rc, as_of.value_or(system_now()));

  {
    std::ofstream o(f.out_file, std::ios::binary | std::ios::trunc);
    if (!o) throw Error(ErrorCode::io_error, "cannot write " + f.out_file);
    o << to_json(snapshot).dump(2) << "\n";
  }
  if (store) store->put_snapshot(snapshot);
  ctx.out << format_table(snapshot);
  return 0;
}

int cmd_export(const Ctx& ctx, const std::string& out_dir, const WindowFlags& w, const std::string& generated_at) {
  PlatformConfig cfg = load_config(ctx.config_path);
  auto store = open_store(cfg);
  auto built = build_gateway(cfg);
  for (const auto& msg : built.warnings) ctx.err << "warning: " << msg << "\n";
  const DetectorList detectors = build_detectors(cfg, built.gateway);
  StopwordLanguageDetector language;
  ExportContext ectx{*store, detectors, language, cfg.energy};
  ExportConfig ecfg;
  ecfg.out_dir = out_dir;
  ecfg.window = w.window();
  if (!cfg.license_notice.empty()) ecfg.license_notice = cfg.license_notice;
  if (!generated_at.empty()) ecfg.generated_at = parse_timestamp(generated_at);
  const auto bundle = export_datasets(ectx, ecfg);
  const auto& c = bundle.counts;
  ctx.out << "conversations " << c.conversations << "\nvotes " << c.votes << "\nreactions " << c.reactions
          << "\nexcluded_pii " << c.excluded_pii << "\nexcluded_takedown " << c.excluded_takedown
          << "\nexcluded_non_consent " << c.excluded_non_consent << "\nfilter_rate " << c.filter_rate() << "\n";
  return 0;
}

int cmd_pii_scan(const Ctx& ctx, const WindowFlags& w) {
  PlatformConfig cfg = load_config(ctx.config_path);
  auto store = open_store(cfg);
  auto built = build_gateway(cfg);
  for (const auto& msg : built.warnings) ctx.err << "warning: " << msg << "\n";
  const auto result = scan_store(*store, build_detectors(cfg, built.gateway), w.window());
  for (const auto& row : result.rows) {
    ctx.out << row.conversation_id << "\t";
    if (row.verdict.flagged) {
      ctx.out << "flagged";
      for (const auto& d : row.verdict.detector_labels) ctx.out << " " << d;
    } else {
      ctx.out << "clean";
    }
    ctx.out << "\n";
  }
  ctx.out << "flagged " << result.flagged << " of " << result.rows.size() << " rate " << result.flag_rate() << "\n";
  return 0;
}

struct ModelFlags {
  ModelCard card;
  std::string license = "open_weight";
  std::optional<bool> training_allowed;
  std::optional<double> total;
  bool json = false;
};

int cmd_models_add(const Ctx& ctx, ModelFlags f) {
  PlatformConfig cfg = load_config(ctx.config_path);
  f.card.license_kind = parse_license_kind(f.license);
  f.card.training_allowed = f.training_allowed.value_or(f.card.license_kind != LicenseKind::proprietary);
  f.card.total_param_count = f.total.value_or(f.card.active_param_count);
  if (f.card.display_name.empty()) f.card.display_name = f.card.model_id;
  if (auto problems = validate_model_card(f.card); !problems.empty()) {
    throw Error(ErrorCode::invalid_argument, problems.front());
  }
  open_store(cfg)->add_model(f.card);
  ctx.out << "added " << f.card.model_id << "\n";
  return 0;
}

int cmd_models_list(const Ctx& ctx, bool json) {
  PlatformConfig cfg = load_config(ctx.config_path);
  const auto models = open_store(cfg)->list_models();
  if (json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : models) {
      nlohmann::ordered_json j = m;
      arr.push_back(j);
    }
    ctx.out << arr.dump(2) << "\n";
    return 0;
  }
  for (const auto& m : models) {
    ctx.out << m.model_id << "\t" << (m.enabled ? "enabled" : "disabled") << "\t" << to_string(m.license_kind) << "\t"
            << m.provider_route.provider_id << "/" << m.provider_route.model_name << "\n";
  }
  return 0;
}

int cmd_models_enable(const Ctx& ctx, const std::string& id, bool enabled) {
  PlatformConfig cfg = load_config(ctx.config_path);
  open_store(cfg)->set_model_enabled(id, enabled);
  ctx.out << (enabled ? "enabled " : "disabled ") << id << "\n";
  return 0;
}

int cmd_takedown(const Ctx& ctx, const std::string& id) {
  PlatformConfig cfg = load_config(ctx.config_path);
  auto store = open_store(cfg);
  const auto receipt = takedown(*store, id, system_now());
  ctx.out << "taken down " << receipt.conversation_id << " at " << format_timestamp(receipt.taken_down_at) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blind pairwise model comparison arena"};
  app.require_subcommand(1);
  Ctx ctx{out, err, {}};

  std::string host;
  int port = -1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("-c,--config", ctx.config_path, "Platform config file")->required();
  serve->add_option("--host", host, "Override the listen host");
  serve->add_option("--port", port, "Override the listen port");

  RankFlags rank_flags;
  auto* rank = app.add_subcommand("rank", "Fit the leaderboard and write a snapshot");
  rank->add_option("-c,--config", ctx.config_path, "Platform config; votes come from its store unless --votes");
  rank->add_option("--votes", rank_flags.votes_file, "votes.jsonl export file");
  rank->add_option("--reactions", rank_flags.reactions_file, "reactions.jsonl export file");
  rank->add_option("--lambda", rank_flags.lambda, "Pseudo-count added to every ordered pair");
  rank->add_option("--vote-weight", rank_flags.vote_weight);
  rank->add_option("--reaction-weight", rank_flags.reaction_weight);
  rank->add_option("--bootstrap", rank_flags.bootstrap, "Bootstrap replicas (>= 50)");
  rank->add_option("--seed", rank_flags.seed);
  rank->add_option("--as-of", rank_flags.as_of, "Snapshot timestamp");
  rank->add_option("-o,--out", rank_flags.out_file, "Snapshot JSON output")->capture_default_str();

  std::string out_dir;
  std::string generated_at;
  WindowFlags export_window;
  auto* exp = app.add_subcommand("export", "Write the public datasets");
  exp->add_option("-c,--config", ctx.config_path)->required();
  exp->add_option("-o,--out", out_dir, "Output directory")->required();
  exp->add_option("--since", export_window.since, "Inclusive start, YYYY-MM-DDTHH:MM:SS.mmmZ");
  exp->add_option("--until", export_window.until, "Exclusive end");
  exp->add_option("--generated-at", generated_at, "Fixed manifest timestamp");

  WindowFlags scan_window;
  auto* scan = app.add_subcommand("pii-scan", "Print PII verdicts without exporting");
  scan->add_option("-c,--config", ctx.config_path)->required();
  scan->add_option("--since", scan_window.since);
  scan->add_option("--until", scan_window.until);

  auto* models = app.add_subcommand("models", "Manage the model registry");
  models->add_option("-c,--config", ctx.config_path)->required();
  models->require_subcommand(1);
  ModelFlags mf;
  auto* add = models->add_subcommand("add", "Register a model");
  add->add_option("--id", mf.card.model_id)->required();
  add->add_option("--name", mf.card.display_name);
  add->add_option("--org", mf.card.organisation);
  add->add_option("--license", mf.license, "open_source | open_weight | proprietary")->capture_default_str();
  add->add_option("--training-allowed", mf.training_allowed);
  add->add_option("--active-params", mf.card.active_param_count, "Billions")->required();
  add->add_option("--total-params", mf.total, "Billions");
  add->add_flag("--params-estimated", mf.card.params_estimated);
  add->add_option("--provider", mf.card.provider_route.provider_id)->required();
  add->add_option("--provider-model", mf.card.provider_route.model_name)->required();
  add->add_option("--metadata", mf.card.metadata_text);
  bool list_json = false;
  auto* list = models->add_subcommand("list", "List registered models");
  list->add_flag("--json", list_json);
  std::string model_id;
  auto* disable = models->add_subcommand("disable", "Stop pairing a model");
  disable->add_option("id", model_id)->required();
  auto* enable = models->add_subcommand("enable", "Resume pairing a model");
  enable->add_option("id", model_id)->required();

  std::string conversation_id;
  auto* td = app.add_subcommand("takedown", "Withdraw a conversation from every future export");
  td->add_option("-c,--config", ctx.config_path)->required();
  td->add_option("id", conversation_id)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*serve) return cmd_serve(ctx, host, port);
    if (*rank) return cmd_rank(ctx, rank_flags);
    if (*exp) return cmd_export(ctx, out_dir, export_window, generated_at);
    if (*scan) return cmd_pii_scan(ctx, scan_window);
    if (*add) return cmd_models_add(ctx, mf);
    if (*list) return cmd_models_list(ctx, list_json);
    if (*disable) return cmd_models_enable(ctx, model_id, false);
    if (*enable) return cmd_models_enable(ctx, model_id, true);
    if (*td) return cmd_takedown(ctx, conversation_id);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace arena::cli
