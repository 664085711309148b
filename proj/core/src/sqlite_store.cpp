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

#include <sqlite3.h>

#include <algorithm>
#include <limits>
#include <mutex>

#include "arena/error.hpp"
#include "arena/serialization.hpp"
#include "arena/store.hpp"
#include "arena/util.hpp"

namespace arena {

std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::conversation: return "conversation";
    case RecordKind::vote: return "vote";
    case RecordKind::reaction: return "reaction";
    case RecordKind::model_card: return "model_card";
  }
  return "conversation";
}

std::string_view to_string(ExclusionReason r) {
  return r == ExclusionReason::pii_flagged ? "pii_flagged" : "takedown";
}

namespace {

ExclusionReason parse_exclusion_reason(std::string_view s) {
  return s == "pii_flagged" ? ExclusionReason::pii_flagged : ExclusionReason::takedown;
}

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS meta(key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS models(
  model_id TEXT PRIMARY KEY,
  payload TEXT NOT NULL,
  written_at INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS sessions(
  session_id TEXT PRIMARY KEY,
  consent INTEGER NOT NULL,
  created_at INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS conversations(
  conversation_id TEXT PRIMARY KEY,
  session_id TEXT NOT NULL REFERENCES sessions(session_id),
  model_a TEXT NOT NULL REFERENCES models(model_id),
  model_b TEXT NOT NULL REFERENCES models(model_id),
  created_at INTEGER NOT NULL,
  revealed INTEGER NOT NULL DEFAULT 0,
  give_up INTEGER NOT NULL DEFAULT 0,
  revealed_at INTEGER,
  written_at INTEGER NOT NULL);
CREATE INDEX IF NOT EXISTS conversations_created ON conversations(created_at, conversation_id);
CREATE TABLE IF NOT EXISTS turns(
  conversation_id TEXT NOT NULL REFERENCES conversations(conversation_id),
  turn_index INTEGER NOT NULL,
  user_text TEXT NOT NULL,
  assistant_a TEXT,
  assistant_b TEXT,
  PRIMARY KEY(conversation_id, turn_index));
CREATE TABLE IF NOT EXISTS votes(
  vote_id INTEGER PRIMARY KEY,
  conversation_id TEXT NOT NULL UNIQUE REFERENCES conversations(conversation_id),
  choice TEXT NOT NULL,
  cast_at INTEGER NOT NULL,
  written_at INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS reactions(
  reaction_id INTEGER PRIMARY KEY,
  conversation_id TEXT NOT NULL REFERENCES conversations(conversation_id),
  turn_index INTEGER NOT NULL,
  side TEXT NOT NULL,
  polarity TEXT NOT NULL,
  qualifiers TEXT NOT NULL,
  cast_at INTEGER NOT NULL,
  written_at INTEGER NOT NULL,
  UNIQUE(conversation_id, turn_index, side));
CREATE TABLE IF NOT EXISTS exclusions(
  conversation_id TEXT NOT NULL REFERENCES conversations(conversation_id),
  reason TEXT NOT NULL,
  excluded_at INTEGER NOT NULL,
  detail TEXT NOT NULL,
  PRIMARY KEY(conversation_id, reason));
CREATE TABLE IF NOT EXISTS snapshots(
  snapshot_id INTEGER PRIMARY KEY,
  as_of INTEGER NOT NULL,
  payload TEXT NOT NULL);
)sql";

class Stmt {
 public:
  Stmt(sqlite3* db, std::string_view sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::storage_error, std::string("prepare failed: ") + sqlite3_errmsg(db));
    }
  }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;
  ~Stmt() { sqlite3_finalize(stmt_); }

  Stmt& bind(int idx, std::string_view v) {
    check(sqlite3_bind_text(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Stmt& bind(int idx, std::int64_t v) {
    check(sqlite3_bind_int64(stmt_, idx, v));
    return *this;
  }
  Stmt& bind(int idx, int v) { return bind(idx, static_cast<std::int64_t>(v)); }
  Stmt& bind(int idx, bool v) { return bind(idx, static_cast<std::int64_t>(v ? 1 : 0)); }
  Stmt& bind(int idx, Timestamp t) { return bind(idx, to_millis(t)); }
  Stmt& bind_null(int idx) {
    check(sqlite3_bind_null(stmt_, idx));
    return *this;
  }
  Stmt& bind(int idx, const std::optional<std::string>& v) { return v ? bind(idx, std::string_view(*v)) : bind_null(idx); }

  // True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (rc == SQLITE_CONSTRAINT) throw Error(ErrorCode::referential_violation, sqlite3_errmsg(db_));
    throw Error(ErrorCode::storage_error, std::string("step failed: ") + sqlite3_errmsg(db_));
  }
  void run() {
    while (step()) {
    }
  }

  std::string text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
             : std::string{};
  }
  std::optional<std::string> opt_text(int col) const {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return text(col);
  }
  std::int64_t i64(int col) const { return sqlite3_column_int64(stmt_, col); }
  bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) throw Error(ErrorCode::storage_error, std::string("bind failed: ") + sqlite3_errmsg(db_));
  }
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

std::string encode(const AssistantMessage& m) { return nlohmann::json(m).dump(); }
AssistantMessage decode_message(const std::string& s) { return nlohmann::json::parse(s).get<AssistantMessage>(); }

class SqliteStore final : public Store {
 public:
  explicit SqliteStore(const std::filesystem::path& path) {
    if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX,
                        nullptr) != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error(ErrorCode::io_error, "cannot open store '" + path.string() + "': " + msg);
    }
    sqlite3_busy_timeout(db_, 5000);
    try {
      exec("PRAGMA journal_mode=WAL");
      exec("PRAGMA synchronous=NORMAL");
      exec("PRAGMA foreign_keys=ON");
      exec(kSchema);
      Stmt q(db_, "SELECT value FROM meta WHERE key='schema_version'");
      if (q.step()) {
        const int version = std::stoi(q.text(0));
        if (version > kStoreSchemaVersion) {
          throw Error(ErrorCode::schema_too_new, "store schema version " + std::to_string(version) +
                                                     " is newer than supported " +
                                                     std::to_string(kStoreSchemaVersion));
        }
      } else {
        Stmt ins(db_, "INSERT INTO meta(key, value) VALUES('schema_version', ?)");
        ins.bind(1, std::string_view(std::to_string(kStoreSchemaVersion))).run();
      }
    } catch (...) {
      sqlite3_close(db_);
      throw;
    }
  }

  ~SqliteStore() override { sqlite3_close(db_); }

  std::int64_t upsert_model(const ModelCard& card) override {
    check_card(card);
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "INSERT INTO models(model_id, payload, written_at) VALUES(?, ?, ?) "
           "ON CONFLICT(model_id) DO UPDATE SET payload=excluded.payload, written_at=excluded.written_at");
    s.bind(1, std::string_view(card.model_id)).bind(2, std::string_view(nlohmann::json(card).dump())).bind(3, system_now());
    s.run();
    return rowid_of("models", "model_id", card.model_id);
  }

  std::int64_t add_model(const ModelCard& card) override {
    check_card(card);
    std::lock_guard lock(mu_);
    if (model_exists(card.model_id)) {
      throw Error(ErrorCode::duplicate_model, "model '" + card.model_id + "' already exists");
    }
    Stmt s(db_, "INSERT INTO models(model_id, payload, written_at) VALUES(?, ?, ?)");
    s.bind(1, std::string_view(card.model_id)).bind(2, std::string_view(nlohmann::json(card).dump())).bind(3, system_now());
    s.run();
    return sqlite3_last_insert_rowid(db_);
  }

  std::optional<ModelCard> get_model(const ModelId& id) const override {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT payload FROM models WHERE model_id=?");
    s.bind(1, std::string_view(id));
    if (!s.step()) return std::nullopt;
    return nlohmann::json::parse(s.text(0)).get<ModelCard>();
  }

  std::vector<ModelCard> list_models() const override {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT payload FROM models ORDER BY model_id");
    std::vector<ModelCard> out;
    while (s.step()) out.push_back(nlohmann::json::parse(s.text(0)).get<ModelCard>());
    return out;
  }

  void set_model_enabled(const ModelId& id, bool enabled) override {
    auto card = get_model(id);
    if (!card) throw Error(ErrorCode::not_found, "unknown model '" + id + "'");
    card->enabled = enabled;
    upsert_model(*card);
  }

  void put_session(const Session& session) override {
    if (session.session_id.empty()) throw Error(ErrorCode::invalid_argument, "empty session id");
    if (!session.consent) throw Error(ErrorCode::consent_required, "sessions require consent");
    std::lock_guard lock(mu_);
    Stmt s(db_, "INSERT INTO sessions(session_id, consent, created_at) VALUES(?, ?, ?)");
    s.bind(1, std::string_view(session.session_id)).bind(2, session.consent).bind(3, session.created_at);
    s.run();
  }

  std::optional<Session> get_session(const SessionId& id) const override {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT session_id, consent, created_at FROM sessions WHERE session_id=?");
    s.bind(1, std::string_view(id));
    if (!s.step()) return std::nullopt;
    return Session{s.text(0), s.i64(1) != 0, from_millis(s.i64(2))};
  }

  std::int64_t put_conversation(const Conversation& c) override {
    if (auto v = validate_conversation(c); !v.empty()) {
      throw Error(ErrorCode::invalid_argument, "invalid conversation: " + v.front());
    }
    if (c.conversation_id.empty()) throw Error(ErrorCode::invalid_argument, "empty conversation id");
    std::lock_guard lock(mu_);
    Transaction tx(*this);
    Stmt se(db_, "SELECT consent FROM sessions WHERE session_id=?");
    se.bind(1, std::string_view(c.session_id));
    if (!se.step()) throw Error(ErrorCode::referential_violation, "unknown session '" + c.session_id + "'");
    if (se.i64(0) == 0) throw Error(ErrorCode::consent_required, "session without consent");
    for (const auto& m : {c.pairing.model_a, c.pairing.model_b}) {
      if (!model_exists(m)) throw Error(ErrorCode::referential_violation, "unknown model '" + m + "'");
    }
    Stmt s(db_,
           "INSERT INTO conversations(conversation_id, session_id, model_a, model_b, created_at, revealed, "
           "written_at) VALUES(?, ?, ?, ?, ?, 0, ?)");
    s.bind(1, std::string_view(c.conversation_id))
        .bind(2, std::string_view(c.session_id))
        .bind(3, std::string_view(c.pairing.model_a))
        .bind(4, std::string_view(c.pairing.model_b))
        .bind(5, c.created_at)
        .bind(6, system_now());
    s.run();
    const auto rowid = sqlite3_last_insert_rowid(db_);
    for (const auto& t : c.turns) insert_turn(c.conversation_id, t);
    tx.commit();
    return rowid;
  }

  int append_turn(const ConversationId& id, const std::string& user_text) override {
    std::lock_guard lock(mu_);
    Transaction tx(*this);
    const auto state = reveal_state_locked(id);
    if (!state) throw Error(ErrorCode::not_found, "unknown conversation '" + id + "'");
    if (state->revealed) throw Error(ErrorCode::conversation_closed, "conversation already revealed");
    Stmt count(db_, "SELECT COUNT(*) FROM turns WHERE conversation_id=?");
    count.bind(1, std::string_view(id));
    count.step();
    const int index = static_cast<int>(count.i64(0));
    insert_turn(id, Turn{index, user_text, std::nullopt, std::nullopt});
    tx.commit();
    return index;
  }

  void set_assistant_message(const ConversationId& id, int turn_index, Side side,
                             const AssistantMessage& message) override {
    std::lock_guard lock(mu_);
    Transaction tx(*this);
    const std::string column = side == Side::a ? "assistant_a" : "assistant_b";
    Stmt q(db_, "SELECT " + column + " FROM turns WHERE conversation_id=? AND turn_index=?");
    q.bind(1, std::string_view(id)).bind(2, turn_index);
    if (!q.step()) throw Error(ErrorCode::not_found, "unknown turn");
    if (!q.is_null(0)) throw Error(ErrorCode::invalid_argument, "assistant message already recorded");
    Stmt u(db_, "UPDATE turns SET " + column + "=? WHERE conversation_id=? AND turn_index=?");
    u.bind(1, std::string_view(encode(message))).bind(2, std::string_view(id)).bind(3, turn_index);
    u.run();
    tx.commit();
  }

  std::optional<Conversation> get_conversation(const ConversationId& id) const override {
    std::lock_guard lock(mu_);
    auto out = read_conversations("WHERE c.conversation_id=?", [&](Stmt& s) { s.bind(1, std::string_view(id)); });
    if (out.empty()) return std::nullopt;
    return std::move(out.front());
  }

  std::vector<Conversation> list_conversations(const TimeWindow& window) const override {
    std::lock_guard lock(mu_);
    return read_conversations("WHERE c.created_at >= ? AND c.created_at < ?",
                              [&](Stmt& s) { bind_window(s, window, 1); });
  }

  std::int64_t put_vote(const Vote& v) override {
    std::lock_guard lock(mu_);
    Transaction tx(*this);
    const auto state = reveal_state_locked(v.conversation_id);
    if (!state) throw Error(ErrorCode::referential_violation, "unknown conversation '" + v.conversation_id + "'");
    if (state->revealed) throw Error(ErrorCode::vote_after_reveal, "conversation already revealed");
    Stmt q(db_, "SELECT 1 FROM votes WHERE conversation_id=?");
    q.bind(1, std::string_view(v.conversation_id));
    if (q.step()) throw Error(ErrorCode::duplicate_vote, "conversation already has a vote");
    Stmt s(db_, "INSERT INTO votes(conversation_id, choice, cast_at, written_at) VALUES(?, ?, ?, ?)");
    s.bind(1, std::string_view(v.conversation_id)).bind(2, to_string(v.choice)).bind(3, v.cast_at).bind(4, system_now());
    s.run();
    const auto rowid = sqlite3_last_insert_rowid(db_);
    tx.commit();
    return rowid;
  }

  std::optional<Vote> get_vote(const ConversationId& id) const override {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT conversation_id, choice, cast_at FROM votes WHERE conversation_id=?");
    s.bind(1, std::string_view(id));
    if (!s.step()) return std::nullopt;
    return Vote{s.text(0), parse_vote_choice(s.text(1)), from_millis(s.i64(2))};
  }

  std::int64_t put_reaction(const Reaction& r) override {
    std::lock_guard lock(mu_);
    Transaction tx(*this);
    const auto state = reveal_state_locked(r.conversation_id);
    if (!state) throw Error(ErrorCode::referential_violation, "unknown conversation '" + r.conversation_id + "'");
    if (state->revealed) throw Error(ErrorCode::conversation_closed, "conversation already revealed");
    const std::string column = r.side == Side::a ? "assistant_a" : "assistant_b";
    Stmt q(db_, "SELECT " + column + " FROM turns WHERE conversation_id=? AND turn_index=?");
    q.bind(1, std::string_view(r.conversation_id)).bind(2, r.turn_index);
    if (!q.step() || q.is_null(0)) {
      throw Error(ErrorCode::referential_violation, "no assistant message for that turn and side");
    }
    nlohmann::json quals = nlohmann::json::array();
    for (auto x : r.qualifiers) quals.push_back(to_string(x));
    Stmt s(db_,
           "INSERT INTO reactions(conversation_id, turn_index, side, polarity, qualifiers, cast_at, written_at) "
           "VALUES(?, ?, ?, ?, ?, ?, ?) ON CONFLICT(conversation_id, turn_index, side) DO UPDATE SET "
           "polarity=excluded.polarity, qualifiers=excluded.qualifiers, cast_at=excluded.cast_at, "
           "written_at=excluded.written_at");
    s.bind(1, std::string_view(r.conversation_id))
        .bind(2, r.turn_index)
        .bind(3, to_string(r.side))
        .bind(4, to_string(r.polarity))
        .bind(5, std::string_view(quals.dump()))
        .bind(6, r.cast_at)
        .bind(7, system_now());
    s.run();
    Stmt id(db_, "SELECT reaction_id FROM reactions WHERE conversation_id=? AND turn_index=? AND side=?");
    id.bind(1, std::string_view(r.conversation_id)).bind(2, r.turn_index).bind(3, to_string(r.side));
    id.step();
    const auto rowid = id.i64(0);
    tx.commit();
    return rowid;
  }

  std::vector<Reaction> reactions_for(const ConversationId& id) const override {
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "SELECT conversation_id, turn_index, side, polarity, qualifiers, cast_at FROM reactions "
           "WHERE conversation_id=? ORDER BY turn_index, side");
    s.bind(1, std::string_view(id));
    std::vector<Reaction> out;
    while (s.step()) out.push_back(read_reaction(s, 0));
    return out;
  }

  bool mark_revealed(const ConversationId& id, Timestamp at, bool give_up) override {
    std::lock_guard lock(mu_);
    Transaction tx(*this);
    const auto state = reveal_state_locked(id);
    if (!state) throw Error(ErrorCode::not_found, "unknown conversation '" + id + "'");
    if (state->revealed) return false;
    Stmt q(db_, "SELECT cast_at FROM votes WHERE conversation_id=?");
    q.bind(1, std::string_view(id));
    if (q.step()) at = std::max(at, from_millis(q.i64(0) + 1));
    Stmt u(db_, "UPDATE conversations SET revealed=1, give_up=?, revealed_at=? WHERE conversation_id=? AND revealed=0");
    u.bind(1, give_up).bind(2, at).bind(3, std::string_view(id));
    u.run();
    const bool changed = sqlite3_changes(db_) == 1;
    tx.commit();
    return changed;
  }

  RevealState reveal_state(const ConversationId& id) const override {
    std::lock_guard lock(mu_);
    auto s = reveal_state_locked(id);
    if (!s) throw Error(ErrorCode::not_found, "unknown conversation '" + id + "'");
    return *s;
  }

  std::vector<RankingVote> query_votes(const TimeWindow& window) const override {
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "SELECT v.conversation_id, c.model_a, c.model_b, v.choice, v.cast_at FROM votes v "
           "JOIN conversations c ON c.conversation_id = v.conversation_id "
           "WHERE v.cast_at >= ? AND v.cast_at < ? ORDER BY v.cast_at, v.conversation_id");
    bind_window(s, window, 1);
    std::vector<RankingVote> out;
    while (s.step()) {
      out.push_back({s.text(0), s.text(1), s.text(2), parse_vote_choice(s.text(3)), from_millis(s.i64(4))});
    }
    return out;
  }

  std::vector<RankingReaction> query_reactions(const TimeWindow& window) const override {
    std::lock_guard lock(mu_);
    Stmt s(db_,
           "SELECT r.conversation_id, c.model_a, c.model_b, r.turn_index, r.side, r.polarity FROM reactions r "
           "JOIN conversations c ON c.conversation_id = r.conversation_id "
           "WHERE r.cast_at >= ? AND r.cast_at < ? ORDER BY r.cast_at, r.conversation_id, r.turn_index, r.side");
    bind_window(s, window, 1);
    std::vector<RankingReaction> out;
    while (s.step()) {
      out.push_back({s.text(0), s.text(1), s.text(2), static_cast<int>(s.i64(3)), parse_side(s.text(4)),
                     parse_polarity(s.text(5))});
    }
    return out;
  }

  PairCounts pair_counts() const override {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT model_a, model_b, COUNT(*) FROM conversations GROUP BY model_a, model_b");
    PairCounts out;
    while (s.step()) out[unordered_key(s.text(0), s.text(1))] += s.i64(2);
    return out;
  }

  Exclusion exclude(const ConversationId& id, ExclusionReason reason, Timestamp at,
                    const std::string& detail) override {
    std::lock_guard lock(mu_);
    Transaction tx(*this);
    if (!reveal_state_locked(id)) throw Error(ErrorCode::not_found, "unknown conversation '" + id + "'");
    Stmt ins(db_,
             "INSERT INTO exclusions(conversation_id, reason, excluded_at, detail) VALUES(?, ?, ?, ?) "
             "ON CONFLICT(conversation_id, reason) DO NOTHING");
    ins.bind(1, std::string_view(id)).bind(2, to_string(reason)).bind(3, at).bind(4, std::string_view(detail));
    ins.run();
    Stmt q(db_, "SELECT conversation_id, reason, excluded_at, detail FROM exclusions WHERE conversation_id=? AND reason=?");
    q.bind(1, std::string_view(id)).bind(2, to_string(reason));
    q.step();
    Exclusion out{q.text(0), parse_exclusion_reason(q.text(1)), from_millis(q.i64(2)), q.text(3)};
    tx.commit();
    return out;
  }

  std::vector<Exclusion> exclusions() const override {
    std::lock_guard lock(mu_);
    Stmt q(db_, "SELECT conversation_id, reason, excluded_at, detail FROM exclusions ORDER BY excluded_at, conversation_id, reason");
    std::vector<Exclusion> out;
    while (q.step()) out.push_back({q.text(0), parse_exclusion_reason(q.text(1)), from_millis(q.i64(2)), q.text(3)});
    return out;
  }

  void put_snapshot(const LeaderboardSnapshot& snapshot) override {
    std::lock_guard lock(mu_);
    Stmt s(db_, "INSERT INTO snapshots(as_of, payload) VALUES(?, ?)");
    s.bind(1, snapshot.as_of).bind(2, std::string_view(to_json(snapshot).dump()));
    s.run();
  }

  std::optional<LeaderboardSnapshot> latest_snapshot() const override {
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT payload FROM snapshots ORDER BY snapshot_id DESC LIMIT 1");
    if (!s.step()) return std::nullopt;
    return snapshot_from_json(nlohmann::json::parse(s.text(0)));
  }

  std::vector<StoreRecord> all_records() const override {
    std::vector<StoreRecord> out;
    std::vector<std::pair<ConversationId, Timestamp>> written;
    {
      std::lock_guard lock(mu_);
      Stmt m(db_, "SELECT payload, written_at FROM models ORDER BY model_id");
      while (m.step()) {
        out.push_back({RecordKind::model_card, nlohmann::json::parse(m.text(0)).get<ModelCard>(),
                       from_millis(m.i64(1)), kStoreSchemaVersion});
      }
      Stmt c(db_, "SELECT conversation_id, written_at FROM conversations ORDER BY created_at, conversation_id");
      while (c.step()) written.emplace_back(c.text(0), from_millis(c.i64(1)));
    }
    for (const auto& [id, at] : written) {
      if (auto conv = get_conversation(id)) out.push_back({RecordKind::conversation, *conv, at, kStoreSchemaVersion});
    }
    std::lock_guard lock(mu_);
    Stmt v(db_, "SELECT conversation_id, choice, cast_at, written_at FROM votes ORDER BY vote_id");
    while (v.step()) {
      out.push_back({RecordKind::vote, Vote{v.text(0), parse_vote_choice(v.text(1)), from_millis(v.i64(2))},
                     from_millis(v.i64(3)), kStoreSchemaVersion});
    }
    Stmt r(db_,
           "SELECT conversation_id, turn_index, side, polarity, qualifiers, cast_at, written_at FROM reactions "
           "ORDER BY reaction_id");
    while (r.step()) out.push_back({RecordKind::reaction, read_reaction(r, 0), from_millis(r.i64(6)), kStoreSchemaVersion});
    return out;
  }

 private:
  struct Transaction {
    explicit Transaction(SqliteStore& s) : store(s) { store.exec("BEGIN IMMEDIATE"); }
    ~Transaction() {
      if (!done) sqlite3_exec(store.db_, "ROLLBACK", nullptr, nullptr, nullptr);
    }
    void commit() {
      store.exec("COMMIT");
      done = true;
    }
    SqliteStore& store;
    bool done = false;
  };

  void exec(const char* sql) const {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown";
      sqlite3_free(err);
      throw Error(ErrorCode::storage_error, "sqlite: " + msg);
    }
  }

  static void check_card(const ModelCard& card) {
    if (auto v = validate_model_card(card); !v.empty()) {
      throw Error(ErrorCode::invalid_argument, "invalid model card '" + card.model_id + "': " + v.front());
    }
  }

  bool model_exists(const ModelId& id) const {
    Stmt s(db_, "SELECT 1 FROM models WHERE model_id=?");
    s.bind(1, std::string_view(id));
    return s.step();
  }

  std::int64_t rowid_of(const char* table, const char* key, const std::string& value) const {
    Stmt s(db_, std::string("SELECT rowid FROM ") + table + " WHERE " + key + "=?");
    s.bind(1, std::string_view(value));
    return s.step() ? s.i64(0) : 0;
  }

  std::optional<RevealState> reveal_state_locked(const ConversationId& id) const {
    Stmt s(db_, "SELECT revealed, give_up, revealed_at FROM conversations WHERE conversation_id=?");
    s.bind(1, std::string_view(id));
    if (!s.step()) return std::nullopt;
    RevealState st{s.i64(0) != 0, s.i64(1) != 0, std::nullopt};
    if (!s.is_null(2)) st.revealed_at = from_millis(s.i64(2));
    return st;
  }

  void insert_turn(const ConversationId& id, const Turn& t) {
    Stmt s(db_, "INSERT INTO turns(conversation_id, turn_index, user_text, assistant_a, assistant_b) VALUES(?, ?, ?, ?, ?)");
    s.bind(1, std::string_view(id)).bind(2, t.turn_index).bind(3, std::string_view(t.user_text));
    s.bind(4, t.assistant_a ? std::optional<std::string>(encode(*t.assistant_a)) : std::nullopt);
    s.bind(5, t.assistant_b ? std::optional<std::string>(encode(*t.assistant_b)) : std::nullopt);
    s.run();
  }

  static void bind_window(Stmt& s, const TimeWindow& w, int first) {
    s.bind(first, w.since ? to_millis(*w.since) : std::numeric_limits<std::int64_t>::min());
    s.bind(first + 1, w.until ? to_millis(*w.until) : std::numeric_limits<std::int64_t>::max());
  }

  static Reaction read_reaction(const Stmt& s, int c0) {
    Reaction r;
    r.conversation_id = s.text(c0);
    r.turn_index = static_cast<int>(s.i64(c0 + 1));
    r.side = parse_side(s.text(c0 + 2));
    r.polarity = parse_polarity(s.text(c0 + 3));
    for (const auto& q : nlohmann::json::parse(s.text(c0 + 4))) r.qualifiers.insert(parse_qualifier(q.get<std::string>()));
    r.cast_at = from_millis(s.i64(c0 + 5));
    return r;
  }

  template <typename Binder>
  std::vector<Conversation> read_conversations(const std::string& where, Binder&& bind) const {
    Stmt s(db_,
           "SELECT c.conversation_id, c.session_id, c.model_a, c.model_b, c.created_at, c.revealed, "
           "EXISTS(SELECT 1 FROM votes v WHERE v.conversation_id = c.conversation_id) FROM conversations c " +
               where + " ORDER BY c.created_at, c.conversation_id");
    bind(s);
    std::vector<Conversation> out;
    while (s.step()) {
      Conversation c;
      c.conversation_id = s.text(0);
      c.session_id = s.text(1);
      c.pairing = {s.text(2), s.text(3)};
      c.created_at = from_millis(s.i64(4));
      c.revealed = s.i64(5) != 0;
      c.voted = s.i64(6) != 0;
      out.push_back(std::move(c));
    }
    for (auto& c : out) {
      Stmt tq(db_,
              "SELECT turn_index, user_text, assistant_a, assistant_b FROM turns WHERE conversation_id=? "
              "ORDER BY turn_index");
      tq.bind(1, std::string_view(c.conversation_id));
      while (tq.step()) {
        Turn turn;
        turn.turn_index = static_cast<int>(tq.i64(0));
        turn.user_text = tq.text(1);
        if (auto a = tq.opt_text(2)) turn.assistant_a = decode_message(*a);
        if (auto b = tq.opt_text(3)) turn.assistant_b = decode_message(*b);
        c.turns.push_back(std::move(turn));
      }
    }
    return out;
  }

  sqlite3* db_ = nullptr;
  mutable std::mutex mu_;
};

}  // namespace

std::unique_ptr<Store> open_sqlite_store(const std::filesystem::path& path) {
  return std::make_unique<SqliteStore>(path);
}

}  // namespace arena
