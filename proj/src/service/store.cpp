#include "surgscan/service/store.hpp"

#include <sqlite3.h>

#include <chrono>
#include <ctime>

namespace surgscan::service {

namespace fs = std::filesystem;

std::string_view to_string(Role r) { return r == Role::Admin ? "admin" : "user"; }
std::string_view to_string(UserStatus s) { return s == UserStatus::Active ? "active" : "inactive"; }
std::string_view to_string(BatchState s) { return s == BatchState::Open ? "open" : "closed"; }

std::optional<Role> parse_role(std::string_view s) {
  if (s == "admin") return Role::Admin;
  if (s == "user") return Role::User;
  return std::nullopt;
}

std::optional<UserStatus> parse_user_status(std::string_view s) {
  if (s == "active") return UserStatus::Active;
  if (s == "inactive") return UserStatus::Inactive;
  return std::nullopt;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS users (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  name TEXT NOT NULL,
  email TEXT NOT NULL UNIQUE COLLATE NOCASE,
  password_hash TEXT NOT NULL,
  role TEXT NOT NULL CHECK (role IN ('admin', 'user')),
  status TEXT NOT NULL DEFAULT 'active' CHECK (status IN ('active', 'inactive')),
  profile_image TEXT
);
CREATE TABLE IF NOT EXISTS sessions (
  token TEXT PRIMARY KEY,
  user_id INTEGER NOT NULL REFERENCES users(id),
  created_unix INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS batches (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  batch_number TEXT UNIQUE,
  owner INTEGER NOT NULL REFERENCES users(id),
  created_at TEXT NOT NULL,
  state TEXT NOT NULL CHECK (state IN ('open', 'closed'))
);
CREATE UNIQUE INDEX IF NOT EXISTS one_open_batch_per_owner ON batches(owner) WHERE state = 'open';
CREATE TABLE IF NOT EXISTS images (
  id INTEGER PRIMARY KEY AUTOINCREMENT,
  batch_id INTEGER NOT NULL REFERENCES batches(id),
  stored_path TEXT NOT NULL,
  original_filename TEXT NOT NULL,
  content_digest TEXT NOT NULL,
  uploaded_at TEXT NOT NULL,
  result_json TEXT,
  failure_json TEXT,
  CHECK ((result_json IS NULL) <> (failure_json IS NULL))
);
CREATE INDEX IF NOT EXISTS images_by_batch ON images(batch_id);
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw Error(Errc::IoFailure, what + ": " + (db ? sqlite3_errmsg(db) : "no connection"));
}

class Connection {
 public:
  explicit Connection(const fs::path& path) {
    if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX,
                        nullptr) != SQLITE_OK) {
      std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error(Errc::IoFailure, "cannot open store " + path.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 10000);
    exec("PRAGMA foreign_keys = ON");
  }
  ~Connection() { sqlite3_close(db_); }
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  sqlite3* get() const noexcept { return db_; }

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(Errc::IoFailure, std::string("store: ") + msg);
    }
  }

 private:
  sqlite3* db_ = nullptr;
};

class Statement {
 public:
  Statement(Connection& c, const char* sql) : db_(c.get()) {
    if (sqlite3_prepare_v2(db_, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail(db_, "prepare");
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, std::int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }
  Statement& bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& bind(int i, std::string_view v) { return bind(i, std::string(v)); }
  Statement& bind(int i, const std::optional<std::string>& v) {
    if (v) return bind(i, *v);
    sqlite3_bind_null(stmt_, i);
    return *this;
  }

  /// true while rows remain. Constraint violations are reported through
  /// `constraint` when the caller asks for them.
  bool step(bool* constraint = nullptr) {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (constraint && (rc & 0xFF) == SQLITE_CONSTRAINT) {
      *constraint = true;
      return false;
    }
    fail(db_, "step");
  }

  std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }
  std::string text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? std::string(reinterpret_cast<const char*>(p), sqlite3_column_bytes(stmt_, col)) : std::string();
  }
  std::optional<std::string> optional_text(int col) const {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return text(col);
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

/// Rolls back unless committed.
class Transaction {
 public:
  explicit Transaction(Connection& c) : c_(c) { c_.exec("BEGIN IMMEDIATE"); }
  ~Transaction() {
    if (!done_) sqlite3_exec(c_.get(), "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    c_.exec("COMMIT");
    done_ = true;
  }

 private:
  Connection& c_;
  bool done_ = false;
};

constexpr const char* kUserColumns = "id, name, email, password_hash, role, status, profile_image";

User read_user(const Statement& s, int offset = 0) {
  User u;
  u.id = s.int64(offset);
  u.name = s.text(offset + 1);
  u.email = s.text(offset + 2);
  u.password_hash = s.text(offset + 3);
  u.role = parse_role(s.text(offset + 4)).value_or(Role::User);
  u.status = parse_user_status(s.text(offset + 5)).value_or(UserStatus::Inactive);
  u.profile_image = s.optional_text(offset + 6);
  return u;
}

constexpr const char* kBatchColumns = "id, batch_number, owner, created_at, state";

Batch read_batch(const Statement& s) {
  Batch b;
  b.id = s.int64(0);
  b.batch_number = s.text(1);
  b.owner = s.int64(2);
  b.created_at = s.text(3);
  b.state = s.text(4) == "open" ? BatchState::Open : BatchState::Closed;
  return b;
}

constexpr const char* kImageColumns =
    "id, batch_id, stored_path, original_filename, content_digest, uploaded_at, result_json, failure_json";

BatchImage read_image(const Statement& s) {
  BatchImage i;
  i.id = s.int64(0);
  i.batch_id = s.int64(1);
  i.stored_path = s.text(2);
  i.original_filename = s.text(3);
  i.content_digest = s.text(4);
  i.uploaded_at = s.text(5);
  i.result_json = s.optional_text(6);
  i.failure_json = s.optional_text(7);
  return i;
}

std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SqliteStore::SqliteStore(fs::path db_path) : path_(std::move(db_path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  Connection c(path_);
  c.exec("PRAGMA journal_mode = WAL");
  c.exec(kSchema);
}

std::optional<User> SqliteStore::create_user(const std::string& name, const std::string& email,
                                             const std::string& password_hash, Role role) {
  Connection c(path_);
  Statement s(c, "INSERT INTO users (name, email, password_hash, role) VALUES (?, ?, ?, ?)");
  s.bind(1, name).bind(2, email).bind(3, password_hash).bind(4, to_string(role));
  bool conflict = false;
  s.step(&conflict);
  if (conflict) return std::nullopt;
  return find_user(sqlite3_last_insert_rowid(c.get()));
}

std::optional<User> SqliteStore::find_user(std::int64_t id) {
  Connection c(path_);
  Statement s(c, (std::string("SELECT ") + kUserColumns + " FROM users WHERE id = ?").c_str());
  s.bind(1, id);
  if (!s.step()) return std::nullopt;
  return read_user(s);
}

std::optional<User> SqliteStore::find_user_by_email(const std::string& email) {
  Connection c(path_);
  Statement s(c, (std::string("SELECT ") + kUserColumns + " FROM users WHERE email = ?").c_str());
  s.bind(1, email);
  if (!s.step()) return std::nullopt;
  return read_user(s);
}

std::vector<UserSummary> SqliteStore::list_users() {
  Connection c(path_);
  Statement s(c,
              "SELECT u.id, u.name, u.email, u.password_hash, u.role, u.status, u.profile_image,"
              " (SELECT COUNT(*) FROM batches b WHERE b.owner = u.id)"
              " FROM users u ORDER BY u.id");
  std::vector<UserSummary> out;
  while (s.step()) out.push_back({read_user(s), s.int64(7)});
  return out;
}

bool SqliteStore::set_user_status(std::int64_t id, UserStatus status) {
  Connection c(path_);
  Statement s(c, "UPDATE users SET status = ? WHERE id = ?");
  s.bind(1, to_string(status)).bind(2, id);
  s.step();
  return sqlite3_changes(c.get()) > 0;
}

void SqliteStore::create_session(const std::string& token, std::int64_t user_id) {
  Connection c(path_);
  Statement s(c, "INSERT INTO sessions (token, user_id, created_unix) VALUES (?, ?, ?)");
  s.bind(1, token).bind(2, user_id).bind(3, unix_now());
  s.step();
}

std::optional<User> SqliteStore::session_user(const std::string& token, std::int64_t max_age_seconds) {
  Connection c(path_);
  Statement s(c,
              "SELECT u.id, u.name, u.email, u.password_hash, u.role, u.status, u.profile_image"
              " FROM sessions s JOIN users u ON u.id = s.user_id"
              " WHERE s.token = ? AND s.created_unix + ? >= ?");
  s.bind(1, token).bind(2, max_age_seconds).bind(3, unix_now());
  if (!s.step()) return std::nullopt;
  return read_user(s);
}

std::optional<Batch> SqliteStore::create_batch(std::int64_t owner) {
  Connection c(path_);
  Transaction tx(c);
  {
    Statement s(c, "INSERT INTO batches (owner, created_at, state) VALUES (?, ?, 'open')");
    s.bind(1, owner).bind(2, utc_timestamp());
    bool conflict = false;
    s.step(&conflict);
    if (conflict) return std::nullopt;
  }
  const std::int64_t id = sqlite3_last_insert_rowid(c.get());
  {
    Statement s(c, "UPDATE batches SET batch_number = printf('B-%06d', id) WHERE id = ?");
    s.bind(1, id);
    s.step();
  }
  Batch b;
  {
    Statement s(c, (std::string("SELECT ") + kBatchColumns + " FROM batches WHERE id = ?").c_str());
    s.bind(1, id);
    s.step();
    b = read_batch(s);
  }
  tx.commit();
  return b;
}

std::optional<Batch> SqliteStore::find_batch(const std::string& batch_number) {
  Connection c(path_);
  Statement s(c, (std::string("SELECT ") + kBatchColumns + " FROM batches WHERE batch_number = ?").c_str());
  s.bind(1, batch_number);
  if (!s.step()) return std::nullopt;
  return read_batch(s);
}

std::vector<Batch> SqliteStore::list_batches() {
  Connection c(path_);
  Statement s(c, (std::string("SELECT ") + kBatchColumns + " FROM batches ORDER BY id").c_str());
  std::vector<Batch> out;
  while (s.step()) out.push_back(read_batch(s));
  return out;
}

bool SqliteStore::close_batch(std::int64_t batch_id) {
  Connection c(path_);
  Statement s(c, "UPDATE batches SET state = 'closed' WHERE id = ? AND state = 'open'");
  s.bind(1, batch_id);
  s.step();
  return sqlite3_changes(c.get()) > 0;
}

std::optional<BatchImage> SqliteStore::add_image(std::int64_t batch_id, const NewImage& image) {
  Connection c(path_);
  Transaction tx(c);
  {
    Statement s(c, "SELECT 1 FROM batches WHERE id = ? AND state = 'open'");
    s.bind(1, batch_id);
    if (!s.step()) return std::nullopt;
  }
  {
    Statement s(c,
                "INSERT INTO images (batch_id, stored_path, original_filename, content_digest, uploaded_at,"
                " result_json, failure_json) VALUES (?, ?, ?, ?, ?, ?, ?)");
    s.bind(1, batch_id)
        .bind(2, image.stored_path)
        .bind(3, image.original_filename)
        .bind(4, image.content_digest)
        .bind(5, utc_timestamp())
        .bind(6, image.result_json)
        .bind(7, image.failure_json);
    s.step();
  }
  BatchImage out;
  {
    Statement s(c, (std::string("SELECT ") + kImageColumns + " FROM images WHERE id = ?").c_str());
    s.bind(1, sqlite3_last_insert_rowid(c.get()));
    s.step();
    out = read_image(s);
  }
  tx.commit();
  return out;
}

std::vector<BatchImage> SqliteStore::list_images(std::int64_t batch_id) {
  Connection c(path_);
  Statement s(c, (std::string("SELECT ") + kImageColumns + " FROM images WHERE batch_id = ? ORDER BY id").c_str());
  s.bind(1, batch_id);
  std::vector<BatchImage> out;
  while (s.step()) out.push_back(read_image(s));
  return out;
}

}  // namespace surgscan::service
