#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/core.hpp"

namespace surgscan::service {

enum class Role { Admin, User };
enum class UserStatus { Active, Inactive };
enum class BatchState { Open, Closed };

std::string_view to_string(Role r);
std::string_view to_string(UserStatus s);
std::string_view to_string(BatchState s);
std::optional<Role> parse_role(std::string_view s);
std::optional<UserStatus> parse_user_status(std::string_view s);

struct User {
  std::int64_t id = 0;
  std::string name;
  std::string email;
  std::string password_hash;
  Role role = Role::User;
  UserStatus status = UserStatus::Active;
  std::optional<std::string> profile_image;
};

struct UserSummary {
  User user;
  std::int64_t batch_count = 0;
};

struct Batch {
  std::int64_t id = 0;
  std::string batch_number;
  std::int64_t owner = 0;
  std::string created_at;
  BatchState state = BatchState::Open;
};

/// One uploaded image. Exactly one of result_json / failure_json is set.
struct BatchImage {
  std::int64_t id = 0;
  std::int64_t batch_id = 0;
  std::string stored_path;
  std::string original_filename;
  std::string content_digest;
  std::string uploaded_at;
  std::optional<std::string> result_json;
  std::optional<std::string> failure_json;
};

struct NewImage {
  std::string stored_path;
  std::string original_filename;
  std::string content_digest;
  std::optional<std::string> result_json;
  std::optional<std::string> failure_json;
};

/// Persistence boundary for the service. Implementations must be safe to
/// call from many threads; every cross-request invariant is enforced here.
class Store {
 public:
  virtual ~Store() = default;

  /// nullopt when the email is already registered.
  virtual std::optional<User> create_user(const std::string& name, const std::string& email,
                                          const std::string& password_hash, Role role) = 0;
  virtual std::optional<User> find_user(std::int64_t id) = 0;
  virtual std::optional<User> find_user_by_email(const std::string& email) = 0;
  virtual std::vector<UserSummary> list_users() = 0;
  /// false when the user does not exist.
  virtual bool set_user_status(std::int64_t id, UserStatus status) = 0;

  virtual void create_session(const std::string& token, std::int64_t user_id) = 0;
  /// The session's user, or nullopt for unknown or expired tokens.
  virtual std::optional<User> session_user(const std::string& token, std::int64_t max_age_seconds) = 0;

  /// New Open batch numbered "B-<6-digit sequence>"; nullopt when the owner
  /// already has an Open batch.
  virtual std::optional<Batch> create_batch(std::int64_t owner) = 0;
  virtual std::optional<Batch> find_batch(const std::string& batch_number) = 0;
  virtual std::vector<Batch> list_batches() = 0;
  /// false when the batch was not Open.
  virtual bool close_batch(std::int64_t batch_id) = 0;

  /// Inserts the row only while the batch is still Open; nullopt otherwise.
  virtual std::optional<BatchImage> add_image(std::int64_t batch_id, const NewImage& image) = 0;
  virtual std::vector<BatchImage> list_images(std::int64_t batch_id) = 0;
};

/// SQLite-backed store. One connection per operation (WAL mode, busy
/// timeout), so concurrent requests share nothing in process.
class SqliteStore : public Store {
 public:
  explicit SqliteStore(std::filesystem::path db_path);

  std::optional<User> create_user(const std::string& name, const std::string& email,
                                  const std::string& password_hash, Role role) override;
  std::optional<User> find_user(std::int64_t id) override;
  std::optional<User> find_user_by_email(const std::string& email) override;
  std::vector<UserSummary> list_users() override;
  bool set_user_status(std::int64_t id, UserStatus status) override;

  void create_session(const std::string& token, std::int64_t user_id) override;
  std::optional<User> session_user(const std::string& token, std::int64_t max_age_seconds) override;

  std::optional<Batch> create_batch(std::int64_t owner) override;
  std::optional<Batch> find_batch(const std::string& batch_number) override;
  std::vector<Batch> list_batches() override;
  bool close_batch(std::int64_t batch_id) override;

  std::optional<BatchImage> add_image(std::int64_t batch_id, const NewImage& image) override;
  std::vector<BatchImage> list_images(std::int64_t batch_id) override;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace surgscan::service
