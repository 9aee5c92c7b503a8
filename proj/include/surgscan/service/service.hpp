#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "surgscan/inference/cascade.hpp"
#include "surgscan/service/store.hpp"

namespace surgscan::service {

/// An HTTP-level failure: status code plus the stable error code that goes
/// into the response body.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

struct PipelineConfig {
  int resize_long_side = 640;
  double unsharp_radius = 2.0;
  double unsharp_amount = 1.0;
};

struct BatchStats {
  std::uint64_t total_inspected = 0;
  std::uint64_t defected = 0;
  std::uint64_t non_defected = 0;
  std::map<DefectClass, std::uint64_t> per_defect_class;  // images carrying the class

  friend bool operator==(const BatchStats&, const BatchStats&) = default;
};

/// Pure fold over persisted rows; images with only a failure record are not
/// counted.
BatchStats compute_stats(std::span<const BatchImage> images);

nlohmann::json result_to_json(const inference::InspectionResult& r);
nlohmann::json stats_to_json(const BatchStats& s);

/// Transport-independent service. Each call takes the bearer token and
/// returns the JSON response body, or throws ApiError.
class Service {
 public:
  Service(std::shared_ptr<Store> store, std::shared_ptr<const inference::Cascade> cascade,
          PipelineConfig pipeline, std::filesystem::path image_dir,
          std::int64_t session_ttl_seconds = 12 * 3600);

  nlohmann::json login(const std::string& email, const std::string& password);
  nlohmann::json create_batch(const std::string& token);
  nlohmann::json upload_image(const std::string& token, const std::string& batch_number,
                              std::span<const std::uint8_t> bytes, const std::string& filename);
  nlohmann::json batch_stats(const std::string& token, const std::string& batch_number);
  nlohmann::json close_batch(const std::string& token, const std::string& batch_number);
  nlohmann::json admin_list_users(const std::string& token);
  nlohmann::json admin_set_status(const std::string& token, std::int64_t user_id, const std::string& status);
  nlohmann::json admin_overview(const std::string& token);

  /// Out-of-band account creation (CLI and bootstrap). Throws ApiError 409
  /// when the email is taken.
  User add_user(const std::string& name, const std::string& email, const std::string& password, Role role);

  Store& store() noexcept { return *store_; }

 private:
  User authenticate(const std::string& token);
  User require_admin(const std::string& token);
  Batch require_batch(const std::string& batch_number);
  std::filesystem::path store_image(std::span<const std::uint8_t> bytes, const std::string& digest,
                                    std::string_view extension);

  std::shared_ptr<Store> store_;
  std::shared_ptr<const inference::Cascade> cascade_;
  PipelineConfig pipeline_;
  std::filesystem::path image_dir_;
  std::int64_t session_ttl_seconds_;
};

}  // namespace surgscan::service
