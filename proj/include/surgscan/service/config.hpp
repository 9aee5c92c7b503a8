#pragma once

// Service configuration: one JSON file plus environment overrides.
//
// {
//   "host": "127.0.0.1", "port": 8080, "data_dir": "surgscan-data",
//   "session_ttl_seconds": 43200,
//   "pipeline": {"resize_long_side": 640, "unsharp_radius": 2.0, "unsharp_amount": 1.0},
//   "cascade": {"instrument_threshold": 0.5, "defect_threshold": 0.5},
//   "backends": {"kind": "stub", "fixture_dirs": ["fixtures"]},
//   "bootstrap_admin": {"name": "Admin", "email": "admin@example.com", "password": "..."}
// }
//
// Process backends instead of stubs:
//   "backends": {"kind": "process", "timeout_ms": 30000,
//                "instrument": "python3 infer.py --stage instrument",
//                "defect": {"Scissors": "python3 infer.py --model scissors", ...}}
//
// Environment: SURGSCAN_HOST, SURGSCAN_PORT, SURGSCAN_DATA_DIR,
// SURGSCAN_RESIZE_LONG_SIDE, SURGSCAN_UNSHARP_RADIUS, SURGSCAN_UNSHARP_AMOUNT,
// SURGSCAN_INSTRUMENT_THRESHOLD, SURGSCAN_DEFECT_THRESHOLD,
// SURGSCAN_BACKENDS (stub|process), SURGSCAN_FIXTURE_DIRS (':'-separated),
// SURGSCAN_ADMIN_NAME, SURGSCAN_ADMIN_EMAIL, SURGSCAN_ADMIN_PASSWORD.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "surgscan/inference/cascade.hpp"
#include "surgscan/service/service.hpp"

namespace surgscan::service {

struct BackendConfig {
  std::string kind = "stub";
  std::vector<std::filesystem::path> fixture_dirs;
  std::string instrument_command;
  std::map<InstrumentClass, std::string> defect_commands;
  int timeout_ms = 30000;
};

struct BootstrapAdmin {
  std::string name = "Administrator";
  std::string email;
  std::string password;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "surgscan-data";
  std::int64_t session_ttl_seconds = 12 * 3600;
  PipelineConfig pipeline;
  double instrument_threshold = 0.50;
  double defect_threshold = 0.50;
  BackendConfig backends;
  std::optional<BootstrapAdmin> bootstrap_admin;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Throws InvalidConfig on unknown keys or wrong types.
ServiceConfig config_from_json(const nlohmann::json& j);
ServiceConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env = process_env);
void apply_env_overrides(ServiceConfig& cfg, const EnvLookup& env);

/// Effective configuration with the admin password redacted.
nlohmann::json config_to_json(const ServiceConfig& cfg);

/// Registry plus validated cascade for the configured backends.
std::shared_ptr<const inference::Cascade> build_cascade(const ServiceConfig& cfg);

/// Store under data_dir/surgscan.db, images under data_dir/images, and the
/// bootstrap admin created when no account has that email yet.
std::shared_ptr<Service> build_service(const ServiceConfig& cfg);

}  // namespace surgscan::service
