#include "surgscan/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "surgscan/inference/process_backend.hpp"
#include "surgscan/inference/stub_backend.hpp"
#include "surgscan/service/store.hpp"

namespace surgscan::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(Errc::InvalidConfig, where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw Error(Errc::InvalidConfig, "unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::InvalidConfig, "config key '" + where + key + "' has the wrong type");
  }
}

int parse_int(const std::string& name, const std::string& v) {
  char* end = nullptr;
  const long n = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw Error(Errc::InvalidConfig, name + " is not an integer: " + v);
  return static_cast<int>(n);
}

double parse_double(const std::string& name, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw Error(Errc::InvalidConfig, name + " is not a number: " + v);
  return d;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

ServiceConfig config_from_json(const json& j) {
  ServiceConfig cfg;
  reject_unknown(j,
                 {"host", "port", "data_dir", "session_ttl_seconds", "pipeline", "cascade", "backends",
                  "bootstrap_admin"},
                 "");
  read(j, "host", cfg.host, "");
  read(j, "port", cfg.port, "");
  std::string data_dir = cfg.data_dir.string();
  read(j, "data_dir", data_dir, "");
  cfg.data_dir = data_dir;
  read(j, "session_ttl_seconds", cfg.session_ttl_seconds, "");
  if (j.contains("pipeline")) {
    const auto& p = j.at("pipeline");
    reject_unknown(p, {"resize_long_side", "unsharp_radius", "unsharp_amount"}, "pipeline.");
    read(p, "resize_long_side", cfg.pipeline.resize_long_side, "pipeline.");
    read(p, "unsharp_radius", cfg.pipeline.unsharp_radius, "pipeline.");
    read(p, "unsharp_amount", cfg.pipeline.unsharp_amount, "pipeline.");
  }
  if (j.contains("cascade")) {
    const auto& c = j.at("cascade");
    reject_unknown(c, {"instrument_threshold", "defect_threshold"}, "cascade.");
    read(c, "instrument_threshold", cfg.instrument_threshold, "cascade.");
    read(c, "defect_threshold", cfg.defect_threshold, "cascade.");
  }
  if (j.contains("backends")) {
    const auto& b = j.at("backends");
    reject_unknown(b, {"kind", "fixture_dirs", "instrument", "defect", "timeout_ms"}, "backends.");
    read(b, "kind", cfg.backends.kind, "backends.");
    std::vector<std::string> dirs;
    read(b, "fixture_dirs", dirs, "backends.");
    cfg.backends.fixture_dirs.assign(dirs.begin(), dirs.end());
    read(b, "instrument", cfg.backends.instrument_command, "backends.");
    read(b, "timeout_ms", cfg.backends.timeout_ms, "backends.");
    if (b.contains("defect")) {
      std::map<std::string, std::string> defect;
      read(b, "defect", defect, "backends.");
      for (const auto& [name, cmd] : defect) {
        const auto c = try_parse_instrument(name);
        if (!c) throw Error(Errc::InvalidConfig, "backends.defect: unknown instrument '" + name + "'");
        cfg.backends.defect_commands[*c] = cmd;
      }
    }
  }
  if (j.contains("bootstrap_admin")) {
    const auto& a = j.at("bootstrap_admin");
    reject_unknown(a, {"name", "email", "password"}, "bootstrap_admin.");
    BootstrapAdmin admin;
    read(a, "name", admin.name, "bootstrap_admin.");
    read(a, "email", admin.email, "bootstrap_admin.");
    read(a, "password", admin.password, "bootstrap_admin.");
    cfg.bootstrap_admin = admin;
  }
  return cfg;
}

void apply_env_overrides(ServiceConfig& cfg, const EnvLookup& env) {
  if (auto v = env("SURGSCAN_HOST")) cfg.host = *v;
  if (auto v = env("SURGSCAN_PORT")) cfg.port = parse_int("SURGSCAN_PORT", *v);
  if (auto v = env("SURGSCAN_DATA_DIR")) cfg.data_dir = *v;
  if (auto v = env("SURGSCAN_RESIZE_LONG_SIDE")) {
    cfg.pipeline.resize_long_side = parse_int("SURGSCAN_RESIZE_LONG_SIDE", *v);
  }
  if (auto v = env("SURGSCAN_UNSHARP_RADIUS")) {
    cfg.pipeline.unsharp_radius = parse_double("SURGSCAN_UNSHARP_RADIUS", *v);
  }
  if (auto v = env("SURGSCAN_UNSHARP_AMOUNT")) {
    cfg.pipeline.unsharp_amount = parse_double("SURGSCAN_UNSHARP_AMOUNT", *v);
  }
  if (auto v = env("SURGSCAN_INSTRUMENT_THRESHOLD")) {
    cfg.instrument_threshold = parse_double("SURGSCAN_INSTRUMENT_THRESHOLD", *v);
  }
  if (auto v = env("SURGSCAN_DEFECT_THRESHOLD")) {
    cfg.defect_threshold = parse_double("SURGSCAN_DEFECT_THRESHOLD", *v);
  }
  if (auto v = env("SURGSCAN_BACKENDS")) cfg.backends.kind = *v;
  if (auto v = env("SURGSCAN_FIXTURE_DIRS")) {
    cfg.backends.fixture_dirs.clear();
    std::size_t start = 0;
    while (start <= v->size()) {
      const auto pos = v->find(':', start);
      const std::string part = v->substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      if (!part.empty()) cfg.backends.fixture_dirs.emplace_back(part);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  auto email = env("SURGSCAN_ADMIN_EMAIL");
  auto password = env("SURGSCAN_ADMIN_PASSWORD");
  if (email || password) {
    BootstrapAdmin admin = cfg.bootstrap_admin.value_or(BootstrapAdmin{});
    if (email) admin.email = *email;
    if (password) admin.password = *password;
    cfg.bootstrap_admin = admin;
  }
  if (auto v = env("SURGSCAN_ADMIN_NAME"); v && cfg.bootstrap_admin) cfg.bootstrap_admin->name = *v;
}

ServiceConfig load_config(const std::optional<fs::path>& file, const EnvLookup& env) {
  ServiceConfig cfg;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(Errc::IoFailure, "cannot read config " + file->string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(Errc::InvalidConfig, "config " + file->string() + ": " + e.what());
    }
    cfg = config_from_json(j);
  }
  apply_env_overrides(cfg, env);
  return cfg;
}

json config_to_json(const ServiceConfig& cfg) {
  std::vector<std::string> dirs;
  for (const auto& d : cfg.backends.fixture_dirs) dirs.push_back(d.string());
  json defect = json::object();
  for (const auto& [c, cmd] : cfg.backends.defect_commands) defect[std::string(to_string(c))] = cmd;
  json out = {{"host", cfg.host},
              {"port", cfg.port},
              {"data_dir", cfg.data_dir.string()},
              {"session_ttl_seconds", cfg.session_ttl_seconds},
              {"pipeline",
               {{"resize_long_side", cfg.pipeline.resize_long_side},
                {"unsharp_radius", cfg.pipeline.unsharp_radius},
                {"unsharp_amount", cfg.pipeline.unsharp_amount}}},
              {"cascade",
               {{"instrument_threshold", cfg.instrument_threshold},
                {"defect_threshold", cfg.defect_threshold}}},
              {"backends",
               {{"kind", cfg.backends.kind},
                {"fixture_dirs", dirs},
                {"instrument", cfg.backends.instrument_command},
                {"defect", defect},
                {"timeout_ms", cfg.backends.timeout_ms}}}};
  if (cfg.bootstrap_admin) {
    out["bootstrap_admin"] = {{"name", cfg.bootstrap_admin->name},
                              {"email", cfg.bootstrap_admin->email},
                              {"password", "<redacted>"}};
  }
  return out;
}

std::shared_ptr<const inference::Cascade> build_cascade(const ServiceConfig& cfg) {
  auto registry = std::make_shared<inference::BackendRegistry>();
  inference::CascadeConfig cascade;
  cascade.instrument_threshold = cfg.instrument_threshold;
  cascade.defect_threshold = cfg.defect_threshold;
  if (cfg.backends.kind == "stub") {
    auto index = std::make_shared<inference::FixtureTagIndex>(cfg.backends.fixture_dirs);
    inference::register_stub_backends(*registry, cascade, index);
  } else if (cfg.backends.kind == "process") {
    if (cfg.backends.instrument_command.empty()) {
      throw Error(Errc::InvalidConfig, "process backends need an instrument command");
    }
    if (cfg.backends.timeout_ms <= 0) throw Error(Errc::InvalidConfig, "backends.timeout_ms must be positive");
    const std::chrono::milliseconds timeout(cfg.backends.timeout_ms);
    registry->register_backend("process-instrument", inference::BackendKind::stage1(),
                               std::make_shared<inference::ProcessBackend>(cfg.backends.instrument_command, timeout));
    cascade.instrument_backend = "process-instrument";
    for (const auto& [c, cmd] : cfg.backends.defect_commands) {
      const std::string id = "process-defect-" + std::string(to_string(c));
      registry->register_backend(id, inference::BackendKind::stage2(c),
                                 std::make_shared<inference::ProcessBackend>(cmd, timeout));
      cascade.defect_backends[c] = id;
    }
  } else {
    throw Error(Errc::InvalidConfig, "unknown backend kind '" + cfg.backends.kind + "' (expected stub or process)");
  }
  return std::make_shared<inference::Cascade>(registry, cascade);
}

std::shared_ptr<Service> build_service(const ServiceConfig& cfg) {
  fs::create_directories(cfg.data_dir);
  auto store = std::make_shared<SqliteStore>(cfg.data_dir / "surgscan.db");
  auto service = std::make_shared<Service>(store, build_cascade(cfg), cfg.pipeline, cfg.data_dir / "images",
                                           cfg.session_ttl_seconds);
  if (cfg.bootstrap_admin && !cfg.bootstrap_admin->email.empty()) {
    if (cfg.bootstrap_admin->password.empty()) {
      throw Error(Errc::InvalidConfig, "bootstrap admin needs a password");
    }
    if (!store->find_user_by_email(cfg.bootstrap_admin->email)) {
      service->add_user(cfg.bootstrap_admin->name, cfg.bootstrap_admin->email, cfg.bootstrap_admin->password,
                        Role::Admin);
    }
  }
  return service;
}

}  // namespace surgscan::service
