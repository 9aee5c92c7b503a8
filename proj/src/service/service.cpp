#include "surgscan/service/service.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "surgscan/codec.hpp"
#include "surgscan/service/crypto.hpp"

namespace surgscan::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json user_to_json(const User& u) {
  return {{"id", u.id},
          {"name", u.name},
          {"email", u.email},
          {"role", to_string(u.role)},
          {"status", to_string(u.status)}};
}

json batch_to_json(const Batch& b) {
  return {{"batch_number", b.batch_number},
          {"owner_id", b.owner},
          {"created_at", b.created_at},
          {"state", to_string(b.state)}};
}

json failure_json(std::string_view code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

}  // namespace

json result_to_json(const inference::InspectionResult& r) {
  json defects = json::array();
  for (const auto& d : r.defects) defects.push_back({{"class", to_string(d.defect)}, {"confidence", d.confidence}});
  return {{"instrument", to_string(r.instrument)},
          {"instrument_confidence", r.instrument_confidence},
          {"overall", inference::to_string(r.overall)},
          {"defects", std::move(defects)},
          {"instrument_backend_id", r.instrument_backend_id},
          {"defect_backend_id", r.defect_backend_id},
          {"timings_ms", {{"instrument", r.instrument_ms}, {"defect", r.defect_ms}}}};
}

BatchStats compute_stats(std::span<const BatchImage> images) {
  BatchStats s;
  for (DefectClass d : kAllDefects) {
    if (d != DefectClass::NonDefective) s.per_defect_class[d] = 0;
  }
  for (const auto& img : images) {
    if (!img.result_json) continue;
    const json r = json::parse(*img.result_json);
    ++s.total_inspected;
    if (r.at("overall").get<std::string>() == inference::to_string(inference::Overall::Defective)) {
      ++s.defected;
    } else {
      ++s.non_defected;
    }
    std::vector<DefectClass> seen;
    for (const auto& d : r.at("defects")) {
      const DefectClass c = parse_defect(d.at("class").get<std::string>());
      if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
      seen.push_back(c);
      ++s.per_defect_class[c];
    }
  }
  return s;
}

json stats_to_json(const BatchStats& s) {
  json per_class = json::object();
  for (const auto& [c, n] : s.per_defect_class) per_class[std::string(to_string(c))] = n;
  return {{"total_inspected", s.total_inspected},
          {"defected", s.defected},
          {"non_defected", s.non_defected},
          {"per_defect_class", std::move(per_class)}};
}

Service::Service(std::shared_ptr<Store> store, std::shared_ptr<const inference::Cascade> cascade,
                 PipelineConfig pipeline, fs::path image_dir, std::int64_t session_ttl_seconds)
    : store_(std::move(store)),
      cascade_(std::move(cascade)),
      pipeline_(pipeline),
      image_dir_(std::move(image_dir)),
      session_ttl_seconds_(session_ttl_seconds) {
  if (!store_ || !cascade_) throw Error(Errc::InvalidConfig, "service needs a store and a cascade");
  if (pipeline_.resize_long_side < 1) throw Error(Errc::InvalidConfig, "resize_long_side must be positive");
  if (pipeline_.unsharp_radius <= 0.0 || pipeline_.unsharp_amount < 0.0) {
    throw Error(Errc::InvalidConfig, "unsharp radius must be positive and amount non-negative");
  }
  fs::create_directories(image_dir_);
}

User Service::add_user(const std::string& name, const std::string& email, const std::string& password,
                       Role role) {
  if (name.empty() || email.empty() || password.empty()) {
    throw ApiError(400, "BadRequest", "name, email and password are required");
  }
  auto user = store_->create_user(name, email, hash_password(password), role);
  if (!user) throw ApiError(409, "EmailTaken", "email already registered: " + email);
  return *user;
}

User Service::authenticate(const std::string& token) {
  if (token.empty()) throw ApiError(401, "Unauthenticated", "missing bearer token");
  auto user = store_->session_user(token, session_ttl_seconds_);
  if (!user) throw ApiError(401, "Unauthenticated", "invalid or expired token");
  if (user->status != UserStatus::Active) throw ApiError(403, "InactiveAccount", "account is inactive");
  return *user;
}

User Service::require_admin(const std::string& token) {
  User u = authenticate(token);
  if (u.role != Role::Admin) throw ApiError(403, "NonAdmin", "admin role required");
  return u;
}

Batch Service::require_batch(const std::string& batch_number) {
  auto b = store_->find_batch(batch_number);
  if (!b) throw ApiError(404, "UnknownBatch", "no batch " + batch_number);
  return *b;
}

json Service::login(const std::string& email, const std::string& password) {
  auto user = store_->find_user_by_email(email);
  if (!user || !verify_password(password, user->password_hash)) {
    throw ApiError(401, "InvalidCredentials", "email or password is incorrect");
  }
  if (user->status != UserStatus::Active) throw ApiError(403, "InactiveAccount", "account is inactive");
  const std::string token = random_token();
  store_->create_session(token, user->id);
  return {{"token", token}, {"role", to_string(user->role)}, {"user", user_to_json(*user)}};
}

json Service::create_batch(const std::string& token) {
  const User u = authenticate(token);
  auto b = store_->create_batch(u.id);
  if (!b) throw ApiError(409, "AlreadyAssigned", "caller already owns an open batch");
  return batch_to_json(*b);
}

fs::path Service::store_image(std::span<const std::uint8_t> bytes, const std::string& digest,
                              std::string_view extension) {
  const fs::path dir = image_dir_ / digest.substr(0, 2);
  const fs::path target = dir / (digest + std::string(extension));
  if (fs::exists(target)) return target;
  fs::create_directories(dir);
  std::ostringstream tmp_name;
  tmp_name << digest << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = dir / tmp_name.str();
  imaging::write_file_bytes(tmp, bytes);
  fs::rename(tmp, target);
  return target;
}

json Service::upload_image(const std::string& token, const std::string& batch_number,
                           std::span<const std::uint8_t> bytes, const std::string& filename) {
  const User u = authenticate(token);
  const Batch b = require_batch(batch_number);
  if (b.owner != u.id) throw ApiError(403, "NotOwner", "batch " + batch_number + " belongs to another user");
  if (b.state != BatchState::Open) throw ApiError(409, "BatchClosed", "batch " + batch_number + " is closed");

  imaging::Raster raster;
  const auto format = imaging::sniff_format(bytes);
  try {
    if (format == imaging::ImageFormat::Unknown) throw Error(Errc::BadImage, "not a PNG or JPEG image");
    raster = imaging::decode_image(bytes);
  } catch (const Error& e) {
    throw ApiError(400, "BadImage", e.what());
  }

  const std::string digest = inference::sha256_hex(bytes);
  const fs::path stored = store_image(bytes, digest, format == imaging::ImageFormat::Png ? ".png" : ".jpg");

  raster = imaging::resize_preserve_aspect(raster, pipeline_.resize_long_side);
  raster = imaging::unsharp_mask(raster, pipeline_.unsharp_radius, pipeline_.unsharp_amount);

  NewImage row{stored.string(), filename, digest, std::nullopt, std::nullopt};
  std::optional<ApiError> server_error;
  json result = nullptr;
  json failure = nullptr;
  try {
    const auto r = cascade_->inspect(inference::InspectionInput{raster, {}, digest});
    result = result_to_json(r);
    row.result_json = result.dump();
  } catch (const inference::LowConfidenceError& e) {
    failure = failure_json(errc_name(e.code()), e.what());
    failure["verdict"] = {{"label", e.verdict().label}, {"confidence", e.verdict().confidence}};
  } catch (const Error& e) {
    failure = failure_json(errc_name(e.code()), e.what());
    server_error.emplace(500, "InspectionFailed", std::string("inspection failed: ") + e.what());
  }
  if (!failure.is_null()) row.failure_json = failure.dump();

  auto image = store_->add_image(b.id, row);
  if (!image) throw ApiError(409, "BatchClosed", "batch " + batch_number + " was closed during upload");
  if (server_error) throw *server_error;

  return {{"image",
           {{"id", image->id},
            {"original_filename", image->original_filename},
            {"stored_path", image->stored_path},
            {"content_digest", image->content_digest},
            {"uploaded_at", image->uploaded_at}}},
          {"batch_number", b.batch_number},
          {"result", result},
          {"failure", failure}};
}

json Service::batch_stats(const std::string& token, const std::string& batch_number) {
  const User u = authenticate(token);
  const Batch b = require_batch(batch_number);
  if (b.owner != u.id && u.role != Role::Admin) {
    throw ApiError(403, "Forbidden", "batch " + batch_number + " belongs to another user");
  }
  const auto images = store_->list_images(b.id);
  json out = batch_to_json(b);
  out.update(stats_to_json(compute_stats(images)));
  std::size_t failures = 0;
  for (const auto& img : images) failures += img.failure_json.has_value();
  out["failed"] = failures;
  return out;
}

json Service::close_batch(const std::string& token, const std::string& batch_number) {
  const User u = authenticate(token);
  const Batch b = require_batch(batch_number);
  if (b.owner != u.id && u.role != Role::Admin) {
    throw ApiError(403, "Forbidden", "batch " + batch_number + " belongs to another user");
  }
  if (!store_->close_batch(b.id)) throw ApiError(409, "BatchClosed", "batch " + batch_number + " is already closed");
  return batch_to_json(require_batch(batch_number));
}

json Service::admin_list_users(const std::string& token) {
  require_admin(token);
  json rows = json::array();
  for (const auto& s : store_->list_users()) {
    json row = user_to_json(s.user);
    row["batch_count"] = s.batch_count;
    rows.push_back(std::move(row));
  }
  return {{"users", std::move(rows)}};
}

json Service::admin_set_status(const std::string& token, std::int64_t user_id, const std::string& status) {
  const User admin = require_admin(token);
  const auto parsed = parse_user_status(status);
  if (!parsed) throw ApiError(400, "BadRequest", "status must be 'active' or 'inactive'");
  if (user_id == admin.id && *parsed == UserStatus::Inactive) {
    throw ApiError(400, "BadRequest", "admins cannot deactivate their own account");
  }
  if (!store_->set_user_status(user_id, *parsed)) {
    throw ApiError(404, "UnknownUser", "no user with id " + std::to_string(user_id));
  }
  return user_to_json(*store_->find_user(user_id));
}

json Service::admin_overview(const std::string& token) {
  require_admin(token);
  std::map<std::int64_t, std::string> owner_names;
  for (const auto& s : store_->list_users()) owner_names[s.user.id] = s.user.name;
  json rows = json::array();
  BatchStats totals;
  for (const auto& b : store_->list_batches()) {
    const auto stats = compute_stats(store_->list_images(b.id));
    totals.total_inspected += stats.total_inspected;
    totals.defected += stats.defected;
    totals.non_defected += stats.non_defected;
    for (const auto& [c, n] : stats.per_defect_class) totals.per_defect_class[c] += n;
    json row = batch_to_json(b);
    row["owner_name"] = owner_names[b.owner];
    row.update(stats_to_json(stats));
    rows.push_back(std::move(row));
  }
  if (totals.per_defect_class.empty()) totals = compute_stats({});
  return {{"batches", std::move(rows)}, {"totals", stats_to_json(totals)}};
}

}  // namespace surgscan::service
