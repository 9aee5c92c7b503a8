#include "surgscan/inference/backend.hpp"

#include <cstdio>
#include <exception>

#include <openssl/evp.h>

namespace surgscan::inference {

void BackendRegistry::register_backend(std::string id, BackendKind kind,
                                       std::shared_ptr<ClassifierBackend> impl) {
  if (id.empty()) throw Error(Errc::InvalidArgument, "backend id must not be empty");
  if (!impl) throw Error(Errc::InvalidArgument, "backend '" + id + "' has no implementation");
  if (kind.stage == Stage::Defect && !kind.instrument) {
    throw Error(Errc::InvalidArgument, "stage-2 backend '" + id + "' needs an instrument");
  }
  if (entries_.contains(id)) throw Error(Errc::DuplicateBackend, "backend '" + id + "' already registered");
  std::unique_ptr<std::mutex> lock;
  if (!impl->concurrency_safe()) lock = std::make_unique<std::mutex>();
  entries_.emplace(std::move(id), Entry{kind, std::move(impl), std::move(lock)});
}

bool BackendRegistry::contains(std::string_view id) const { return entries_.find(id) != entries_.end(); }

const BackendRegistry::Entry& BackendRegistry::entry(std::string_view id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(Errc::UnregisteredBackend, "backend '" + std::string(id) + "' is not registered");
  }
  return it->second;
}

std::shared_ptr<ClassifierBackend> BackendRegistry::resolve(std::string_view id) const {
  return entry(id).impl;
}

const BackendKind& BackendRegistry::kind(std::string_view id) const { return entry(id).kind; }

std::vector<ClassifierVerdict> BackendRegistry::invoke(std::string_view id,
                                                       const InspectionInput& input) const {
  const Entry& e = entry(id);
  try {
    if (e.lock) {
      std::lock_guard guard(*e.lock);
      return e.impl->run(input);
    }
    return e.impl->run(input);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error(Errc::BackendFailure, "backend '" + std::string(id) + "': " + ex.what());
  }
}

std::vector<std::string> BackendRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
    throw Error(Errc::IoFailure, "sha256 failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace surgscan::inference
