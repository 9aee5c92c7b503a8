#include "surgscan/service/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "surgscan/core.hpp"

namespace surgscan::service {

namespace {

constexpr std::string_view kScheme = "pbkdf2-sha256";

std::string to_hex(const std::uint8_t* p, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kDigits[p[i] >> 4];
    out[2 * i + 1] = kDigits[p[i] & 0xF];
  }
  return out;
}

bool from_hex(std::string_view hex, std::vector<std::uint8_t>& out) {
  if (hex.size() % 2 != 0) return false;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  out.clear();
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return false;
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return true;
}

std::vector<std::uint8_t> random_bytes(std::size_t n) {
  std::vector<std::uint8_t> buf(n);
  if (RAND_bytes(buf.data(), static_cast<int>(n)) != 1) {
    throw Error(Errc::IoFailure, "system random source unavailable");
  }
  return buf;
}

std::vector<std::uint8_t> derive(std::string_view password, const std::vector<std::uint8_t>& salt,
                                 int iterations) {
  std::vector<std::uint8_t> out(32);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), iterations, EVP_sha256(),
                        static_cast<int>(out.size()), out.data()) != 1) {
    throw Error(Errc::IoFailure, "password derivation failed");
  }
  return out;
}

}  // namespace

std::string hash_password(std::string_view password, int iterations) {
  if (iterations < 1) throw Error(Errc::InvalidArgument, "iterations must be positive");
  const auto salt = random_bytes(16);
  const auto digest = derive(password, salt, iterations);
  return std::string(kScheme) + "$" + std::to_string(iterations) + "$" + to_hex(salt.data(), salt.size()) +
         "$" + to_hex(digest.data(), digest.size());
}

bool verify_password(std::string_view password, std::string_view stored) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = stored.find('$', start);
    parts.push_back(stored.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 4 || parts[0] != kScheme) return false;
  const std::string iter_text(parts[1]);
  char* end = nullptr;
  const long iterations = std::strtol(iter_text.c_str(), &end, 10);
  if (iter_text.empty() || *end != '\0' || iterations < 1 || iterations > 10'000'000) return false;
  std::vector<std::uint8_t> salt, expected;
  if (!from_hex(parts[2], salt) || !from_hex(parts[3], expected) || expected.size() != 32) return false;
  const auto actual = derive(password, salt, static_cast<int>(iterations));
  return CRYPTO_memcmp(actual.data(), expected.data(), expected.size()) == 0;
}

std::string random_token() {
  const auto bytes = random_bytes(32);
  return to_hex(bytes.data(), bytes.size());
}

}  // namespace surgscan::service
