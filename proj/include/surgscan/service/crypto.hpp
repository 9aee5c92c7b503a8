#pragma once

#include <string>
#include <string_view>

namespace surgscan::service {

/// Salted PBKDF2-HMAC-SHA256, encoded as "pbkdf2-sha256$<iterations>$<salt hex>$<digest hex>".
std::string hash_password(std::string_view password, int iterations = 100000);
/// Constant-time comparison against a stored hash; false for malformed input.
bool verify_password(std::string_view password, std::string_view stored);

/// 256 bits from the OS CSPRNG, hex encoded.
std::string random_token();

}  // namespace surgscan::service
