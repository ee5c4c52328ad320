// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chainauth/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "chainauth/errors.hpp"

namespace chainauth {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) fail(Err::Internal, "libsodium init failed");
  });
}

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

KeyPair KeyPair::generate() {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_keypair(kp.public_key.data(), kp.secret_key.data());
  return kp;
}

KeyPair KeyPair::from_seed(const std::array<std::uint8_t, 32>& seed) {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(),
                           seed.data());
  return kp;
}

Signature KeyPair::sign(std::string_view message) const {
  ensure_sodium();
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr,
                       reinterpret_cast<const unsigned char*>(message.data()),
                       message.size(), secret_key.data());
  return sig;
}

std::string KeyPair::public_key_hex() const { return to_hex(public_key); }

bool verify_signature(const PublicKey& key, std::string_view message,
                      const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(
             sig.data(),
             reinterpret_cast<const unsigned char*>(message.data()),
             message.size(), key.data()) == 0;
}

std::array<std::uint8_t, 32> sha256(std::string_view data) {
  ensure_sodium();
  std::array<std::uint8_t, 32> out{};
  crypto_hash_sha256(out.data(),
                     reinterpret_cast<const unsigned char*>(data.data()),
                     data.size());
  return out;
}

std::string random_hex(std::size_t n_bytes) {
  ensure_sodium();
  std::vector<std::uint8_t> buf(n_bytes);
  randombytes_buf(buf.data(), buf.size());
  return to_hex(buf.data(), buf.size());
}

std::string to_hex(const std::uint8_t* data, std::size_t size) {
  std::string out(size * 2, '\0');
  for (std::size_t i = 0; i < size; ++i) {
    out[2 * i] = kHexDigits[data[i] >> 4];
    out[2 * i + 1] = kHexDigits[data[i] & 0x0f];
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) fail(Err::Malformed, "odd-length hex string");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_nibble(hex[2 * i]);
    int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(Err::Malformed, "non-hex character");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

PublicKey public_key_from_hex(std::string_view hex) {
  if (hex.size() != 2 * kPublicKeySize)
    fail(Err::MalformedKey, "public key must be 64 hex characters");
  std::vector<std::uint8_t> bytes;
  try {
    bytes = from_hex(hex);
  } catch (const Error&) {
    fail(Err::MalformedKey, "public key is not valid hex");
  }
  PublicKey key{};
  std::copy(bytes.begin(), bytes.end(), key.begin());
  return key;
}

Signature signature_from_hex(std::string_view hex) {
  if (hex.size() != 2 * kSignatureSize)
    fail(Err::BadSignature, "signature must be 128 hex characters");
  std::vector<std::uint8_t> bytes;
  try {
    bytes = from_hex(hex);
  } catch (const Error&) {
    fail(Err::BadSignature, "signature is not valid hex");
  }
  Signature sig{};
  std::copy(bytes.begin(), bytes.end(), sig.begin());
  return sig;
}

}  // namespace chainauth
