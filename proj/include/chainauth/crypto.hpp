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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chainauth {

// Ed25519 keys and signatures (libsodium). The same key pair signs ledger
// transactions and proof-of-possession challenges.
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSecretKeySize = 64;
inline constexpr std::size_t kSignatureSize = 64;

using PublicKey = std::array<std::uint8_t, kPublicKeySize>;
using SecretKey = std::array<std::uint8_t, kSecretKeySize>;
using Signature = std::array<std::uint8_t, kSignatureSize>;

struct KeyPair {
  PublicKey public_key{};
  SecretKey secret_key{};

  static KeyPair generate();
  // Deterministic key pair from a 32-byte seed; used by tests and demos.
  static KeyPair from_seed(const std::array<std::uint8_t, 32>& seed);

  Signature sign(std::string_view message) const;
  std::string public_key_hex() const;
};

bool verify_signature(const PublicKey& key, std::string_view message,
                      const Signature& sig);

std::array<std::uint8_t, 32> sha256(std::string_view data);

// Uniform random bytes rendered as lowercase hex (2*n characters).
std::string random_hex(std::size_t n_bytes);

std::string to_hex(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> from_hex(std::string_view hex);  // throws Malformed

template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& a) {
  return to_hex(a.data(), N);
}

PublicKey public_key_from_hex(std::string_view hex);    // throws MalformedKey
Signature signature_from_hex(std::string_view hex);     // throws BadSignature

}  // namespace chainauth
