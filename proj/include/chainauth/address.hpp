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
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "chainauth/crypto.hpp"

namespace chainauth {

// 20-byte account identifier: the last 20 bytes of SHA-256 over the raw
// public key. Rendered externally as 0x-prefixed lowercase hex.
class Address {
 public:
  static constexpr std::size_t kSize = 20;

  Address() = default;  // zero address (mint source / burn sink)

  static Address from_public_key(const PublicKey& key);
  static Address from_hex(std::string_view hex);  // throws Malformed
  static Address zero() { return Address{}; }

  std::string to_hex() const;
  bool is_zero() const;

  const std::array<std::uint8_t, kSize>& bytes() const { return bytes_; }
  std::array<std::uint8_t, kSize>& bytes() { return bytes_; }

  auto operator<=>(const Address&) const = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

// Resolves a JWT `sub` / `cnf.kid` value to an address: either an
// 0x-prefixed address literal or a hex-encoded public key.
Address subject_to_address(std::string_view subject);  // throws Malformed

}  // namespace chainauth
