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

#include "chainauth/address.hpp"

#include <algorithm>

#include "chainauth/errors.hpp"

namespace chainauth {

Address Address::from_public_key(const PublicKey& key) {
  auto digest = sha256(std::string_view(
      reinterpret_cast<const char*>(key.data()), key.size()));
  Address addr;
  std::copy(digest.begin() + (digest.size() - kSize), digest.end(),
            addr.bytes_.begin());
  return addr;
}

Address Address::from_hex(std::string_view hex) {
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X'))
    hex.remove_prefix(2);
  if (hex.size() != 2 * kSize)
    fail(Err::Malformed, "address must be 40 hex characters");
  auto bytes = chainauth::from_hex(hex);
  Address addr;
  std::copy(bytes.begin(), bytes.end(), addr.bytes_.begin());
  return addr;
}

std::string Address::to_hex() const {
  return "0x" + chainauth::to_hex(bytes_.data(), bytes_.size());
}

bool Address::is_zero() const {
  return std::all_of(bytes_.begin(), bytes_.end(),
                     [](std::uint8_t b) { return b == 0; });
}

Address subject_to_address(std::string_view subject) {
  if (subject.rfind("0x", 0) == 0) return Address::from_hex(subject);
  if (subject.size() == 2 * kPublicKeySize) {
    PublicKey key{};
    try {
      key = public_key_from_hex(subject);
    } catch (const Error&) {
      fail(Err::Malformed, "subject is neither an address nor a public key");
    }
    return Address::from_public_key(key);
  }
  fail(Err::Malformed, "subject is neither an address nor a public key");
}

}  // namespace chainauth
