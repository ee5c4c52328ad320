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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chainauth {

// The JWT payload used throughout the system. `sub` and `cnf.kid` carry a
// hex public key (or an 0x address for reserved tokens); `jti` equals the
// ledger token identifier.
struct ClaimSet {
  std::string iss;
  std::string sub;
  std::string aud;
  std::string jti;
  std::int64_t exp = 0;
  std::optional<std::string> cnf_kid;

  bool operator==(const ClaimSet&) const = default;
};

// Canonical compact serialization: header {"alg":"none","typ":"JWT"}, payload
// with fixed key order (iss, sub, aud, jti, exp, cnf), no insignificant
// whitespace, unpadded base64url segments, empty signature part. Equal claim
// sets always produce byte-identical strings.
std::string encode_jwt(const ClaimSet& claims);  // throws InvalidClaims

// Parses and validates a compact JWT. Throws Malformed for structural
// problems and MissingClaim when a mandatory claim is absent.
ClaimSet decode_jwt(std::string_view jwt);

// Canonical re-encoding with the cnf claim removed; identity when absent.
std::string strip_cnf(std::string_view jwt);  // throws Malformed/MissingClaim

bool is_valid_token_id(std::string_view id);  // 64 lowercase hex chars

// Result of token issuance/reservation: the JWT plus its ledger anchor.
struct IssuedToken {
  std::string jwt;
  std::string token_id;
  std::int64_t included_block = 0;
};

}  // namespace chainauth
