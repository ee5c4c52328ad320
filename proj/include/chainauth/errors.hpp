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

#include <stdexcept>
#include <string>
#include <string_view>

namespace chainauth {

enum class Err {
  // ledger
  BadNonce,
  InsufficientFunds,
  UnknownSender,
  BadTxSignature,
  RangeBeyondHead,
  // registry
  NotOperator,
  NotRoot,
  DuplicateTokenId,
  UnknownToken,
  FromMismatch,
  NotAuthorized,
  NotReserved,
  NotBeneficiary,
  InsufficientPayment,
  // token format
  InvalidClaims,
  Malformed,
  MissingClaim,
  // auth server
  MalformedKey,
  Unauthorized,
  UnknownGrant,
  GrantUsed,
  GrantExpired,
  GrantMismatch,
  BadPoP,
  // resource server
  UnknownIssuer,
  AudienceMismatch,
  Expired,
  OwnerMismatch,
  MetadataMismatch,
  NotApproved,
  UnknownChallenge,
  ChallengeExpired,
  ChallengeUsed,
  WrongKey,
  BadSignature,
  UnknownSession,
  SessionExpired,
  SessionRevoked,
  // process entry points
  ConfigError,
  BindError,
  ScenarioFailed,
  // transport / misc
  Timeout,
  Internal,
};

std::string_view to_string(Err e);

// Round-trips an error name received over the wire; unknown names map to
// Err::Internal.
Err err_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(Err code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  explicit Error(Err code)
      : std::runtime_error(std::string(to_string(code))), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, std::string message) {
  throw Error(code, std::move(message));
}

}  // namespace chainauth
