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

#include "chainauth/errors.hpp"

#include <array>
#include <utility>

namespace chainauth {

namespace {

constexpr std::array<std::pair<Err, std::string_view>, 43> kNames{{
    {Err::BadNonce, "BadNonce"},
    {Err::InsufficientFunds, "InsufficientFunds"},
    {Err::UnknownSender, "UnknownSender"},
    {Err::BadTxSignature, "BadTxSignature"},
    {Err::RangeBeyondHead, "RangeBeyondHead"},
    {Err::NotOperator, "NotOperator"},
    {Err::NotRoot, "NotRoot"},
    {Err::DuplicateTokenId, "DuplicateTokenId"},
    {Err::UnknownToken, "UnknownToken"},
    {Err::FromMismatch, "FromMismatch"},
    {Err::NotAuthorized, "NotAuthorized"},
    {Err::NotReserved, "NotReserved"},
    {Err::NotBeneficiary, "NotBeneficiary"},
    {Err::InsufficientPayment, "InsufficientPayment"},
    {Err::InvalidClaims, "InvalidClaims"},
    {Err::Malformed, "Malformed"},
    {Err::MissingClaim, "MissingClaim"},
    {Err::MalformedKey, "MalformedKey"},
    {Err::Unauthorized, "Unauthorized"},
    {Err::UnknownGrant, "UnknownGrant"},
    {Err::GrantUsed, "GrantUsed"},
    {Err::GrantExpired, "GrantExpired"},
    {Err::GrantMismatch, "GrantMismatch"},
    {Err::BadPoP, "BadPoP"},
    {Err::UnknownIssuer, "UnknownIssuer"},
    {Err::AudienceMismatch, "AudienceMismatch"},
    {Err::Expired, "Expired"},
    {Err::OwnerMismatch, "OwnerMismatch"},
    {Err::MetadataMismatch, "MetadataMismatch"},
    {Err::NotApproved, "NotApproved"},
    {Err::UnknownChallenge, "UnknownChallenge"},
    {Err::ChallengeExpired, "ChallengeExpired"},
    {Err::ChallengeUsed, "ChallengeUsed"},
    {Err::WrongKey, "WrongKey"},
    {Err::BadSignature, "BadSignature"},
    {Err::UnknownSession, "UnknownSession"},
    {Err::SessionExpired, "SessionExpired"},
    {Err::SessionRevoked, "SessionRevoked"},
    {Err::ConfigError, "ConfigError"},
    {Err::BindError, "BindError"},
    {Err::ScenarioFailed, "ScenarioFailed"},
    {Err::Timeout, "Timeout"},
    {Err::Internal, "Internal"},
}};

}  // namespace

std::string_view to_string(Err e) {
  for (const auto& [code, name] : kNames) {
    if (code == e) return name;
  }
  return "Internal";
}

Err err_from_string(std::string_view name) {
  for (const auto& [code, n] : kNames) {
    if (n == name) return code;
  }
  return Err::Internal;
}

}  // namespace chainauth
