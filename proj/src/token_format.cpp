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

#include "chainauth/token_format.hpp"

#include <nlohmann/json.hpp>

#include "chainauth/base64url.hpp"
#include "chainauth/errors.hpp"

namespace chainauth {

namespace {

constexpr std::string_view kHeaderJson = R"({"alg":"none","typ":"JWT"})";

bool all_lower_hex(std::string_view s) {
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

std::string require_string(const nlohmann::json& payload, const char* name) {
  auto it = payload.find(name);
  if (it == payload.end())
    fail(Err::MissingClaim, std::string("missing claim: ") + name);
  if (!it->is_string() || it->get_ref<const std::string&>().empty())
    fail(Err::Malformed, std::string("claim must be a non-empty string: ") + name);
  return it->get<std::string>();
}

}  // namespace

bool is_valid_token_id(std::string_view id) {
  return id.size() == 64 && all_lower_hex(id);
}

std::string encode_jwt(const ClaimSet& claims) {
  if (claims.iss.empty() || claims.sub.empty() || claims.aud.empty() ||
      claims.jti.empty())
    fail(Err::InvalidClaims, "iss, sub, aud, jti must be non-empty");
  if (!is_valid_token_id(claims.jti))
    fail(Err::InvalidClaims, "jti must be a 64-char lowercase hex token id");
  if (claims.cnf_kid && claims.cnf_kid->empty())
    fail(Err::InvalidClaims, "cnf.kid must be non-empty when present");

  nlohmann::ordered_json payload;
  payload["iss"] = claims.iss;
  payload["sub"] = claims.sub;
  payload["aud"] = claims.aud;
  payload["jti"] = claims.jti;
  payload["exp"] = claims.exp;
  if (claims.cnf_kid) payload["cnf"] = {{"kid", *claims.cnf_kid}};

  return base64url_encode(kHeaderJson) + "." +
         base64url_encode(payload.dump()) + ".";
}

ClaimSet decode_jwt(std::string_view jwt) {
  auto first = jwt.find('.');
  auto second = jwt.find('.', first == std::string_view::npos ? 0 : first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos ||
      jwt.find('.', second + 1) != std::string_view::npos)
    fail(Err::Malformed, "compact JWT must have exactly three segments");
  if (second + 1 != jwt.size())
    fail(Err::Malformed, "unsecured JWT must have an empty signature segment");

  std::string header_json = base64url_decode(jwt.substr(0, first));
  std::string payload_json =
      base64url_decode(jwt.substr(first + 1, second - first - 1));

  nlohmann::json header = nlohmann::json::parse(header_json, nullptr, false);
  if (header.is_discarded() || !header.is_object())
    fail(Err::Malformed, "JWT header is not a JSON object");
  if (header.value("typ", "") != "JWT" || header.value("alg", "") != "none")
    fail(Err::Malformed, "unsupported JWT header");

  nlohmann::json payload = nlohmann::json::parse(payload_json, nullptr, false);
  if (payload.is_discarded() || !payload.is_object())
    fail(Err::Malformed, "JWT payload is not a JSON object");

  ClaimSet claims;
  claims.iss = require_string(payload, "iss");
  claims.sub = require_string(payload, "sub");
  claims.aud = require_string(payload, "aud");
  claims.jti = require_string(payload, "jti");
  auto exp_it = payload.find("exp");
  if (exp_it == payload.end()) fail(Err::MissingClaim, "missing claim: exp");
  if (!exp_it->is_number_integer())
    fail(Err::Malformed, "exp must be an integer");
  claims.exp = exp_it->get<std::int64_t>();

  if (auto cnf = payload.find("cnf"); cnf != payload.end()) {
    if (!cnf->is_object() || !cnf->contains("kid") ||
        !(*cnf)["kid"].is_string())
      fail(Err::Malformed, "cnf must be an object with a string kid");
    claims.cnf_kid = (*cnf)["kid"].get<std::string>();
  }
  if (!is_valid_token_id(claims.jti))
    fail(Err::Malformed, "jti is not a valid token id");
  return claims;
}

std::string strip_cnf(std::string_view jwt) {
  ClaimSet claims = decode_jwt(jwt);
  claims.cnf_kid.reset();
  return encode_jwt(claims);
}

}  // namespace chainauth
