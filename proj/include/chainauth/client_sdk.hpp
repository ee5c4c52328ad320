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

#include <memory>
#include <string>
#include <vector>

#include "chainauth/crypto.hpp"
#include "chainauth/http_ledger.hpp"
#include "chainauth/token_format.hpp"

namespace httplib {
class Client;
}

namespace chainauth {

// Client key pair; the only state a client needs to keep. Everything else
// is reconstructed from the ledger.
struct ClientKeys {
  KeyPair keys;
  Address address;

  static ClientKeys generate();
  static ClientKeys from_seed(const std::array<std::uint8_t, 32>& seed);
  static ClientKeys load(const std::string& path);
  void save(const std::string& path) const;
};

struct OwnedToken {
  std::string token_id;
  std::string jwt;
  ClaimSet claims;
};

struct AccessResult {
  std::string session_id;
  std::string payload;
};

// Client-side operations against the authorization server, resource server,
// and ledger RPC.
class Client {
 public:
  Client(std::string as_url, std::string rs_url, std::string ledger_url,
         ClientKeys keys);
  ~Client();

  const ClientKeys& keys() const { return keys_; }

  // POST /register with our public key.
  Address register_with_as();

  // Grant issuance on the client's behalf (resource-owner credential).
  std::string obtain_grant(const std::string& credential,
                           const std::string& resource_uri, std::int64_t ttl_s);

  // Full token request: fetch a nonce, prove key possession, redeem grant.
  IssuedToken request_access_token(const std::string& grant_id,
                                   const std::string& resource_uri);

  // Reconstructs current holdings by folding Transfer events; verifies each
  // against ownerOf at head.
  std::vector<OwnedToken> list_owned_tokens();

  // Challenge-response access; signs (nonce || aud) with our key.
  AccessResult access_resource(const std::string& jwt);

  // Fetch via an existing session (fast path, no ledger reads server-side).
  std::string get_with_session(const std::string& session_id);

  // Approve a delegee address on a token we own; waits until sealed.
  std::int64_t delegate_token(const std::string& token_id,
                              const Address& delegee);

  static std::string build_delegated_jwt(const std::string& base_jwt,
                                         const std::string& delegee_pub_key_hex);

  // Claim a reserved token, attaching the payment; waits until sealed.
  std::int64_t pay_and_claim(const std::string& token_id, std::uint64_t price);

 private:
  std::int64_t submit_and_wait(const std::string& call, std::uint64_t value);

  ClientKeys keys_;
  std::unique_ptr<httplib::Client> as_;
  std::unique_ptr<httplib::Client> rs_;
  HttpLedgerHandle ledger_;
};

}  // namespace chainauth
