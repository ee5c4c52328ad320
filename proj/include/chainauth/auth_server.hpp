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

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "chainauth/address.hpp"
#include "chainauth/crypto.hpp"
#include "chainauth/ledger_access.hpp"
#include "chainauth/token_format.hpp"

namespace chainauth {

struct ClientRegistration {
  std::string pub_key_hex;
  Address client_address;
  std::int64_t registered_at = 0;
};

struct AuthorizationGrant {
  std::string grant_id;  // 128-bit random, hex
  Address bound_client;
  std::string bound_resource;
  bool used = false;
  std::int64_t expires = 0;
};

struct AuthServerConfig {
  std::string resource_owner_credential;
  std::string admin_credential;
  std::int64_t token_lifetime_s = 3600;
  std::int64_t pop_nonce_ttl_s = 60;
  std::int64_t seal_timeout_ms = 30000;
};

// OAuth 2.0 authorization server. Operates the registry: issuance mints a
// token carrying the JWT as metadata and transfers it to the client;
// revocation transfers it back to the operator address.
class AuthServer {
 public:
  AuthServer(AuthServerConfig config, KeyPair operator_keys,
             std::shared_ptr<LedgerHandle> ledger);

  ClientRegistration register_client(const std::string& pub_key_hex,
                                     std::int64_t now);

  AuthorizationGrant issue_grant(const std::string& credential,
                                 const Address& client_address,
                                 const std::string& resource_uri,
                                 std::int64_t ttl_s, std::int64_t now);

  // Proof-of-possession nonce for the token request.
  std::string pop_nonce(std::int64_t now);

  IssuedToken request_token(const std::string& grant_id,
                            const std::string& client_pub_key_hex,
                            const std::string& resource_uri,
                            const std::string& nonce,
                            const Signature& nonce_signature, std::int64_t now);

  std::int64_t revoke_token(const std::string& credential,
                            const std::string& token_id);

  IssuedToken reserve_token(const std::string& credential,
                            const Address& client_address,
                            const std::string& resource_uri,
                            std::uint64_t price, std::int64_t lifetime_s,
                            std::int64_t now);

  Address operator_address() const { return operator_address_; }
  Address contract_address() const { return contract_address_; }

 private:
  TxReceipt submit_and_wait(const std::string& call, std::uint64_t value);
  std::string fresh_token_id();

  AuthServerConfig config_;
  KeyPair operator_keys_;
  Address operator_address_;
  Address contract_address_;
  std::shared_ptr<LedgerHandle> ledger_;

  std::mutex mu_;
  std::map<std::string, ClientRegistration> clients_;  // by pub key hex
  std::map<std::string, AuthorizationGrant> grants_;
  struct PopNonce {
    std::int64_t issued_at = 0;
    bool used = false;
  };
  std::map<std::string, PopNonce> nonces_;
  std::set<std::string> issued_jtis_;

  std::mutex submit_mu_;  // serializes operator-nonce assignment
};

}  // namespace chainauth
