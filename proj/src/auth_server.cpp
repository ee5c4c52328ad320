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

#include "chainauth/auth_server.hpp"

#include "chainauth/registry.hpp"

namespace chainauth {

AuthServer::AuthServer(AuthServerConfig config, KeyPair operator_keys,
                       std::shared_ptr<LedgerHandle> ledger)
    : config_(std::move(config)),
      operator_keys_(operator_keys),
      ledger_(std::move(ledger)) {
  operator_address_ = Address::from_public_key(operator_keys_.public_key);
  contract_address_ = ledger_->contract_address();
  ledger_->register_account(operator_address_);
}

ClientRegistration AuthServer::register_client(const std::string& pub_key_hex,
                                               std::int64_t now) {
  PublicKey key = public_key_from_hex(pub_key_hex);  // MalformedKey
  std::lock_guard lk(mu_);
  auto it = clients_.find(pub_key_hex);
  if (it != clients_.end()) return it->second;  // idempotent
  ClientRegistration reg{pub_key_hex, Address::from_public_key(key), now};
  clients_.emplace(pub_key_hex, reg);
  ledger_->register_account(reg.client_address);
  return reg;
}

AuthorizationGrant AuthServer::issue_grant(const std::string& credential,
                                           const Address& client_address,
                                           const std::string& resource_uri,
                                           std::int64_t ttl_s,
                                           std::int64_t now) {
  if (credential != config_.resource_owner_credential)
    fail(Err::Unauthorized, "bad resource owner credential");
  AuthorizationGrant grant;
  grant.grant_id = random_hex(16);
  grant.bound_client = client_address;
  grant.bound_resource = resource_uri;
  grant.expires = now + ttl_s;
  std::lock_guard lk(mu_);
  grants_.emplace(grant.grant_id, grant);
  return grant;
}

std::string AuthServer::pop_nonce(std::int64_t now) {
  std::string nonce = random_hex(16);
  std::lock_guard lk(mu_);
  nonces_[nonce] = PopNonce{now, false};
  return nonce;
}

std::string AuthServer::fresh_token_id() {
  std::lock_guard lk(mu_);
  while (true) {
    std::string id = random_hex(32);
    if (issued_jtis_.insert(id).second) return id;
  }
}

TxReceipt AuthServer::submit_and_wait(const std::string& call,
                                      std::uint64_t value) {
  std::string hash;
  {
    std::lock_guard lk(submit_mu_);
    auto tx = Transaction::make_signed(
        operator_keys_, ledger_->next_nonce(operator_address_), value, call);
    hash = ledger_->submit(tx).tx_hash;
  }
  TxReceipt receipt = ledger_->wait_for_receipt(hash, config_.seal_timeout_ms);
  if (!receipt.success)
    throw Error(err_from_string(receipt.error),
                "ledger transaction failed: " + receipt.error);
  return receipt;
}

IssuedToken AuthServer::request_token(const std::string& grant_id,
                                      const std::string& client_pub_key_hex,
                                      const std::string& resource_uri,
                                      const std::string& nonce,
                                      const Signature& nonce_signature,
                                      std::int64_t now) {
  PublicKey client_key = public_key_from_hex(client_pub_key_hex);
  Address client_address = Address::from_public_key(client_key);

  {
    std::lock_guard lk(mu_);
    auto it = grants_.find(grant_id);
    if (it == grants_.end()) fail(Err::UnknownGrant, "no such grant");
    AuthorizationGrant& grant = it->second;
    if (grant.used) fail(Err::GrantUsed, "grant already redeemed");
    if (now >= grant.expires) fail(Err::GrantExpired, "grant expired");
    if (grant.bound_client != client_address ||
        grant.bound_resource != resource_uri)
      fail(Err::GrantMismatch, "grant bound to a different client or resource");

    auto nit = nonces_.find(nonce);
    if (nit == nonces_.end() || nit->second.used ||
        now - nit->second.issued_at > config_.pop_nonce_ttl_s ||
        !verify_signature(client_key, nonce, nonce_signature))
      fail(Err::BadPoP, "proof of possession failed");
    nit->second.used = true;
    // Single-use from this point on, even if sealing fails below.
    grant.used = true;
  }

  ClaimSet claims;
  claims.iss = contract_address_.to_hex();
  claims.sub = client_pub_key_hex;
  claims.aud = resource_uri;
  claims.jti = fresh_token_id();
  claims.exp = now + config_.token_lifetime_s;
  std::string jwt = encode_jwt(claims);

  // Mint to the operator, then transfer to the client; the JWT goes back to
  // the client only once both are sealed.
  submit_and_wait(Registry::mint_call(claims.jti, jwt, operator_address_), 0);
  TxReceipt transfer = submit_and_wait(
      Registry::transfer_from_call(operator_address_, client_address,
                                   claims.jti),
      0);
  return IssuedToken{jwt, claims.jti, transfer.block_number};
}

std::int64_t AuthServer::revoke_token(const std::string& credential,
                                      const std::string& token_id) {
  if (credential != config_.admin_credential)
    fail(Err::Unauthorized, "bad admin credential");
  Address owner = ledger_->owner_of(token_id);  // UnknownToken
  TxReceipt receipt = submit_and_wait(
      Registry::transfer_from_call(owner, operator_address_, token_id), 0);
  return receipt.block_number;
}

IssuedToken AuthServer::reserve_token(const std::string& credential,
                                      const Address& client_address,
                                      const std::string& resource_uri,
                                      std::uint64_t price,
                                      std::int64_t lifetime_s,
                                      std::int64_t now) {
  if (credential != config_.admin_credential)
    fail(Err::Unauthorized, "bad admin credential");
  ClaimSet claims;
  claims.iss = contract_address_.to_hex();
  claims.sub = client_address.to_hex();
  claims.aud = resource_uri;
  claims.jti = fresh_token_id();
  claims.exp = now + lifetime_s;
  std::string jwt = encode_jwt(claims);
  TxReceipt receipt = submit_and_wait(
      Registry::mint_reserved_call(claims.jti, jwt, client_address, price), 0);
  return IssuedToken{jwt, claims.jti, receipt.block_number};
}

}  // namespace chainauth
