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

#include "chainauth/client_sdk.hpp"

#include <fstream>
#include <map>

#include "chainauth/registry.hpp"
#include "http_util.hpp"

namespace chainauth {

using http::json;

namespace {
constexpr const char* kKeyFileHeader = "chainauth-key v1";
}

ClientKeys ClientKeys::generate() {
  ClientKeys ck;
  ck.keys = KeyPair::generate();
  ck.address = Address::from_public_key(ck.keys.public_key);
  return ck;
}

ClientKeys ClientKeys::from_seed(const std::array<std::uint8_t, 32>& seed) {
  ClientKeys ck;
  ck.keys = KeyPair::from_seed(seed);
  ck.address = Address::from_public_key(ck.keys.public_key);
  return ck;
}

void ClientKeys::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Err::ConfigError, "cannot write key file: " + path);
  out << kKeyFileHeader << "\n"
      << to_hex(keys.secret_key.data(), keys.secret_key.size()) << "\n";
}

ClientKeys ClientKeys::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::ConfigError, "cannot read key file: " + path);
  std::string header, sk_hex;
  std::getline(in, header);
  std::getline(in, sk_hex);
  if (header != kKeyFileHeader)
    fail(Err::ConfigError, "unrecognized key file header");
  auto sk = from_hex(sk_hex);
  if (sk.size() != kSecretKeySize)
    fail(Err::ConfigError, "key file has wrong secret key length");
  ClientKeys ck;
  std::copy(sk.begin(), sk.end(), ck.keys.secret_key.begin());
  // An Ed25519 secret key embeds the public half in its last 32 bytes.
  std::copy(sk.begin() + 32, sk.end(), ck.keys.public_key.begin());
  ck.address = Address::from_public_key(ck.keys.public_key);
  return ck;
}

Client::Client(std::string as_url, std::string rs_url, std::string ledger_url,
               ClientKeys keys)
    : keys_(std::move(keys)),
      as_(std::make_unique<httplib::Client>(as_url)),
      rs_(std::make_unique<httplib::Client>(rs_url)),
      ledger_(ledger_url) {
  as_->set_read_timeout(60);
  rs_->set_read_timeout(30);
}

Client::~Client() = default;

Address Client::register_with_as() {
  json body{{"pub_key", keys_.keys.public_key_hex()}};
  auto r = http::expect_json(
      as_->Post("/register", body.dump(), "application/json"));
  return Address::from_hex(r.at("address").get<std::string>());
}

std::string Client::obtain_grant(const std::string& credential,
                                 const std::string& resource_uri,
                                 std::int64_t ttl_s) {
  json body{{"credential", credential},
            {"client_address", keys_.address.to_hex()},
            {"resource_uri", resource_uri},
            {"ttl", ttl_s}};
  auto r =
      http::expect_json(as_->Post("/grant", body.dump(), "application/json"));
  return r.at("grant_id").get<std::string>();
}

IssuedToken Client::request_access_token(const std::string& grant_id,
                                         const std::string& resource_uri) {
  auto nonce_body = http::expect_json(as_->Get("/token/nonce"));
  std::string nonce = nonce_body.at("nonce").get<std::string>();
  Signature sig = keys_.keys.sign(nonce);
  json body{{"grant_id", grant_id},
            {"pub_key", keys_.keys.public_key_hex()},
            {"resource_uri", resource_uri},
            {"nonce_response", nonce + "." + to_hex(sig)}};
  auto r =
      http::expect_json(as_->Post("/token", body.dump(), "application/json"));
  return IssuedToken{r.at("jwt").get<std::string>(),
                     r.at("token_id").get<std::string>(),
                     r.at("block").get<std::int64_t>()};
}

std::vector<OwnedToken> Client::list_owned_tokens() {
  std::int64_t head = ledger_.head();
  EventFilter filter;
  filter.name = "Transfer";
  std::map<std::string, Address> current_owner;
  for (const auto& ev : ledger_.get_events(filter, 0, head))
    current_owner[ev.token_id] = ev.b;

  std::vector<OwnedToken> out;
  for (const auto& [token_id, owner] : current_owner) {
    if (owner != keys_.address) continue;
    if (owner.is_zero()) continue;  // burned
    // Cross-check against the live view at head.
    if (ledger_.owner_of(token_id) != keys_.address) continue;
    OwnedToken t;
    t.token_id = token_id;
    t.jwt = ledger_.token_uri(token_id);
    t.claims = decode_jwt(t.jwt);
    out.push_back(std::move(t));
  }
  return out;
}

AccessResult Client::access_resource(const std::string& jwt) {
  json body{{"jwt", jwt}};
  auto result = rs_->Post("/access", body.dump(), "application/json");
  if (!result) fail(Err::Internal, "resource server unreachable");
  json ch = json::parse(result->body, nullptr, false);
  if (result->status != 401) {
    if (!ch.is_discarded() && ch.contains("error"))
      http::raise_remote(ch, result->status);
    fail(Err::Internal, "unexpected resource server response");
  }

  std::string aud = decode_jwt(jwt).aud;
  std::string nonce = ch.at("nonce").get<std::string>();
  Signature sig = keys_.keys.sign(nonce + aud);
  json answer{{"challenge_id", ch.at("challenge_id").get<std::string>()},
              {"pub_key", keys_.keys.public_key_hex()},
              {"signature", to_hex(sig)}};
  auto r = http::expect_json(
      rs_->Post("/access/response", answer.dump(), "application/json"));
  return AccessResult{r.at("session_id").get<std::string>(),
                      r.at("payload").get<std::string>()};
}

std::string Client::get_with_session(const std::string& session_id) {
  auto r = http::expect_json(rs_->Get("/resource?session=" + session_id));
  return r.at("payload").get<std::string>();
}

std::int64_t Client::submit_and_wait(const std::string& call,
                                     std::uint64_t value) {
  auto tx = Transaction::make_signed(
      keys_.keys, ledger_.next_nonce(keys_.address), value, call);
  std::string hash = ledger_.submit(tx).tx_hash;
  TxReceipt receipt = ledger_.wait_for_receipt(hash);
  if (!receipt.success)
    throw Error(err_from_string(receipt.error),
                "ledger transaction failed: " + receipt.error);
  return receipt.block_number;
}

std::int64_t Client::delegate_token(const std::string& token_id,
                                    const Address& delegee) {
  return submit_and_wait(Registry::approve_call(delegee, token_id), 0);
}

std::string Client::build_delegated_jwt(const std::string& base_jwt,
                                        const std::string& delegee_pub_key_hex) {
  ClaimSet claims = decode_jwt(base_jwt);
  claims.cnf_kid = delegee_pub_key_hex;
  return encode_jwt(claims);
}

std::int64_t Client::pay_and_claim(const std::string& token_id,
                                   std::uint64_t price) {
  return submit_and_wait(Registry::claim_call(token_id), price);
}

}  // namespace chainauth
