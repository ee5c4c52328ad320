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

#include "chainauth/resource_server.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace chainauth {

ResourceServer::ResourceServer(ResourceConfig config,
                               std::shared_ptr<LedgerReader> ledger)
    : config_(std::move(config)), ledger_(std::move(ledger)) {
  cursor_ = load_cursor();
  load_sessions();
}

VerifiedToken ResourceServer::verify_common(const ClaimSet& claims,
                                            const std::string& jwt,
                                            bool delegated, std::int64_t now) {
  // Step 1: issuer, audience, expiry.
  if (Address::from_hex(claims.iss) != config_.contract_address)
    fail(Err::UnknownIssuer, "iss is not the configured contract");
  if (!config_.resources.count(claims.aud))
    fail(Err::AudienceMismatch, "aud is not a hosted resource");
  if (claims.exp <= now - config_.clock_skew_s)
    fail(Err::Expired, "token expired");

  // Step 2: ownerOf(jti) must match the address behind sub.
  Address owner = ledger_->owner_of(claims.jti);  // UnknownToken
  if (owner != subject_to_address(claims.sub))
    fail(Err::OwnerMismatch, "ledger owner does not match sub");

  // Step 3: tokenURI(jti) must equal the presented JWT byte for byte
  // (with cnf removed for delegated requests).
  std::string expected = delegated ? strip_cnf(jwt) : jwt;
  if (ledger_->token_uri(claims.jti) != expected)
    fail(Err::MetadataMismatch, "ledger metadata does not match JWT");

  VerifiedToken out;
  out.claims = claims;
  if (delegated) {
    auto approved = ledger_->get_approved(claims.jti);
    if (!approved || *approved != subject_to_address(*claims.cnf_kid))
      fail(Err::NotApproved, "cnf.kid is not the approved delegee");
    out.prover = *claims.cnf_kid;
  } else {
    out.prover = claims.sub;
  }
  return out;
}

VerifiedToken ResourceServer::verify_access_request(const std::string& jwt,
                                                    std::int64_t now) {
  ClaimSet claims = decode_jwt(jwt);
  return verify_common(claims, jwt, /*delegated=*/false, now);
}

VerifiedToken ResourceServer::verify_delegated_request(const std::string& jwt,
                                                       std::int64_t now) {
  ClaimSet claims = decode_jwt(jwt);
  if (!claims.cnf_kid)
    fail(Err::Malformed, "delegated request requires a cnf claim");
  return verify_common(claims, jwt, /*delegated=*/true, now);
}

Challenge ResourceServer::issue_challenge(const std::string& jwt,
                                          std::int64_t now) {
  ClaimSet claims = decode_jwt(jwt);
  VerifiedToken verified =
      verify_common(claims, jwt, claims.cnf_kid.has_value(), now);

  Challenge ch;
  ch.challenge_id = random_hex(16);
  ch.nonce = random_hex(16);
  ch.jwt = jwt;
  ch.aud = claims.aud;
  ch.expected_prover = subject_to_address(verified.prover);
  ch.issued_at = now;
  std::lock_guard lk(mu_);
  challenges_.emplace(ch.challenge_id, ch);
  return ch;
}

Session ResourceServer::verify_challenge_response(
    const std::string& challenge_id, const Signature& signature,
    const std::string& pub_key_hex, std::int64_t now) {
  Challenge ch;
  {
    std::lock_guard lk(mu_);
    auto it = challenges_.find(challenge_id);
    if (it == challenges_.end())
      fail(Err::UnknownChallenge, "no such challenge");
    if (it->second.used) fail(Err::ChallengeUsed, "challenge already answered");
    if (now - it->second.issued_at > config_.challenge_ttl_s)
      fail(Err::ChallengeExpired, "challenge expired");
    PublicKey key = public_key_from_hex(pub_key_hex);
    if (Address::from_public_key(key) != it->second.expected_prover)
      fail(Err::WrongKey, "key does not match the expected prover");
    if (!verify_signature(key, it->second.nonce + it->second.aud, signature))
      fail(Err::BadSignature, "challenge signature invalid");
    it->second.used = true;
    ch = it->second;
  }

  // The token may have moved since the challenge was issued; check again
  // before granting. Any failure denies. The head is read before the checks
  // so a transfer sealed concurrently still invalidates the session.
  std::int64_t verified_block = ledger_->head();
  ClaimSet claims = decode_jwt(ch.jwt);
  verify_common(claims, ch.jwt, claims.cnf_kid.has_value(), now);

  Session s;
  s.session_id = random_hex(16);
  s.jwt = ch.jwt;
  s.token_id = claims.jti;
  s.subject_address = ch.expected_prover;
  s.expires = std::min(claims.exp, now + config_.max_session_ttl_s);
  s.verified_block = verified_block;
  std::lock_guard lk(mu_);
  sessions_.emplace(s.session_id, s);
  sessions_by_token_.emplace(s.token_id, s.session_id);
  persist_sessions_locked();
  return s;
}

AccessDecision ResourceServer::access_with_session(
    const std::string& session_id, const std::string& resource_uri,
    std::int64_t now) {
  std::lock_guard lk(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return {false, Err::UnknownSession};
  if (now >= it->second.expires) return {false, Err::SessionExpired};
  ClaimSet claims = decode_jwt(it->second.jwt);
  if (claims.aud != resource_uri) return {false, Err::AudienceMismatch};
  return {true, Err::UnknownSession};
}

std::optional<std::string> ResourceServer::session_aud(
    const std::string& session_id) const {
  std::lock_guard lk(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return decode_jwt(it->second.jwt).aud;
}

void ResourceServer::handle_transfer_event(const LedgerEvent& ev) {
  if (ev.name != "Transfer") return;
  std::lock_guard lk(mu_);
  auto [lo, hi] = sessions_by_token_.equal_range(ev.token_id);
  bool changed = false;
  for (auto it = lo; it != hi;) {
    auto sit = sessions_.find(it->second);
    if (sit != sessions_.end() &&
        sit->second.verified_block >= ev.block_number) {
      ++it;  // session was verified against state that includes this event
      continue;
    }
    if (sit != sessions_.end()) sessions_.erase(sit);
    it = sessions_by_token_.erase(it);
    changed = true;
  }
  if (changed) persist_sessions_locked();
}

std::int64_t ResourceServer::recover_missed_events(std::int64_t from_cursor) {
  std::int64_t head = ledger_->head();
  if (from_cursor > head)
    fail(Err::RangeBeyondHead, "cursor beyond ledger head");
  if (from_cursor < head) {
    EventFilter filter;
    filter.name = "Transfer";
    for (const auto& ev :
         ledger_->get_events(filter, from_cursor + 1, head))
      handle_transfer_event(ev);
  }
  {
    std::lock_guard lk(mu_);
    cursor_ = head;
  }
  persist_cursor(head);
  return head;
}

std::int64_t ResourceServer::recover_missed_events() {
  return recover_missed_events(cursor());
}

std::int64_t ResourceServer::cursor() const {
  std::lock_guard lk(mu_);
  return cursor_;
}

std::size_t ResourceServer::session_count() const {
  std::lock_guard lk(mu_);
  return sessions_.size();
}

std::vector<std::string> ResourceServer::session_token_ids() const {
  std::lock_guard lk(mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(s.token_id);
  std::sort(out.begin(), out.end());
  return out;
}

void ResourceServer::persist_cursor(std::int64_t value) {
  if (config_.cursor_path.empty()) return;
  std::ofstream out(config_.cursor_path, std::ios::trunc);
  out << value << "\n";
}

void ResourceServer::persist_sessions_locked() const {
  if (config_.session_store_path.empty()) return;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [id, s] : sessions_)
    arr.push_back({{"session_id", s.session_id},
                   {"jwt", s.jwt},
                   {"token_id", s.token_id},
                   {"subject", s.subject_address.to_hex()},
                   {"expires", s.expires},
                   {"verified_block", s.verified_block}});
  std::ofstream out(config_.session_store_path, std::ios::trunc);
  out << arr.dump() << "\n";
}

void ResourceServer::load_sessions() {
  if (config_.session_store_path.empty() ||
      !std::filesystem::exists(config_.session_store_path))
    return;
  std::ifstream in(config_.session_store_path);
  nlohmann::json arr = nlohmann::json::parse(in, nullptr, false);
  if (!arr.is_array()) return;
  for (const auto& e : arr) {
    Session s;
    s.session_id = e.at("session_id").get<std::string>();
    s.jwt = e.at("jwt").get<std::string>();
    s.token_id = e.at("token_id").get<std::string>();
    s.subject_address = Address::from_hex(e.at("subject").get<std::string>());
    s.expires = e.at("expires").get<std::int64_t>();
    s.verified_block = e.at("verified_block").get<std::int64_t>();
    sessions_by_token_.emplace(s.token_id, s.session_id);
    sessions_.emplace(s.session_id, std::move(s));
  }
}

std::int64_t ResourceServer::load_cursor() const {
  if (config_.cursor_path.empty() ||
      !std::filesystem::exists(config_.cursor_path))
    return 0;
  std::ifstream in(config_.cursor_path);
  std::int64_t value = 0;
  in >> value;
  return value;
}

}  // namespace chainauth
