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

struct ResourceConfig {
  Address contract_address;
  std::set<std::string> resources;
  std::int64_t max_session_ttl_s = 900;
  std::int64_t clock_skew_s = 0;
  std::int64_t challenge_ttl_s = 60;
  std::string cursor_path;        // empty: cursor kept in memory only
  std::string session_store_path;  // empty: sessions lost on restart
};

struct VerifiedToken {
  ClaimSet claims;
  std::string prover;  // sub, or cnf.kid for delegated requests
};

struct Session {
  std::string session_id;
  std::string jwt;
  std::string token_id;
  Address subject_address;
  std::int64_t expires = 0;
  // Ledger head at verification; transfers sealed at or before this block
  // were already reflected in the checks and must not invalidate us.
  std::int64_t verified_block = 0;
};

struct Challenge {
  std::string challenge_id;
  std::string nonce;
  std::string jwt;
  std::string aud;
  Address expected_prover;
  std::int64_t issued_at = 0;
  bool used = false;
};

struct AccessDecision {
  bool allowed = false;
  Err deny_reason = Err::UnknownSession;  // meaningful when !allowed
};

// Validates access purely by reading ledger state; holds no signing account
// and never writes to the ledger.
class ResourceServer {
 public:
  ResourceServer(ResourceConfig config, std::shared_ptr<LedgerReader> ledger);

  // The three ledger checks, in order: issuer/audience/expiry, ownerOf
  // against sub, tokenURI byte-equality against the presented JWT.
  VerifiedToken verify_access_request(const std::string& jwt, std::int64_t now);

  // Same, but tokenURI is compared against the JWT with cnf removed, and
  // getApproved must name the cnf.kid address. No transitive delegation.
  VerifiedToken verify_delegated_request(const std::string& jwt,
                                         std::int64_t now);

  // Runs whichever verification matches the JWT shape, then binds a
  // single-use nonce to it.
  Challenge issue_challenge(const std::string& jwt, std::int64_t now);

  // Signature is over (nonce || aud). Re-verifies the token against the
  // ledger before granting.
  Session verify_challenge_response(const std::string& challenge_id,
                                    const Signature& signature,
                                    const std::string& pub_key_hex,
                                    std::int64_t now);

  AccessDecision access_with_session(const std::string& session_id,
                                     const std::string& resource_uri,
                                     std::int64_t now);

  // The aud of the session's JWT, if the session exists.
  std::optional<std::string> session_aud(const std::string& session_id) const;

  void handle_transfer_event(const LedgerEvent& ev);

  // Replays Transfer events from the cursor through handle_transfer_event
  // and persists the new cursor (the last processed block).
  std::int64_t recover_missed_events(std::int64_t from_cursor);
  std::int64_t recover_missed_events();  // from the persisted cursor

  std::int64_t cursor() const;
  std::size_t session_count() const;
  std::vector<std::string> session_token_ids() const;

 private:
  VerifiedToken verify_common(const ClaimSet& claims, const std::string& jwt,
                              bool delegated, std::int64_t now);
  void persist_cursor(std::int64_t value);
  std::int64_t load_cursor() const;
  void persist_sessions_locked() const;
  void load_sessions();

  ResourceConfig config_;
  std::shared_ptr<LedgerReader> ledger_;

  mutable std::mutex mu_;
  std::map<std::string, Challenge> challenges_;
  std::map<std::string, Session> sessions_;
  std::multimap<std::string, std::string> sessions_by_token_;  // token -> id
  std::int64_t cursor_ = 0;
};

}  // namespace chainauth
