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

#include "doctest.h"

#include <filesystem>

#include "chainauth/auth_server.hpp"
#include "chainauth/ledger_access.hpp"
#include "chainauth/resource_server.hpp"
#include "test_util.hpp"

using namespace chainauth;
using namespace chainauth::testutil;

namespace {

constexpr std::int64_t kNow = 1'700'000'500;

#define CHECK_ERR(want, expr)                    \
  do {                                           \
    try {                                        \
      (void)(expr);                              \
      FAIL("expected " #want " from " #expr);    \
    } catch (const Error& e) {                   \
      CHECK(e.code() == (want));                 \
    }                                            \
  } while (0)

struct RsFixture {
  Keys k;
  Node node;
  std::shared_ptr<InProcessLedgerHandle> handle;
  AuthServer as;
  ResourceServer rs;

  RsFixture()
      : node([this] {
          NodeConfig nc = node_config(k);
          nc.auto_seal = true;
          return nc;
        }()),
        handle(std::make_shared<InProcessLedgerHandle>(node)),
        as(AuthServerConfig{"owner", "admin", 3600, 60, 5000}, k.op.keys,
           handle),
        rs(ResourceConfig{node.contract_address(), {kResource}, 900, 0, 60,
                          "", ""},
           handle) {}

  IssuedToken issue(const ClientKeys& c, std::int64_t now = kNow) {
    as.register_client(c.keys.public_key_hex(), now);
    auto grant = as.issue_grant("owner", c.address, kResource, 600, now);
    std::string nonce = as.pop_nonce(now);
    return as.request_token(grant.grant_id, c.keys.public_key_hex(), kResource,
                            nonce, c.keys.sign(nonce), now);
  }

  Session open_session(ResourceServer& server, const std::string& jwt,
                       const ClientKeys& prover, std::int64_t now = kNow) {
    Challenge ch = server.issue_challenge(jwt, now);
    return server.verify_challenge_response(
        ch.challenge_id, prover.keys.sign(ch.nonce + ch.aud),
        prover.keys.public_key_hex(), now);
  }
};

}  // namespace

TEST_CASE("the three ledger checks run in order and short-circuit") {
  RsFixture f;
  IssuedToken tok = f.issue(f.k.alice);

  SUBCASE("a valid token verifies") {
    VerifiedToken v = f.rs.verify_access_request(tok.jwt, kNow);
    CHECK(v.prover == f.k.alice.keys.public_key_hex());
    CHECK(v.claims.jti == tok.token_id);
  }
  SUBCASE("step 1: wrong issuer") {
    ClaimSet c = decode_jwt(tok.jwt);
    c.iss = Address::from_public_key(f.k.bob.keys.public_key).to_hex();
    CHECK_ERR(Err::UnknownIssuer,
              f.rs.verify_access_request(encode_jwt(c), kNow));
  }
  SUBCASE("step 1: foreign audience") {
    ClaimSet c = decode_jwt(tok.jwt);
    c.aud = "https://gw.example/not-here";
    CHECK_ERR(Err::AudienceMismatch,
              f.rs.verify_access_request(encode_jwt(c), kNow));
  }
  SUBCASE("step 1: expiry, checked before any ledger read") {
    CHECK_ERR(Err::Expired,
              f.rs.verify_access_request(tok.jwt, decode_jwt(tok.jwt).exp));
    // Even a revoked token reports Expired first.
    f.as.revoke_token("admin", tok.token_id);
    CHECK_ERR(Err::Expired,
              f.rs.verify_access_request(tok.jwt, decode_jwt(tok.jwt).exp));
  }
  SUBCASE("step 2: unknown token") {
    ClaimSet c = decode_jwt(tok.jwt);
    c.jti = random_hex(32);
    CHECK_ERR(Err::UnknownToken,
              f.rs.verify_access_request(encode_jwt(c), kNow));
  }
  SUBCASE("step 2: ledger owner differs from sub") {
    f.as.revoke_token("admin", tok.token_id);
    CHECK_ERR(Err::OwnerMismatch, f.rs.verify_access_request(tok.jwt, kNow));
  }
  SUBCASE("step 3: metadata must byte-equal the presented JWT") {
    ClaimSet c = decode_jwt(tok.jwt);
    c.exp += 1;  // still within step-1 bounds, but a different byte string
    CHECK_ERR(Err::MetadataMismatch,
              f.rs.verify_access_request(encode_jwt(c), kNow));
  }
  SUBCASE("clock skew widens the expiry window") {
    ResourceServer skewed(
        ResourceConfig{f.node.contract_address(), {kResource}, 900,
                       /*clock_skew_s=*/30, 60, "", ""},
        f.handle);
    std::int64_t exp = decode_jwt(tok.jwt).exp;
    CHECK_ERR(Err::Expired, f.rs.verify_access_request(tok.jwt, exp + 10));
    CHECK(skewed.verify_access_request(tok.jwt, exp + 10).claims.jti ==
          tok.token_id);
  }
}

TEST_CASE("delegated requests add the approval check") {
  RsFixture f;
  IssuedToken tok = f.issue(f.k.alice);
  ClaimSet c = decode_jwt(tok.jwt);
  c.cnf_kid = f.k.bob.keys.public_key_hex();
  std::string djwt = encode_jwt(c);

  SUBCASE("no approval on the ledger") {
    CHECK_ERR(Err::NotApproved, f.rs.verify_delegated_request(djwt, kNow));
  }
  SUBCASE("approved delegee verifies; someone else does not") {
    seal_one(f.node, f.k.alice.keys,
             Registry::approve_call(f.k.bob.address, tok.token_id));
    VerifiedToken v = f.rs.verify_delegated_request(djwt, kNow);
    CHECK(v.prover == f.k.bob.keys.public_key_hex());

    ClaimSet other = decode_jwt(tok.jwt);
    other.cnf_kid = f.k.root.keys.public_key_hex();
    CHECK_ERR(Err::NotApproved,
              f.rs.verify_delegated_request(encode_jwt(other), kNow));
  }
  SUBCASE("a JWT without cnf is not a delegated request") {
    CHECK_ERR(Err::Malformed, f.rs.verify_delegated_request(tok.jwt, kNow));
  }
  SUBCASE("metadata comparison uses the cnf-stripped form") {
    seal_one(f.node, f.k.alice.keys,
             Registry::approve_call(f.k.bob.address, tok.token_id));
    // Tampering with any other claim still breaks byte equality.
    ClaimSet tampered = c;
    tampered.exp += 1;
    CHECK_ERR(Err::MetadataMismatch,
              f.rs.verify_delegated_request(encode_jwt(tampered), kNow));
  }
}

TEST_CASE("challenge-response proves possession before a session opens") {
  RsFixture f;
  IssuedToken tok = f.issue(f.k.alice);

  SUBCASE("happy path") {
    Session s = f.open_session(f.rs, tok.jwt, f.k.alice);
    CHECK(s.token_id == tok.token_id);
    CHECK(f.rs.access_with_session(s.session_id, kResource, kNow).allowed);
  }
  SUBCASE("the signature must cover nonce and audience") {
    Challenge ch = f.rs.issue_challenge(tok.jwt, kNow);
    CHECK_ERR(Err::BadSignature,
              f.rs.verify_challenge_response(
                  ch.challenge_id, f.k.alice.keys.sign(ch.nonce),
                  f.k.alice.keys.public_key_hex(), kNow));
  }
  SUBCASE("only the expected prover's key is accepted") {
    Challenge ch = f.rs.issue_challenge(tok.jwt, kNow);
    CHECK_ERR(Err::WrongKey,
              f.rs.verify_challenge_response(
                  ch.challenge_id, f.k.bob.keys.sign(ch.nonce + ch.aud),
                  f.k.bob.keys.public_key_hex(), kNow));
  }
  SUBCASE("challenges are single-use and expire") {
    Challenge ch = f.rs.issue_challenge(tok.jwt, kNow);
    f.rs.verify_challenge_response(ch.challenge_id,
                                   f.k.alice.keys.sign(ch.nonce + ch.aud),
                                   f.k.alice.keys.public_key_hex(), kNow);
    CHECK_ERR(Err::ChallengeUsed,
              f.rs.verify_challenge_response(
                  ch.challenge_id, f.k.alice.keys.sign(ch.nonce + ch.aud),
                  f.k.alice.keys.public_key_hex(), kNow));
    Challenge late = f.rs.issue_challenge(tok.jwt, kNow);
    CHECK_ERR(Err::ChallengeExpired,
              f.rs.verify_challenge_response(
                  late.challenge_id, f.k.alice.keys.sign(late.nonce + late.aud),
                  f.k.alice.keys.public_key_hex(), kNow + 61));
    CHECK_ERR(Err::UnknownChallenge,
              f.rs.verify_challenge_response(
                  "nope", f.k.alice.keys.sign("x"),
                  f.k.alice.keys.public_key_hex(), kNow));
  }
  SUBCASE("the ledger is re-checked at response time") {
    Challenge ch = f.rs.issue_challenge(tok.jwt, kNow);
    f.as.revoke_token("admin", tok.token_id);
    CHECK_ERR(Err::OwnerMismatch,
              f.rs.verify_challenge_response(
                  ch.challenge_id, f.k.alice.keys.sign(ch.nonce + ch.aud),
                  f.k.alice.keys.public_key_hex(), kNow));
  }
}

TEST_CASE("sessions expire and are bound to their audience") {
  RsFixture f;
  IssuedToken tok = f.issue(f.k.alice);
  Session s = f.open_session(f.rs, tok.jwt, f.k.alice);
  CHECK(s.expires == kNow + 900);  // capped by max_session_ttl_s

  CHECK(f.rs.access_with_session(s.session_id, kResource, kNow + 1).allowed);
  auto wrong_uri = f.rs.access_with_session(s.session_id, "https://gw.example/x", kNow);
  CHECK_FALSE(wrong_uri.allowed);
  CHECK(wrong_uri.deny_reason == Err::AudienceMismatch);
  auto expired = f.rs.access_with_session(s.session_id, kResource, s.expires);
  CHECK_FALSE(expired.allowed);
  CHECK(expired.deny_reason == Err::SessionExpired);
  auto unknown = f.rs.access_with_session("nope", kResource, kNow);
  CHECK_FALSE(unknown.allowed);
  CHECK(unknown.deny_reason == Err::UnknownSession);

  // A session can never outlive its token's exp.
  IssuedToken brief = f.issue(f.k.bob, decode_jwt(tok.jwt).exp - 100);
  Session sb = f.open_session(f.rs, brief.jwt, f.k.bob,
                              decode_jwt(brief.jwt).exp - 10);
  CHECK(sb.expires == decode_jwt(brief.jwt).exp);
}

TEST_CASE("transfer events invalidate exactly the affected sessions") {
  RsFixture f;
  IssuedToken tok1 = f.issue(f.k.alice);
  IssuedToken tok2 = f.issue(f.k.bob);
  Session s1 = f.open_session(f.rs, tok1.jwt, f.k.alice);
  Session s2 = f.open_session(f.rs, tok2.jwt, f.k.bob);
  CHECK(f.rs.session_count() == 2);

  f.as.revoke_token("admin", tok1.token_id);
  f.rs.recover_missed_events();
  CHECK(f.rs.session_count() == 1);
  CHECK_FALSE(f.rs.access_with_session(s1.session_id, kResource, kNow).allowed);
  CHECK(f.rs.access_with_session(s2.session_id, kResource, kNow).allowed);
}

// [oracle] An RS that went offline and replays on restart must end with the
// same session store as one that processed every event live.
TEST_CASE("offline recovery replays to the same state as a live consumer") {
  RsFixture f;
  auto dir = fresh_dir("rs-recovery");
  ResourceConfig offline_cfg{f.node.contract_address(), {kResource},  900, 0,
                             60, (dir / "cursor").string(),
                             (dir / "sessions").string()};

  // live consumer: a second RS sharing the ledger, fed every event promptly.
  ResourceServer live(
      ResourceConfig{f.node.contract_address(), {kResource}, 900, 0, 60, "", ""},
      f.handle);
  IssuedToken tok1 = f.issue(f.k.alice);
  IssuedToken tok2 = f.issue(f.k.bob);

  std::vector<std::string> live_tokens, offline_tokens;
  {
    ResourceServer offline(offline_cfg, f.handle);
    Session a1 = f.open_session(offline, tok1.jwt, f.k.alice);
    Session a2 = f.open_session(offline, tok2.jwt, f.k.bob);
    f.open_session(live, tok1.jwt, f.k.alice);
    f.open_session(live, tok2.jwt, f.k.bob);
    offline.recover_missed_events();
    live.recover_missed_events();
    CHECK(offline.session_count() == 2);
    // The offline RS now stops (destructor); events keep flowing.
  }

  f.as.revoke_token("admin", tok1.token_id);
  f.node.advance_block(kNow + 50);
  f.node.advance_block(kNow + 51);
  live.recover_missed_events();

  {
    ResourceServer offline(offline_cfg, f.handle);  // restart: reloads state
    CHECK(offline.session_count() == 2);            // persisted sessions
    std::int64_t head = offline.recover_missed_events();
    CHECK(head == f.node.ledger().head());
    offline_tokens = offline.session_token_ids();
    live_tokens = live.session_token_ids();
    CHECK(offline_tokens == live_tokens);
    CHECK(offline.session_count() == 1);
    // Replaying again is idempotent.
    offline.recover_missed_events();
    CHECK(offline.session_token_ids() == offline_tokens);
    // A cursor beyond the head is refused.
    CHECK_ERR(Err::RangeBeyondHead,
              offline.recover_missed_events(f.node.ledger().head() + 1));
  }
  std::filesystem::remove_all(dir);
}
