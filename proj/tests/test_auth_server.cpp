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

#include "chainauth/auth_server.hpp"
#include "chainauth/ledger_access.hpp"
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

struct AsFixture {
  Keys k;
  Node node;
  std::shared_ptr<InProcessLedgerHandle> handle;
  AuthServer as;

  AsFixture()
      : node([this] {
          NodeConfig nc = node_config(k);
          nc.auto_seal = true;
          return nc;
        }()),
        handle(std::make_shared<InProcessLedgerHandle>(node)),
        as(AuthServerConfig{"owner", "admin", 3600, 60, 5000}, k.op.keys,
           handle) {}

  std::string grant_for(const ClientKeys& c, std::int64_t ttl = 600,
                        std::int64_t now = kNow) {
    as.register_client(c.keys.public_key_hex(), now);
    return as.issue_grant("owner", c.address, kResource, ttl, now).grant_id;
  }

  IssuedToken issue(const ClientKeys& c, std::int64_t now = kNow) {
    std::string grant = grant_for(c, 600, now);
    std::string nonce = as.pop_nonce(now);
    return as.request_token(grant, c.keys.public_key_hex(), kResource, nonce,
                            c.keys.sign(nonce), now);
  }
};

}  // namespace

TEST_CASE("client registration is idempotent and validates the key") {
  AsFixture f;
  auto r1 = f.as.register_client(f.k.alice.keys.public_key_hex(), kNow);
  CHECK(r1.client_address == f.k.alice.address);
  auto r2 = f.as.register_client(f.k.alice.keys.public_key_hex(), kNow + 5);
  CHECK(r2.registered_at == r1.registered_at);  // first registration kept
  CHECK(f.node.ledger().account_exists(f.k.alice.address));
  CHECK_ERR(Err::MalformedKey, f.as.register_client("zz", kNow));
  CHECK_ERR(Err::MalformedKey, f.as.register_client("abcd", kNow));
}

TEST_CASE("grants require the resource owner credential") {
  AsFixture f;
  CHECK_ERR(Err::Unauthorized,
            f.as.issue_grant("wrong", f.k.alice.address, kResource, 600, kNow));
  auto g = f.as.issue_grant("owner", f.k.alice.address, kResource, 600, kNow);
  CHECK(g.grant_id.size() == 32);  // 128-bit hex
  CHECK(g.expires == kNow + 600);
}

TEST_CASE("token issuance anchors the JWT on the ledger") {
  AsFixture f;
  IssuedToken tok = f.issue(f.k.alice);

  ClaimSet claims = decode_jwt(tok.jwt);
  CHECK(claims.iss == f.node.contract_address().to_hex());
  CHECK(claims.sub == f.k.alice.keys.public_key_hex());
  CHECK(claims.aud == kResource);
  CHECK(claims.jti == tok.token_id);
  CHECK(claims.exp == kNow + 3600);
  CHECK_FALSE(claims.cnf_kid.has_value());
  CHECK(is_valid_token_id(tok.token_id));

  // The ledger tells the same story: client owns the token, the metadata is
  // the exact JWT, and the mint plus transfer both burned gas.
  CHECK(f.node.owner_of(tok.token_id) == f.k.alice.address);
  CHECK(f.node.token_uri(tok.token_id) == tok.jwt);
  CHECK(f.node.ledger().total_gas_used() == 254141 + 63858);
  CHECK(tok.included_block == f.node.ledger().head());

  // Each issuance gets a distinct jti.
  IssuedToken tok2 = f.issue(f.k.alice);
  CHECK(tok2.token_id != tok.token_id);
}

TEST_CASE("grants are single-use, bound, and expiring") {
  AsFixture f;
  SUBCASE("unknown") {
    std::string nonce = f.as.pop_nonce(kNow);
    CHECK_ERR(Err::UnknownGrant,
              f.as.request_token("deadbeef", f.k.alice.keys.public_key_hex(),
                                 kResource, nonce,
                                 f.k.alice.keys.sign(nonce), kNow));
  }
  SUBCASE("single use") {
    std::string grant = f.grant_for(f.k.alice);
    std::string nonce = f.as.pop_nonce(kNow);
    f.as.request_token(grant, f.k.alice.keys.public_key_hex(), kResource,
                       nonce, f.k.alice.keys.sign(nonce), kNow);
    std::string nonce2 = f.as.pop_nonce(kNow);
    CHECK_ERR(Err::GrantUsed,
              f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                 kResource, nonce2,
                                 f.k.alice.keys.sign(nonce2), kNow));
  }
  SUBCASE("expiry") {
    std::string grant = f.grant_for(f.k.alice, /*ttl=*/10);
    std::string nonce = f.as.pop_nonce(kNow + 11);
    CHECK_ERR(Err::GrantExpired,
              f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                 kResource, nonce,
                                 f.k.alice.keys.sign(nonce), kNow + 11));
  }
  SUBCASE("bound to client and resource") {
    std::string grant = f.grant_for(f.k.alice);
    f.as.register_client(f.k.bob.keys.public_key_hex(), kNow);
    std::string nonce = f.as.pop_nonce(kNow);
    CHECK_ERR(Err::GrantMismatch,
              f.as.request_token(grant, f.k.bob.keys.public_key_hex(),
                                 kResource, nonce, f.k.bob.keys.sign(nonce),
                                 kNow));
    std::string nonce2 = f.as.pop_nonce(kNow);
    CHECK_ERR(Err::GrantMismatch,
              f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                 "https://gw.example/other", nonce2,
                                 f.k.alice.keys.sign(nonce2), kNow));
    // The failed attempts did not consume the grant.
    std::string nonce3 = f.as.pop_nonce(kNow);
    IssuedToken tok = f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                         kResource, nonce3,
                                         f.k.alice.keys.sign(nonce3), kNow);
    CHECK(f.node.owner_of(tok.token_id) == f.k.alice.address);
  }
}

TEST_CASE("proof of possession gates issuance") {
  AsFixture f;
  std::string grant = f.grant_for(f.k.alice);
  SUBCASE("signature by the wrong key") {
    std::string nonce = f.as.pop_nonce(kNow);
    CHECK_ERR(Err::BadPoP,
              f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                 kResource, nonce, f.k.bob.keys.sign(nonce),
                                 kNow));
  }
  SUBCASE("signature over the wrong nonce") {
    std::string nonce = f.as.pop_nonce(kNow);
    CHECK_ERR(Err::BadPoP,
              f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                 kResource, nonce,
                                 f.k.alice.keys.sign("other"), kNow));
  }
  SUBCASE("unknown nonce") {
    CHECK_ERR(Err::BadPoP,
              f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                 kResource, "ffff",
                                 f.k.alice.keys.sign("ffff"), kNow));
  }
  SUBCASE("stale nonce") {
    std::string nonce = f.as.pop_nonce(kNow);
    CHECK_ERR(Err::BadPoP,
              f.as.request_token(grant, f.k.alice.keys.public_key_hex(),
                                 kResource, nonce, f.k.alice.keys.sign(nonce),
                                 kNow + 61));
  }
  SUBCASE("nonces are single-use") {
    std::string nonce = f.as.pop_nonce(kNow);
    f.as.request_token(grant, f.k.alice.keys.public_key_hex(), kResource,
                       nonce, f.k.alice.keys.sign(nonce), kNow);
    std::string grant2 = f.grant_for(f.k.alice);
    CHECK_ERR(Err::BadPoP,
              f.as.request_token(grant2, f.k.alice.keys.public_key_hex(),
                                 kResource, nonce, f.k.alice.keys.sign(nonce),
                                 kNow));
  }
}

TEST_CASE("revocation transfers the token back to the operator") {
  AsFixture f;
  IssuedToken tok = f.issue(f.k.alice);
  CHECK_ERR(Err::Unauthorized, f.as.revoke_token("wrong", tok.token_id));
  CHECK_ERR(Err::UnknownToken, f.as.revoke_token("admin", random_hex(32)));
  std::int64_t block = f.as.revoke_token("admin", tok.token_id);
  CHECK(block == f.node.ledger().head());
  CHECK(f.node.owner_of(tok.token_id) == f.k.op.address);
  // Metadata survives revocation; only ownership moved.
  CHECK(f.node.token_uri(tok.token_id) == tok.jwt);
}

TEST_CASE("reservation mints to the operator with the client as beneficiary") {
  AsFixture f;
  CHECK_ERR(Err::Unauthorized,
            f.as.reserve_token("wrong", f.k.alice.address, kResource, 300, 600,
                               kNow));
  IssuedToken tok =
      f.as.reserve_token("admin", f.k.alice.address, kResource, 300, 600, kNow);
  ClaimSet claims = decode_jwt(tok.jwt);
  CHECK(claims.sub == f.k.alice.address.to_hex());  // address, not a key
  CHECK(f.node.owner_of(tok.token_id) == f.k.op.address);
  auto rec = f.node.find_token(tok.token_id);
  REQUIRE(rec.has_value());
  REQUIRE(rec->reservation.has_value());
  CHECK(rec->reservation->beneficiary == f.k.alice.address);
  CHECK(rec->reservation->price == 300);
  CHECK(f.node.token_uri(tok.token_id) == tok.jwt);
}
