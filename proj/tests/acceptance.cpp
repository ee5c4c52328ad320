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

// Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each.
// Exits nonzero when any criterion fails or overruns its time budget.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chainauth/auth_server.hpp"
#include "chainauth/ledger_access.hpp"
#include "chainauth/resource_server.hpp"
#include "chainauth/scenarios.hpp"
#include "http_stack.hpp"
#include "registry_model.hpp"
#include "test_util.hpp"

using namespace chainauth;
using namespace chainauth::testutil;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

template <typename Fn>
void require_error(Err want, const std::string& what, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    require(e.code() == want,
            what + ": got " + std::string(to_string(e.code())));
    return;
  }
  throw Failure(what + ": no error raised");
}

constexpr std::int64_t kNow = 1'700'000'500;

// ---- 1. gas model -------------------------------------------------------

void check_gas_model() {
  Keys k;
  Node node(node_config(k));
  require(node.ledger().deployment_gas() == 1585444,
          "deploy gas != 1585444");
  require(node.ledger().total_gas_used() == 0, "genesis burned runtime gas");

  std::string id = random_hex(32);
  std::string jwt = token_jwt(node, id, k.alice.keys.public_key_hex(),
                              2'000'000'000);
  auto expect_gas = [&](const KeyPair& keys, const std::string& call,
                        std::uint64_t want, const char* op) {
    TxReceipt r = seal_one(node, keys, call);
    require(r.success, std::string(op) + " failed: " + r.error);
    require(r.gas_units == want,
            std::string(op) + " gas " + std::to_string(r.gas_units) +
                " != " + std::to_string(want));
  };
  expect_gas(k.op.keys, Registry::mint_call(id, jwt, k.alice.address),
             254141, "mint");
  expect_gas(k.alice.keys, Registry::approve_call(k.bob.address, id), 45735,
             "approve");
  expect_gas(k.op.keys,
             Registry::transfer_from_call(k.alice.address, k.op.address, id),
             63858, "transfer_from");
  expect_gas(k.op.keys, Registry::burn_call(id), 85791, "burn");

  // Views are free: reading state moves no gas counter.
  std::string id2 = random_hex(32);
  seal_one(node, k.op.keys,
           Registry::mint_call(id2, token_jwt(node, id2, "s", 2'000'000'000),
                               k.alice.address));
  std::uint64_t before = node.ledger().total_gas_used();
  (void)node.owner_of(id2);
  (void)node.token_uri(id2);
  (void)node.get_approved(id2);
  require(node.ledger().total_gas_used() == before, "views charged gas");
}

// ---- 2. block latency ---------------------------------------------------

void check_block_latency() {
  constexpr std::int64_t kIntervalMs = 130;  // 13 s scaled down 100x
  constexpr double kToleranceMs = 10.0;      // proportional to +-1 s at 13 s
  Keys k;
  Node node(node_config(k));
  BlockProducer producer(node, kIntervalMs);

  auto wait_for_head = [&](std::int64_t past) {
    while (node.ledger().head() <= past)
      std::this_thread::sleep_for(std::chrono::microseconds(300));
  };

  std::vector<double> samples;
  for (int trial = 0; trial < 3; ++trial) {
    // Align to a seal boundary so the submit sits a full interval from
    // the next block.
    wait_for_head(node.ledger().head());
    std::string id = random_hex(32);
    auto tx = Transaction::make_signed(
        k.op.keys, node.ledger().next_nonce(k.op.address), 0,
        Registry::mint_call(id, "m" + std::to_string(trial),
                            k.alice.address));
    auto t0 = std::chrono::steady_clock::now();
    std::string hash = node.submit(tx).tx_hash;
    while (!node.ledger().receipt(hash).has_value())
      std::this_thread::sleep_for(std::chrono::microseconds(300));
    auto t1 = std::chrono::steady_clock::now();
    samples.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  producer.stop();
  std::sort(samples.begin(), samples.end());
  double median = samples[1];
  require(std::abs(median - kIntervalMs) <= kToleranceMs,
          "median submit-to-seal latency " + std::to_string(median) +
              " ms outside " + std::to_string(kIntervalMs) + " +- " +
              std::to_string(kToleranceMs) + " ms");
}

// ---- 3/4/6/7. scripted scenarios ---------------------------------------

void check_demo(const std::string& name) {
  std::ostringstream transcript;
  if (run_demo(name, transcript) != 0)
    throw Failure("scenario '" + name + "' failed:\n" + transcript.str());
}

// ---- 5. offline recovery with replay-equivalence oracle ----------------

struct RecoveryRig {
  Keys k;
  std::unique_ptr<Node> node;
  std::shared_ptr<InProcessLedgerHandle> handle;
  std::unique_ptr<AuthServer> as;

  RecoveryRig() {
    NodeConfig nc = node_config(k);
    nc.auto_seal = true;
    node = std::make_unique<Node>(nc);
    handle = std::make_shared<InProcessLedgerHandle>(*node);
    as = std::make_unique<AuthServer>(
        AuthServerConfig{"owner", "admin", 3600, 60, 5000}, k.op.keys,
        handle);
  }

  IssuedToken issue() {
    as->register_client(k.alice.keys.public_key_hex(), kNow);
    std::string grant =
        as->issue_grant("owner", k.alice.address, kResource, 600, kNow)
            .grant_id;
    std::string nonce = as->pop_nonce(kNow);
    return as->request_token(grant, k.alice.keys.public_key_hex(), kResource,
                             nonce, k.alice.keys.sign(nonce), kNow);
  }

  std::string open_session(ResourceServer& rs, const std::string& jwt) {
    Challenge ch = rs.issue_challenge(jwt, kNow);
    Signature sig = k.alice.keys.sign(ch.nonce + kResource);
    return rs
        .verify_challenge_response(ch.challenge_id, sig,
                                   k.alice.keys.public_key_hex(), kNow)
        .session_id;
  }
};

void check_offline_recovery() {
  RecoveryRig rig;
  auto dir = fresh_dir("acceptance-recovery");
  IssuedToken revoked = rig.issue();
  IssuedToken kept = rig.issue();

  ResourceConfig live_cfg{rig.node->contract_address(), {kResource}, 900, 0,
                          60, "", ""};
  ResourceConfig off_cfg{rig.node->contract_address(),
                         {kResource},
                         900,
                         0,
                         60,
                         (dir / "rs.cursor").string(),
                         (dir / "rs.sessions").string()};
  ResourceServer live(live_cfg, rig.handle);
  auto offline = std::make_unique<ResourceServer>(off_cfg, rig.handle);

  std::string live_stale = rig.open_session(live, revoked.jwt);
  std::string off_stale = rig.open_session(*offline, revoked.jwt);
  rig.open_session(live, kept.jwt);
  rig.open_session(*offline, kept.jwt);

  // The offline server goes away entirely; only its files remain.
  offline.reset();
  rig.as->revoke_token("admin", revoked.token_id);
  rig.node->advance_block(kNow + 10);
  rig.node->advance_block(kNow + 20);

  // Restart from the persisted cursor and session store, then catch up.
  offline = std::make_unique<ResourceServer>(off_cfg, rig.handle);
  require(offline->session_count() == 2, "session store not reloaded");
  offline->recover_missed_events();
  live.recover_missed_events(0);

  AccessDecision off_dec =
      offline->access_with_session(off_stale, kResource, kNow + 30);
  require(!off_dec.allowed, "stale session survived recovery");
  AccessDecision live_dec =
      live.access_with_session(live_stale, kResource, kNow + 30);
  require(!live_dec.allowed, "stale session survived on the live server");
  require_error(Err::OwnerMismatch, "revoked token verified after recovery",
                [&] { offline->verify_access_request(revoked.jwt, kNow + 30); });

  // Replay-equivalence oracle: after catching up, the recovered server
  // holds exactly the sessions of the server that never went offline.
  auto a = offline->session_token_ids();
  auto b = live.session_token_ids();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  require(a == b && a.size() == 1 && a[0] == kept.token_id,
          "session stores diverged after recovery");
  std::filesystem::remove_all(dir);
}

// ---- 8. randomized registry histories ----------------------------------

void check_property_histories() {
  std::mt19937 rng(424242);
  for (int i = 0; i < 1000; ++i) {
    std::string trace = testmodel::run_random_history(rng, 24);
    if (!trace.empty())
      throw Failure("history " + std::to_string(i) + ": " + trace);
  }
}

// ---- 9. canonical token format -----------------------------------------

// Golden vectors produced once with an independent reference base64url
// encoder and frozen here.
constexpr const char* kGoldenJwt =
    "eyJhbGciOiJub25lIiwidHlwIjoiSldUIn0.eyJpc3MiOiIweGFiYWJhYmFiYWJhYmFiYWJh"
    "YmFiYWJhYmFiYWJhYmFiYWJhYmFiYWIiLCJzdWIiOiIxMTExMTExMTExMTExMTExMTExMTEx"
    "MTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExIiwiYXVkIjoiaHR0"
    "cHM6Ly9ndy5leGFtcGxlL3RoaW5ncy9sYW1wIiwianRpIjoiN2Y3ZjdmN2Y3ZjdmN2Y3Zjdm"
    "N2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZiIsImV4cCI6"
    "MTczNTY4OTYwMH0.";

constexpr const char* kGoldenCnfJwt =
    "eyJhbGciOiJub25lIiwidHlwIjoiSldUIn0.eyJpc3MiOiIweGFiYWJhYmFiYWJhYmFiYWJh"
    "YmFiYWJhYmFiYWJhYmFiYWJhYmFiYWIiLCJzdWIiOiIxMTExMTExMTExMTExMTExMTExMTEx"
    "MTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExMTExIiwiYXVkIjoiaHR0"
    "cHM6Ly9ndy5leGFtcGxlL3RoaW5ncy9sYW1wIiwianRpIjoiN2Y3ZjdmN2Y3ZjdmN2Y3Zjdm"
    "N2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZjdmN2Y3ZiIsImV4cCI6"
    "MTczNTY4OTYwMCwiY25mIjp7ImtpZCI6IjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIy"
    "MjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIyMjIifX0.";

void check_token_format() {
  ClaimSet c;
  c.iss = "0xabababababababababababababababababababab";
  c.sub = std::string(64, '1');
  c.aud = "https://gw.example/things/lamp";
  c.jti = std::string(32, '\0');  // replaced below
  c.jti = "7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f7f";
  c.exp = 1735689600;
  require(encode_jwt(c) == kGoldenJwt, "golden vector mismatch");

  ClaimSet d = c;
  d.cnf_kid = std::string(64, '2');
  require(encode_jwt(d) == kGoldenCnfJwt, "golden cnf vector mismatch");

  // Round trip and determinism: decode(encode(x)) == x and encoding is a
  // pure function of the claims.
  ClaimSet back = decode_jwt(encode_jwt(d));
  require(back.iss == d.iss && back.sub == d.sub && back.aud == d.aud &&
              back.jti == d.jti && back.exp == d.exp &&
              back.cnf_kid == d.cnf_kid,
          "decode(encode(x)) != x");
  require(encode_jwt(d) == encode_jwt(back), "encoding not deterministic");

  // strip_cnf removes the delegation claim and is idempotent.
  require(strip_cnf(kGoldenCnfJwt) == kGoldenJwt, "strip_cnf != base JWT");
  require(strip_cnf(strip_cnf(kGoldenCnfJwt)) == kGoldenJwt,
          "strip_cnf not idempotent");
  require(strip_cnf(kGoldenJwt) == kGoldenJwt,
          "strip_cnf changed a cnf-free JWT");
}

// ---- 10. stateless client ----------------------------------------------

void check_stateless_client() {
  HttpStack st;
  std::vector<std::string> issued;
  {
    Client alice = st.client_for(st.k.alice);
    alice.register_with_as();
    for (int i = 0; i < 3; ++i) {
      std::string grant = alice.obtain_grant("owner", kResource, 600);
      issued.push_back(alice.request_access_token(grant, kResource).token_id);
    }
    st.as_core->revoke_token("admin", issued[1]);
    // Every bit of client state except the key pair dies with this scope.
  }

  std::vector<std::string> expected;
  for (const auto& id : issued)
    if (st.node->owner_of(id) == st.k.alice.address) expected.push_back(id);
  std::sort(expected.begin(), expected.end());
  require(expected.size() == 2, "setup: expected two live tokens");

  Client fresh = st.client_for(st.k.alice);
  auto owned = fresh.list_owned_tokens();
  std::vector<std::string> got;
  for (const auto& t : owned) {
    require(t.jwt == st.node->token_uri(t.token_id),
            "recovered JWT differs from ledger metadata");
    got.push_back(t.token_id);
  }
  std::sort(got.begin(), got.end());
  require(got == expected, "recovered token set differs from ownerOf");

  AccessResult acc = fresh.access_resource(owned[0].jwt);
  require(!acc.payload.empty(), "recovered JWT denied access");
  require(fresh.get_with_session(acc.session_id) == acc.payload,
          "session from recovered JWT unusable");
}

// ---- driver -------------------------------------------------------------

bool run_criterion(int n, const char* name, double budget_s,
                   const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  std::string failure;
  try {
    fn();
  } catch (const std::exception& e) {
    failure = e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (failure.empty() && elapsed > budget_s)
    failure = "runtime " + std::to_string(elapsed) + " s exceeds budget " +
              std::to_string(budget_s) + " s";
  std::printf("%s  %2d. %-28s (%.2fs)%s%s\n",
              failure.empty() ? "PASS" : "FAIL", n, name, elapsed,
              failure.empty() ? "" : " -- ", failure.c_str());
  std::fflush(stdout);
  return failure.empty();
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run_criterion(1, "gas-model exactness", 1.0, check_gas_model);
  ok &= run_criterion(2, "block-latency model", 5.0, check_block_latency);
  ok &= run_criterion(3, "issuance and access", 2.0,
                      [] { check_demo("issue-access"); });
  ok &= run_criterion(4, "revocation, both cases", 2.0,
                      [] { check_demo("revoke"); });
  ok &= run_criterion(5, "offline recovery", 3.0, check_offline_recovery);
  ok &= run_criterion(6, "delegation", 2.0, [] { check_demo("delegate"); });
  ok &= run_criterion(7, "fair exchange", 2.0,
                      [] { check_demo("fair-exchange"); });
  ok &= run_criterion(8, "registry property suite", 30.0,
                      check_property_histories);
  ok &= run_criterion(9, "canonical token format", 1.0, check_token_format);
  ok &= run_criterion(10, "stateless client", 2.0, check_stateless_client);
  return ok ? 0 : 1;
}
