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

#include "chainauth/scenarios.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <thread>

#include "chainauth/auth_server.hpp"
#include "chainauth/client_sdk.hpp"
#include "chainauth/http_auth.hpp"
#include "chainauth/http_ledger.hpp"
#include "chainauth/http_rs.hpp"
#include "chainauth/node.hpp"
#include "chainauth/resource_server.hpp"
#include "http_util.hpp"

namespace chainauth {

namespace {

namespace fs = std::filesystem;
using http::json;

constexpr const char* kResource = "https://gw.example/things/lamp";
constexpr const char* kOwnerCred = "owner-secret";
constexpr const char* kAdminCred = "admin-secret";

std::array<std::uint8_t, 32> seed(std::uint8_t n) {
  std::array<std::uint8_t, 32> s{};
  s[0] = n;
  return s;
}

// Full stack wired over HTTP: ledger RPC, authorization server, resource
// server with its event pump, all in one process on loopback ports.
struct Stack {
  fs::path workdir;
  ClientKeys root = ClientKeys::from_seed(seed(1));
  ClientKeys op = ClientKeys::from_seed(seed(2));
  ClientKeys alice = ClientKeys::from_seed(seed(3));
  ClientKeys bob = ClientKeys::from_seed(seed(4));

  std::unique_ptr<Node> node;
  std::unique_ptr<LedgerHttpServer> ledger_http;
  std::unique_ptr<AuthServer> as_core;
  std::unique_ptr<AuthHttpServer> as_http;
  std::unique_ptr<ResourceServer> rs_core;
  std::unique_ptr<RsHttpServer> rs_http;
  std::unique_ptr<RsEventPump> pump;
  std::string ledger_url, as_url, rs_url;

  Stack() {
    workdir = fs::temp_directory_path() / ("chainauth-demo-" + random_hex(8));
    fs::create_directories(workdir);

    NodeConfig nc;
    nc.root = root.address;
    nc.operator_addr = op.address;
    nc.gas_price = 1;
    nc.faucet = {{alice.address, 10'000'000}, {op.address, 10'000'000}};
    nc.data_dir = (workdir / "ledger").string();
    nc.genesis_time = unix_now();
    nc.auto_seal = true;  // manual-block mode with block interval 0
    node = std::make_unique<Node>(nc);

    ledger_http = std::make_unique<LedgerHttpServer>(*node);
    int lport = ledger_http->start("127.0.0.1", 0);
    ledger_url = "http://127.0.0.1:" + std::to_string(lport);

    AuthServerConfig ac;
    ac.resource_owner_credential = kOwnerCred;
    ac.admin_credential = kAdminCred;
    ac.token_lifetime_s = 600;
    as_core = std::make_unique<AuthServer>(
        ac, op.keys, std::make_shared<HttpLedgerHandle>(ledger_url));
    as_http = std::make_unique<AuthHttpServer>(*as_core);
    as_url = "http://127.0.0.1:" + std::to_string(as_http->start("127.0.0.1", 0));

    start_rs();
  }

  ResourceConfig rs_config() const {
    ResourceConfig rc;
    rc.contract_address = node->contract_address();
    rc.resources = {kResource};
    rc.cursor_path = (workdir / "rs.cursor").string();
    rc.session_store_path = (workdir / "rs.sessions").string();
    return rc;
  }

  void start_rs() {
    rs_core = std::make_unique<ResourceServer>(
        rs_config(), std::make_shared<HttpLedgerHandle>(ledger_url));
    rs_core->recover_missed_events();
    rs_http = std::make_unique<RsHttpServer>(*rs_core);
    rs_url = "http://127.0.0.1:" + std::to_string(rs_http->start("127.0.0.1", 0));
    pump = std::make_unique<RsEventPump>(*rs_core, 25);
  }

  void stop_rs() {
    pump.reset();
    rs_http.reset();
    rs_core.reset();
  }

  ~Stack() {
    stop_rs();
    as_http.reset();
    ledger_http.reset();
    std::error_code ec;
    fs::remove_all(workdir, ec);
  }

  Client client_for(const ClientKeys& keys) {
    return Client(as_url, rs_url, ledger_url, keys);
  }

  // Direct calls to AS endpoints that the client SDK intentionally lacks
  // (they belong to the resource owner / administrator, not the client).
  json as_post(const std::string& path, const json& body) {
    httplib::Client c(as_url);
    c.set_read_timeout(60);
    return http::expect_json(c.Post(path, body.dump(), "application/json"));
  }
};

IssuedToken issue_for(Stack& st, Client& cl, std::ostream& out) {
  Address addr = cl.register_with_as();
  out << "registered client " << addr.to_hex() << "\n";
  std::string grant = cl.obtain_grant(kOwnerCred, kResource, 600);
  out << "grant issued: " << grant << "\n";
  IssuedToken tok = cl.request_access_token(grant, kResource);
  out << "token minted and transferred: " << tok.token_id << " (block "
      << tok.included_block << ")\n";
  return tok;
}

bool expect_denied(Err want, const std::function<void()>& f, std::ostream& out,
                   const std::string& what) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == want) {
      out << what << " denied: " << to_string(e.code()) << "\n";
      return true;
    }
    out << what << " failed with " << to_string(e.code()) << ", expected "
        << to_string(want) << "\n";
    return false;
  }
  out << "UNEXPECTED: " << what << " succeeded\n";
  return false;
}

// Polls until f() holds or ~2 s pass; the event pump runs every 25 ms.
bool eventually(const std::function<bool()>& f) {
  for (int i = 0; i < 80; ++i) {
    if (f()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  return f();
}

bool scenario_issue_access(Stack& st, std::ostream& out) {
  Client alice = st.client_for(st.alice);
  IssuedToken tok = issue_for(st, alice, out);
  AccessResult acc = alice.access_resource(tok.jwt);
  out << "access granted, session " << acc.session_id << "\n";
  std::string payload = alice.get_with_session(acc.session_id);
  out << "payload: " << payload << "\n";
  auto owned = alice.list_owned_tokens();
  out << "client owns " << owned.size() << " token(s) at head "
      << st.node->ledger().head() << "\n";
  return !payload.empty() && owned.size() == 1 &&
         owned[0].token_id == tok.token_id;
}

bool scenario_revoke(Stack& st, std::ostream& out) {
  Client alice = st.client_for(st.alice);
  IssuedToken tok = issue_for(st, alice, out);
  AccessResult acc = alice.access_resource(tok.jwt);
  out << "access granted, session " << acc.session_id << "\n";

  json r = st.as_post("/revoke",
                      {{"credential", kAdminCred}, {"token_id", tok.token_id}});
  out << "token revoked (block " << r.at("block").get<std::int64_t>() << ")\n";

  bool session_dead = eventually([&] {
    try {
      alice.get_with_session(acc.session_id);
      return false;
    } catch (const Error& e) {
      return e.code() == Err::UnknownSession;
    }
  });
  out << (session_dead ? "existing session invalidated by Transfer event\n"
                       : "existing session STILL ALIVE\n");

  bool fresh_denied = expect_denied(
      Err::OwnerMismatch, [&] { alice.access_resource(tok.jwt); }, out,
      "fresh access with revoked token");
  return session_dead && fresh_denied;
}

bool scenario_delegate(Stack& st, std::ostream& out) {
  Client alice = st.client_for(st.alice);
  Client bob = st.client_for(st.bob);
  IssuedToken tok = issue_for(st, alice, out);

  std::int64_t block = alice.delegate_token(tok.token_id, st.bob.address);
  out << "delegated to " << st.bob.address.to_hex() << " (block " << block
      << ")\n";
  std::string djwt =
      Client::build_delegated_jwt(tok.jwt, st.bob.keys.public_key_hex());

  AccessResult acc = bob.access_resource(djwt);
  out << "delegee access granted, session " << acc.session_id << "\n";

  std::uint64_t bob_txs = st.node->ledger().next_nonce(st.bob.address);
  out << "delegee ledger transactions: " << bob_txs << "\n";

  json r = st.as_post("/revoke",
                      {{"credential", kAdminCred}, {"token_id", tok.token_id}});
  out << "token revoked (block " << r.at("block").get<std::int64_t>() << ")\n";
  bool denied = expect_denied(
      Err::OwnerMismatch, [&] { bob.access_resource(djwt); }, out,
      "delegee access after revocation");
  return bob_txs == 0 && denied;
}

bool scenario_fair_exchange(Stack& st, std::ostream& out) {
  constexpr std::uint64_t kPrice = 300;
  Client alice = st.client_for(st.alice);

  json r = st.as_post("/reserve", {{"credential", kAdminCred},
                                   {"client_address", st.alice.address.to_hex()},
                                   {"resource_uri", kResource},
                                   {"price", kPrice},
                                   {"lifetime", 600}});
  std::string jwt = r.at("jwt").get<std::string>();
  std::string token_id = r.at("token_id").get<std::string>();
  out << "token reserved for client at price " << kPrice << ": " << token_id
      << " (block " << r.at("block").get<std::int64_t>() << ")\n";

  bool early_denied = expect_denied(
      Err::OwnerMismatch, [&] { alice.access_resource(jwt); }, out,
      "access before payment");

  std::uint64_t op_before = st.node->ledger().get_balance(st.op.address);
  bool underpay_denied = expect_denied(
      Err::InsufficientPayment,
      [&] { alice.pay_and_claim(token_id, kPrice - 50); }, out,
      "claim with underpayment");
  bool no_partial_credit =
      st.node->ledger().get_balance(st.op.address) == op_before;
  out << "operator balance unchanged after failed claim: "
      << (no_partial_credit ? "yes" : "NO") << "\n";

  std::int64_t block = alice.pay_and_claim(token_id, kPrice);
  out << "claimed with exact payment (block " << block << ")\n";
  bool paid = st.node->ledger().get_balance(st.op.address) == op_before + kPrice;
  out << "operator credited " << kPrice << ": " << (paid ? "yes" : "NO") << "\n";

  AccessResult acc = alice.access_resource(jwt);
  out << "access granted after claim, session " << acc.session_id << "\n";

  const Ledger& l = st.node->ledger();
  bool conserved = l.total_balance() + l.fees_burned() == l.faucet_total();
  out << "value conserved (balances + burned fees == faucet total): "
      << (conserved ? "yes" : "NO") << "\n";
  return early_denied && underpay_denied && no_partial_credit && paid &&
         conserved;
}

bool scenario_offline_recovery(Stack& st, std::ostream& out) {
  Client alice = st.client_for(st.alice);
  IssuedToken tok = issue_for(st, alice, out);
  AccessResult acc = alice.access_resource(tok.jwt);
  out << "access granted, session " << acc.session_id << "\n";

  st.stop_rs();
  out << "resource server stopped; cursor and sessions persisted\n";

  json r = st.as_post("/revoke",
                      {{"credential", kAdminCred}, {"token_id", tok.token_id}});
  out << "token revoked while RS offline (block "
      << r.at("block").get<std::int64_t>() << ")\n";
  HttpLedgerHandle handle(st.ledger_url);
  handle.advance_block();
  handle.advance_block();
  out << "two further blocks sealed, head " << st.node->ledger().head() << "\n";

  st.start_rs();
  out << "resource server restarted, replayed events to cursor "
      << st.rs_core->cursor() << "\n";

  Client alice2 = st.client_for(st.alice);  // RS port changed on restart
  bool stale_denied = expect_denied(
      Err::UnknownSession, [&] { alice2.get_with_session(acc.session_id); },
      out, "stale session after recovery");
  bool fresh_denied = expect_denied(
      Err::OwnerMismatch, [&] { alice2.access_resource(tok.jwt); }, out,
      "fresh access with revoked token");
  return stale_denied && fresh_denied;
}

}  // namespace

std::vector<std::string> demo_scenarios() {
  return {"issue-access", "revoke", "delegate", "fair-exchange",
          "offline-recovery"};
}

int run_demo(const std::string& name, std::ostream& out) {
  using Fn = bool (*)(Stack&, std::ostream&);
  Fn fn = nullptr;
  if (name == "issue-access") fn = scenario_issue_access;
  else if (name == "revoke") fn = scenario_revoke;
  else if (name == "delegate") fn = scenario_delegate;
  else if (name == "fair-exchange") fn = scenario_fair_exchange;
  else if (name == "offline-recovery") fn = scenario_offline_recovery;
  if (!fn) {
    out << "unknown scenario: " << name << "\n";
    return 2;
  }

  out << "=== " << name << " ===\n";
  bool ok = false;
  try {
    Stack stack;
    ok = fn(stack, out);
  } catch (const std::exception& e) {
    out << "scenario aborted: " << e.what() << "\n";
  }
  out << (ok ? "OUTCOME: as expected\n" : "OUTCOME: FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace chainauth
