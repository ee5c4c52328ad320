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

#include "chainauth/auth_server.hpp"
#include "chainauth/http_auth.hpp"
#include "chainauth/http_ledger.hpp"
#include "chainauth/http_rs.hpp"
#include "chainauth/resource_server.hpp"
#include "test_util.hpp"

namespace chainauth::testutil {

// The whole system on loopback ports, blocks sealed per transaction.
struct HttpStack {
  Keys k;
  std::unique_ptr<Node> node;
  std::unique_ptr<LedgerHttpServer> ledger_http;
  std::unique_ptr<AuthServer> as_core;
  std::unique_ptr<AuthHttpServer> as_http;
  std::unique_ptr<ResourceServer> rs_core;
  std::unique_ptr<RsHttpServer> rs_http;
  std::unique_ptr<RsEventPump> pump;
  std::string ledger_url, as_url, rs_url;

  explicit HttpStack(bool with_pump = true) {
    NodeConfig nc = node_config(k);
    nc.auto_seal = true;
    node = std::make_unique<Node>(nc);

    ledger_http = std::make_unique<LedgerHttpServer>(*node);
    ledger_url =
        "http://127.0.0.1:" + std::to_string(ledger_http->start("127.0.0.1", 0));

    as_core = std::make_unique<AuthServer>(
        AuthServerConfig{"owner", "admin", 3600, 60, 5000}, k.op.keys,
        std::make_shared<HttpLedgerHandle>(ledger_url));
    as_http = std::make_unique<AuthHttpServer>(*as_core);
    as_url = "http://127.0.0.1:" + std::to_string(as_http->start("127.0.0.1", 0));

    rs_core = std::make_unique<ResourceServer>(
        ResourceConfig{node->contract_address(), {kResource}, 900, 0, 60, "", ""},
        std::make_shared<HttpLedgerHandle>(ledger_url));
    rs_http = std::make_unique<RsHttpServer>(*rs_core);
    rs_url = "http://127.0.0.1:" + std::to_string(rs_http->start("127.0.0.1", 0));
    if (with_pump) pump = std::make_unique<RsEventPump>(*rs_core, 25);
  }

  Client client_for(const ClientKeys& keys) {
    return Client(as_url, rs_url, ledger_url, keys);
  }
};

}  // namespace chainauth::testutil
