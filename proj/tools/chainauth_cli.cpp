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

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>

#include "chainauth/auth_server.hpp"
#include "chainauth/client_sdk.hpp"
#include "chainauth/config.hpp"
#include "chainauth/http_auth.hpp"
#include "chainauth/http_ledger.hpp"
#include "chainauth/http_rs.hpp"
#include "chainauth/node.hpp"
#include "chainauth/resource_server.hpp"
#include "chainauth/scenarios.hpp"

namespace {

using namespace chainauth;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void wait_for_signal() {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop.load())
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

std::vector<std::pair<Address, std::uint64_t>> parse_faucet(
    const std::string& spec) {
  std::vector<std::pair<Address, std::uint64_t>> out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string entry = spec.substr(pos, comma - pos);
    std::size_t colon = entry.rfind(':');
    if (colon == std::string::npos)
      fail(Err::ConfigError, "faucet entries are <address>:<amount>");
    out.emplace_back(Address::from_hex(entry.substr(0, colon)),
                     std::stoull(entry.substr(colon + 1)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::set<std::string> split_csv(const std::string& s) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string item = s.substr(pos, comma - pos);
    if (!item.empty()) out.insert(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int run_ledger(const std::string& config_path) {
  Config cfg = Config::load(
      config_path, "ledger",
      {"host", "port", "gas_price", "data_dir", "block_interval_ms",
       "root_address", "operator_address", "faucet", "genesis_time"});
  std::int64_t interval = cfg.get_int("block_interval_ms", 13000);

  NodeConfig nc;
  nc.root = Address::from_hex(cfg.require("root_address"));
  nc.operator_addr = Address::from_hex(cfg.require("operator_address"));
  nc.gas_price = static_cast<std::uint64_t>(cfg.get_int("gas_price", 0));
  nc.faucet = parse_faucet(cfg.get("faucet", ""));
  nc.data_dir = cfg.get("data_dir", "");
  nc.genesis_time = cfg.get_int("genesis_time", unix_now());
  nc.auto_seal = interval == 0;
  Node node(nc);

  LedgerHttpServer server(node);
  int port = server.start(cfg.get("host", "127.0.0.1"),
                          static_cast<int>(cfg.get_int("port", 8545)));
  std::cout << "ledger RPC listening on port " << port << ", contract "
            << node.contract_address().to_hex() << std::endl;

  std::unique_ptr<BlockProducer> producer;
  if (interval > 0) producer = std::make_unique<BlockProducer>(node, interval);
  wait_for_signal();
  return 0;
}

int run_as(const std::string& config_path) {
  Config cfg = Config::load(config_path, "as",
                            {"host", "port", "ledger_url", "operator_seed",
                             "operator_key_file", "owner_credential",
                             "admin_credential", "token_lifetime_s"});
  KeyPair op_keys;
  if (cfg.has("operator_seed")) {
    auto bytes = from_hex(cfg.require("operator_seed"));
    if (bytes.size() != 32)
      fail(Err::ConfigError, "operator_seed must be 32 bytes of hex");
    std::array<std::uint8_t, 32> s{};
    std::copy(bytes.begin(), bytes.end(), s.begin());
    op_keys = KeyPair::from_seed(s);
  } else {
    op_keys = ClientKeys::load(cfg.require("operator_key_file")).keys;
  }

  AuthServerConfig ac;
  ac.resource_owner_credential = cfg.require("owner_credential");
  ac.admin_credential = cfg.require("admin_credential");
  ac.token_lifetime_s = cfg.get_int("token_lifetime_s", 3600);
  AuthServer core(ac, op_keys,
                  std::make_shared<HttpLedgerHandle>(cfg.require("ledger_url")));

  AuthHttpServer server(core);
  int port = server.start(cfg.get("host", "127.0.0.1"),
                          static_cast<int>(cfg.get_int("port", 8546)));
  std::cout << "authorization server listening on port " << port
            << ", operator " << core.operator_address().to_hex() << std::endl;
  wait_for_signal();
  return 0;
}

int run_rs(const std::string& config_path) {
  Config cfg = Config::load(
      config_path, "rs",
      {"host", "port", "ledger_url", "contract_address", "resources",
       "cursor_path", "session_store_path", "pump_interval_ms",
       "max_session_ttl_s"});
  ResourceConfig rc;
  rc.contract_address = Address::from_hex(cfg.require("contract_address"));
  rc.resources = split_csv(cfg.require("resources"));
  rc.cursor_path = cfg.get("cursor_path", "");
  rc.session_store_path = cfg.get("session_store_path", "");
  rc.max_session_ttl_s = cfg.get_int("max_session_ttl_s", 900);
  ResourceServer core(rc,
                      std::make_shared<HttpLedgerHandle>(cfg.require("ledger_url")));
  core.recover_missed_events();

  RsHttpServer server(core);
  int port = server.start(cfg.get("host", "127.0.0.1"),
                          static_cast<int>(cfg.get_int("port", 8547)));
  std::cout << "resource server listening on port " << port << std::endl;
  RsEventPump pump(core, cfg.get_int("pump_interval_ms", 500));
  wait_for_signal();
  return 0;
}

ClientKeys load_or_create_keys(const std::string& path, bool create) {
  if (std::filesystem::exists(path)) return ClientKeys::load(path);
  if (!create) fail(Err::ConfigError, "no key file at " + path);
  ClientKeys keys = ClientKeys::generate();
  keys.save(path);
  std::cout << "generated new key pair at " << path << std::endl;
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blockchain-anchored OAuth 2.0 toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* ledger = app.add_subcommand("ledger", "Ledger node");
  auto* ledger_run = ledger->add_subcommand("run", "Run the ledger RPC node");
  ledger_run->add_option("--config", config_path, "Config file")->required();

  auto* as = app.add_subcommand("as", "Authorization server");
  auto* as_run = as->add_subcommand("run", "Run the authorization server");
  as_run->add_option("--config", config_path, "Config file")->required();

  auto* rs = app.add_subcommand("rs", "Resource server");
  auto* rs_run = rs->add_subcommand("run", "Run the resource server");
  rs_run->add_option("--config", config_path, "Config file")->required();

  std::string as_url = "http://127.0.0.1:8546";
  std::string rs_url = "http://127.0.0.1:8547";
  std::string ledger_url = "http://127.0.0.1:8545";
  std::string key_path = "client.key";
  std::string credential, resource, grant_id, jwt, token_id, delegee;
  std::int64_t ttl = 600;
  std::uint64_t price = 0;

  auto* client = app.add_subcommand("client", "Client operations");
  client->require_subcommand(1);
  client->add_option("--as", as_url, "Authorization server URL");
  client->add_option("--rs", rs_url, "Resource server URL");
  client->add_option("--ledger", ledger_url, "Ledger RPC URL");
  client->add_option("--key", key_path, "Key file path");

  auto* c_register = client->add_subcommand("register", "Register public key");
  auto* c_grant = client->add_subcommand("grant", "Obtain an authorization grant");
  c_grant->add_option("--credential", credential, "Resource owner credential")
      ->required();
  c_grant->add_option("--resource", resource, "Resource URI")->required();
  c_grant->add_option("--ttl", ttl, "Grant lifetime in seconds");
  auto* c_token = client->add_subcommand("token", "Redeem a grant for a token");
  c_token->add_option("--grant-id", grant_id, "Grant identifier")->required();
  c_token->add_option("--resource", resource, "Resource URI")->required();
  auto* c_access = client->add_subcommand("access", "Access with a JWT");
  c_access->add_option("--jwt", jwt, "Compact JWT")->required();
  auto* c_delegate = client->add_subcommand("delegate", "Approve a delegee");
  c_delegate->add_option("--token-id", token_id, "Token identifier")->required();
  c_delegate->add_option("--delegee", delegee, "Delegee address")->required();
  auto* c_claim = client->add_subcommand("claim", "Pay for a reserved token");
  c_claim->add_option("--token-id", token_id, "Token identifier")->required();
  c_claim->add_option("--price", price, "Payment amount")->required();
  auto* c_list = client->add_subcommand("list", "List owned tokens");

  std::string scenario;
  auto* demo = app.add_subcommand("demo", "Run an end-to-end scenario");
  demo->add_option("scenario", scenario, "One of: issue-access, revoke, "
                   "delegate, fair-exchange, offline-recovery")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ledger_run->parsed()) return run_ledger(config_path);
    if (as_run->parsed()) return run_as(config_path);
    if (rs_run->parsed()) return run_rs(config_path);
    if (demo->parsed()) return run_demo(scenario, std::cout);

    if (client->parsed()) {
      ClientKeys keys = load_or_create_keys(key_path, c_register->parsed());
      Client cl(as_url, rs_url, ledger_url, keys);
      if (c_register->parsed()) {
        std::cout << "registered address " << cl.register_with_as().to_hex()
                  << std::endl;
      } else if (c_grant->parsed()) {
        std::cout << "grant_id " << cl.obtain_grant(credential, resource, ttl)
                  << std::endl;
      } else if (c_token->parsed()) {
        IssuedToken tok = cl.request_access_token(grant_id, resource);
        std::cout << "token_id " << tok.token_id << "\nblock "
                  << tok.included_block << "\njwt " << tok.jwt << std::endl;
      } else if (c_access->parsed()) {
        AccessResult acc = cl.access_resource(jwt);
        std::cout << "session " << acc.session_id << "\npayload " << acc.payload
                  << std::endl;
      } else if (c_delegate->parsed()) {
        std::int64_t block =
            cl.delegate_token(token_id, Address::from_hex(delegee));
        std::cout << "approved in block " << block << std::endl;
      } else if (c_claim->parsed()) {
        std::int64_t block = cl.pay_and_claim(token_id, price);
        std::cout << "claimed in block " << block << std::endl;
      } else if (c_list->parsed()) {
        for (const auto& tok : cl.list_owned_tokens())
          std::cout << tok.token_id << " aud=" << tok.claims.aud
                    << " exp=" << tok.claims.exp << std::endl;
      }
      return 0;
    }
  } catch (const chainauth::Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what()
              << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
