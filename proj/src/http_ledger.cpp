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

#include "chainauth/http_ledger.hpp"

#include "http_util.hpp"

namespace chainauth {

using http::field;
using http::guarded;
using http::json;
using http::reply;

namespace {

json event_to_json(const LedgerEvent& ev) {
  return {{"name", ev.name},         {"a", ev.a.to_hex()},
          {"b", ev.b.to_hex()},      {"token_id", ev.token_id},
          {"block", ev.block_number}, {"index", ev.event_index}};
}

LedgerEvent event_from_json(const json& j) {
  LedgerEvent ev;
  ev.name = j.at("name").get<std::string>();
  ev.a = Address::from_hex(j.at("a").get<std::string>());
  ev.b = Address::from_hex(j.at("b").get<std::string>());
  ev.token_id = j.at("token_id").get<std::string>();
  ev.block_number = j.at("block").get<std::int64_t>();
  ev.event_index = j.at("index").get<std::uint32_t>();
  return ev;
}

std::string query_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name))
    fail(Err::Malformed, std::string("missing query parameter: ") + name);
  return req.get_param_value(name);
}

}  // namespace

LedgerHttpServer::LedgerHttpServer(Node& node)
    : node_(node), server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;

  svr.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    reply(res, json{{"ok", true}, {"role", "ledger"}});
  });

  svr.Post("/submit", guarded([this](const httplib::Request& req,
                                     httplib::Response& res) {
    json body = http::parse_body(req);
    Transaction tx;
    tx.sender = Address::from_hex(field<std::string>(body, "sender"));
    tx.nonce = field<std::uint64_t>(body, "nonce");
    tx.value = field<std::uint64_t>(body, "value");
    tx.call = field<std::string>(body, "call");
    tx.pubkey = public_key_from_hex(field<std::string>(body, "pubkey"));
    tx.signature = signature_from_hex(field<std::string>(body, "signature"));
    PendingReceipt r = node_.submit(tx);
    reply(res, json{{"tx_hash", r.tx_hash}, {"accepted", r.accepted}});
  }));

  svr.Get("/call/owner_of", guarded([this](const httplib::Request& req,
                                           httplib::Response& res) {
    reply(res, json{{"owner",
                     node_.owner_of(query_param(req, "token_id")).to_hex()}});
  }));

  svr.Get("/call/token_uri", guarded([this](const httplib::Request& req,
                                            httplib::Response& res) {
    reply(res, json{{"metadata", node_.token_uri(query_param(req, "token_id"))}});
  }));

  svr.Get("/call/get_approved", guarded([this](const httplib::Request& req,
                                               httplib::Response& res) {
    auto approved = node_.get_approved(query_param(req, "token_id"));
    reply(res, json{{"approved",
                     approved ? json(approved->to_hex()) : json(nullptr)}});
  }));

  svr.Get("/call/get_balance", guarded([this](const httplib::Request& req,
                                              httplib::Response& res) {
    Address addr = Address::from_hex(query_param(req, "address"));
    reply(res, json{{"balance", node_.ledger().get_balance(addr)}});
  }));

  svr.Get("/call/nonce", guarded([this](const httplib::Request& req,
                                        httplib::Response& res) {
    Address addr = Address::from_hex(query_param(req, "address"));
    reply(res, json{{"nonce", node_.ledger().next_nonce(addr)}});
  }));

  svr.Get("/call/contract_address",
          guarded([this](const httplib::Request&, httplib::Response& res) {
            reply(res, json{{"address", node_.contract_address().to_hex()}});
          }));

  svr.Get("/call/head",
          guarded([this](const httplib::Request&, httplib::Response& res) {
            reply(res, json{{"head", node_.ledger().head()}});
          }));

  svr.Get("/events", guarded([this](const httplib::Request& req,
                                    httplib::Response& res) {
    EventFilter filter;
    if (req.has_param("name")) filter.name = req.get_param_value("name");
    if (req.has_param("token_id"))
      filter.token_id = req.get_param_value("token_id");
    std::int64_t from = std::stoll(query_param(req, "from"));
    std::int64_t to = std::stoll(query_param(req, "to"));
    json events = json::array();
    for (const auto& ev : node_.ledger().get_events(filter, from, to))
      events.push_back(event_to_json(ev));
    reply(res, json{{"events", events}});
  }));

  svr.Get("/receipt", guarded([this](const httplib::Request& req,
                                     httplib::Response& res) {
    auto r = node_.ledger().receipt(query_param(req, "hash"));
    if (!r) {
      reply(res, json{{"found", false}});
      return;
    }
    reply(res, json{{"found", true},
                    {"block", r->block_number},
                    {"success", r->success},
                    {"error", r->error},
                    {"gas_units", r->gas_units}});
  }));

  svr.Post("/block", guarded([this](const httplib::Request& req,
                                    httplib::Response& res) {
    std::int64_t now = unix_now();
    if (!req.body.empty()) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_object() && body.contains("now"))
        now = body["now"].get<std::int64_t>();
    }
    Block b = node_.advance_block(now);
    reply(res, json{{"number", b.number},
                    {"timestamp", b.timestamp},
                    {"tx_count", b.transactions.size()}});
  }));

  svr.Post("/accounts", guarded([this](const httplib::Request& req,
                                       httplib::Response& res) {
    json body = http::parse_body(req);
    Address addr = Address::from_hex(field<std::string>(body, "address"));
    node_.ledger().register_account(addr);
    reply(res, json{{"ok", true}});
  }));
}

LedgerHttpServer::~LedgerHttpServer() { stop(); }

int LedgerHttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) fail(Err::BindError, "cannot bind ledger RPC port");
  } else {
    if (!server_->bind_to_port(host, port))
      fail(Err::BindError, "cannot bind ledger RPC port " + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void LedgerHttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

HttpLedgerHandle::HttpLedgerHandle(const std::string& base_url)
    : client_(std::make_unique<httplib::Client>(base_url)) {
  client_->set_connection_timeout(5);
  client_->set_read_timeout(30);
}

HttpLedgerHandle::~HttpLedgerHandle() = default;

Address HttpLedgerHandle::owner_of(const std::string& token_id) {
  auto body = http::expect_json(
      client_->Get("/call/owner_of?token_id=" + token_id));
  return Address::from_hex(body.at("owner").get<std::string>());
}

std::string HttpLedgerHandle::token_uri(const std::string& token_id) {
  auto body =
      http::expect_json(client_->Get("/call/token_uri?token_id=" + token_id));
  return body.at("metadata").get<std::string>();
}

std::optional<Address> HttpLedgerHandle::get_approved(
    const std::string& token_id) {
  auto body = http::expect_json(
      client_->Get("/call/get_approved?token_id=" + token_id));
  if (body.at("approved").is_null()) return std::nullopt;
  return Address::from_hex(body.at("approved").get<std::string>());
}

std::uint64_t HttpLedgerHandle::get_balance(const Address& addr) {
  auto body = http::expect_json(
      client_->Get("/call/get_balance?address=" + addr.to_hex()));
  return body.at("balance").get<std::uint64_t>();
}

std::int64_t HttpLedgerHandle::head() {
  return http::expect_json(client_->Get("/call/head"))
      .at("head")
      .get<std::int64_t>();
}

std::vector<LedgerEvent> HttpLedgerHandle::get_events(const EventFilter& filter,
                                                      std::int64_t from_block,
                                                      std::int64_t to_block) {
  std::string url = "/events?from=" + std::to_string(from_block) +
                    "&to=" + std::to_string(to_block);
  if (filter.name) url += "&name=" + *filter.name;
  if (filter.token_id) url += "&token_id=" + *filter.token_id;
  auto body = http::expect_json(client_->Get(url));
  std::vector<LedgerEvent> out;
  for (const auto& j : body.at("events")) out.push_back(event_from_json(j));
  return out;
}

Address HttpLedgerHandle::contract_address() {
  auto body = http::expect_json(client_->Get("/call/contract_address"));
  return Address::from_hex(body.at("address").get<std::string>());
}

PendingReceipt HttpLedgerHandle::submit(const Transaction& tx) {
  json body{{"sender", tx.sender.to_hex()},
            {"nonce", tx.nonce},
            {"value", tx.value},
            {"call", tx.call},
            {"pubkey", to_hex(tx.pubkey)},
            {"signature", to_hex(tx.signature)}};
  auto r = http::expect_json(
      client_->Post("/submit", body.dump(), "application/json"));
  return {r.at("tx_hash").get<std::string>(), r.at("accepted").get<bool>()};
}

std::optional<TxReceipt> HttpLedgerHandle::receipt(const std::string& tx_hash) {
  auto body = http::expect_json(client_->Get("/receipt?hash=" + tx_hash));
  if (!body.at("found").get<bool>()) return std::nullopt;
  TxReceipt r;
  r.block_number = body.at("block").get<std::int64_t>();
  r.success = body.at("success").get<bool>();
  r.error = body.at("error").get<std::string>();
  r.gas_units = body.at("gas_units").get<std::uint64_t>();
  return r;
}

std::uint64_t HttpLedgerHandle::next_nonce(const Address& addr) {
  auto body =
      http::expect_json(client_->Get("/call/nonce?address=" + addr.to_hex()));
  return body.at("nonce").get<std::uint64_t>();
}

void HttpLedgerHandle::register_account(const Address& addr) {
  json body{{"address", addr.to_hex()}};
  http::expect_json(client_->Post("/accounts", body.dump(), "application/json"));
}

std::int64_t HttpLedgerHandle::advance_block() {
  auto body =
      http::expect_json(client_->Post("/block", "{}", "application/json"));
  return body.at("number").get<std::int64_t>();
}

}  // namespace chainauth
