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

#include "chainauth/http_auth.hpp"

#include "chainauth/node.hpp"
#include "http_util.hpp"

namespace chainauth {

using http::field;
using http::guarded;
using http::json;
using http::reply;

namespace {

// nonce_response format: "<nonce>.<signature hex>"
std::pair<std::string, Signature> parse_nonce_response(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos)
    fail(Err::BadPoP, "nonce_response must be <nonce>.<signature>");
  return {s.substr(0, dot), signature_from_hex(s.substr(dot + 1))};
}

}  // namespace

AuthHttpServer::AuthHttpServer(AuthServer& core)
    : core_(core), server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;

  svr.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    reply(res, json{{"ok", true}, {"role", "as"}});
  });

  svr.Post("/register", guarded([this](const httplib::Request& req,
                                       httplib::Response& res) {
    json body = http::parse_body(req);
    auto reg =
        core_.register_client(field<std::string>(body, "pub_key"), unix_now());
    reply(res, json{{"pub_key", reg.pub_key_hex},
                    {"address", reg.client_address.to_hex()},
                    {"registered_at", reg.registered_at}});
  }));

  svr.Post("/grant", guarded([this](const httplib::Request& req,
                                    httplib::Response& res) {
    json body = http::parse_body(req);
    auto grant = core_.issue_grant(
        field<std::string>(body, "credential"),
        Address::from_hex(field<std::string>(body, "client_address")),
        field<std::string>(body, "resource_uri"),
        field<std::int64_t>(body, "ttl"), unix_now());
    reply(res,
          json{{"grant_id", grant.grant_id}, {"expires", grant.expires}});
  }));

  svr.Get("/token/nonce",
          guarded([this](const httplib::Request&, httplib::Response& res) {
            reply(res, json{{"nonce", core_.pop_nonce(unix_now())}});
          }));

  svr.Post("/token", guarded([this](const httplib::Request& req,
                                    httplib::Response& res) {
    json body = http::parse_body(req);
    auto [nonce, sig] =
        parse_nonce_response(field<std::string>(body, "nonce_response"));
    auto issued = core_.request_token(
        field<std::string>(body, "grant_id"),
        field<std::string>(body, "pub_key"),
        field<std::string>(body, "resource_uri"), nonce, sig, unix_now());
    reply(res, json{{"jwt", issued.jwt},
                    {"token_id", issued.token_id},
                    {"block", issued.included_block}});
  }));

  svr.Post("/revoke", guarded([this](const httplib::Request& req,
                                     httplib::Response& res) {
    json body = http::parse_body(req);
    std::int64_t block =
        core_.revoke_token(field<std::string>(body, "credential"),
                           field<std::string>(body, "token_id"));
    reply(res, json{{"block", block}});
  }));

  svr.Post("/reserve", guarded([this](const httplib::Request& req,
                                      httplib::Response& res) {
    json body = http::parse_body(req);
    auto issued = core_.reserve_token(
        field<std::string>(body, "credential"),
        Address::from_hex(field<std::string>(body, "client_address")),
        field<std::string>(body, "resource_uri"),
        field<std::uint64_t>(body, "price"),
        field<std::int64_t>(body, "lifetime"), unix_now());
    reply(res, json{{"jwt", issued.jwt},
                    {"token_id", issued.token_id},
                    {"block", issued.included_block}});
  }));
}

AuthHttpServer::~AuthHttpServer() { stop(); }

int AuthHttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) fail(Err::BindError, "cannot bind auth server port");
  } else {
    if (!server_->bind_to_port(host, port))
      fail(Err::BindError,
           "cannot bind auth server port " + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void AuthHttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace chainauth
