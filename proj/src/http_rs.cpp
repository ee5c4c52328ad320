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

#include "chainauth/http_rs.hpp"

#include <chrono>

#include "chainauth/node.hpp"
#include "http_util.hpp"

namespace chainauth {

using http::field;
using http::guarded;
using http::json;
using http::reply;

RsHttpServer::RsHttpServer(ResourceServer& core, PayloadFn payload)
    : core_(core),
      payload_(payload ? std::move(payload)
                       : [](const std::string& uri) {
                           return json{{"resource", uri},
                                       {"content", "protected payload"}}
                               .dump();
                         }),
      server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;

  svr.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    reply(res, json{{"ok", true}, {"role", "rs"}});
  });

  // Structural + ledger verification; on success a 401 carrying the
  // proof-of-possession challenge.
  svr.Post("/access", [this](const httplib::Request& req,
                             httplib::Response& res) {
    try {
      json body = http::parse_body(req);
      Challenge ch =
          core_.issue_challenge(field<std::string>(body, "jwt"), unix_now());
      reply(res, json{{"challenge_id", ch.challenge_id}, {"nonce", ch.nonce}},
            401);
    } catch (const Error& e) {
      http::reply_error(res, e, 403);
    } catch (const std::exception& e) {
      reply(res, json{{"error", "Internal"}, {"message", e.what()}}, 500);
    }
  });

  svr.Post("/access/response", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    try {
      json body = http::parse_body(req);
      Session s = core_.verify_challenge_response(
          field<std::string>(body, "challenge_id"),
          signature_from_hex(field<std::string>(body, "signature")),
          field<std::string>(body, "pub_key"), unix_now());
      std::string aud = decode_jwt(s.jwt).aud;
      reply(res, json{{"session_id", s.session_id}, {"payload", payload_(aud)}});
    } catch (const Error& e) {
      http::reply_error(res, e, 403);
    } catch (const std::exception& e) {
      reply(res, json{{"error", "Internal"}, {"message", e.what()}}, 500);
    }
  });

  svr.Get("/resource", guarded([this](const httplib::Request& req,
                                      httplib::Response& res) {
    if (!req.has_param("session"))
      fail(Err::Malformed, "missing query parameter: session");
    std::string session_id = req.get_param_value("session");
    std::string uri;
    if (req.has_param("uri")) {
      uri = req.get_param_value("uri");
    } else if (auto aud = core_.session_aud(session_id)) {
      uri = *aud;
    }
    AccessDecision d = core_.access_with_session(session_id, uri, unix_now());
    if (!d.allowed) {
      reply(res, json{{"error", std::string(to_string(d.deny_reason))}}, 403);
      return;
    }
    reply(res, json{{"payload", payload_(uri)}});
  }));
}

RsHttpServer::~RsHttpServer() { stop(); }

int RsHttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) fail(Err::BindError, "cannot bind resource server port");
  } else {
    if (!server_->bind_to_port(host, port))
      fail(Err::BindError,
           "cannot bind resource server port " + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void RsHttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

RsEventPump::RsEventPump(ResourceServer& core, std::int64_t poll_interval_ms)
    : core_(core), interval_ms_(poll_interval_ms) {
  thread_ = std::thread([this] {
    while (running_.load()) {
      try {
        core_.recover_missed_events();
      } catch (...) {
        // transient ledger unavailability; retry next tick
      }
      for (std::int64_t waited = 0; waited < interval_ms_ && running_.load();
           waited += 10)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  });
}

RsEventPump::~RsEventPump() { stop(); }

void RsEventPump::stop() {
  bool expected = true;
  if (running_.compare_exchange_strong(expected, false)) {
    if (thread_.joinable()) thread_.join();
  }
}

}  // namespace chainauth
