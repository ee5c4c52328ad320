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

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <string>

#include "chainauth/errors.hpp"

namespace chainauth::http {

using json = nlohmann::json;

inline void reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void reply_error(httplib::Response& res, const Error& e,
                        int status = 400) {
  reply(res, json{{"error", std::string(to_string(e.code()))},
                  {"message", e.what()}},
        status);
}

inline json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object())
    fail(Err::Malformed, "request body is not a JSON object");
  return body;
}

template <typename T>
T field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end())
    fail(Err::Malformed, std::string("missing field: ") + name);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(Err::Malformed, std::string("bad type for field: ") + name);
  }
}

// Wraps a handler so thrown Errors become JSON error responses.
template <typename F>
auto guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req,
                                  httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      int status = 400;
      switch (e.code()) {
        case Err::Unauthorized:
          status = 401;
          break;
        case Err::UnknownToken:
        case Err::UnknownGrant:
        case Err::UnknownChallenge:
        case Err::UnknownSession:
          status = 404;
          break;
        default:
          break;
      }
      reply_error(res, e, status);
    } catch (const std::exception& e) {
      reply(res, json{{"error", "Internal"}, {"message", e.what()}}, 500);
    }
  };
}

// Raises the error carried by a JSON error body from a peer.
[[noreturn]] inline void raise_remote(const json& body, int status) {
  std::string name = body.is_object() ? body.value("error", "Internal")
                                      : std::string("Internal");
  std::string message =
      body.is_object() ? body.value("message", "") : std::string();
  (void)status;
  throw Error(err_from_string(name), message.empty() ? name : message);
}

inline json expect_json(const httplib::Result& result) {
  if (!result)
    fail(Err::Internal, "HTTP request failed: " +
                            httplib::to_string(result.error()));
  json body = json::parse(result->body, nullptr, false);
  if (result->status >= 400) {
    if (body.is_discarded()) fail(Err::Internal, "peer returned an error");
    raise_remote(body, result->status);
  }
  if (body.is_discarded()) fail(Err::Malformed, "peer returned invalid JSON");
  return body;
}

}  // namespace chainauth::http
