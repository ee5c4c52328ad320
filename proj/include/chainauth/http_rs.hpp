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

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "chainauth/resource_server.hpp"

namespace httplib {
class Server;
}

namespace chainauth {

// HTTP front of the resource server: POST /access (returns a challenge),
// POST /access/response (returns a session and the payload), GET /resource.
class RsHttpServer {
 public:
  using PayloadFn = std::function<std::string(const std::string& uri)>;

  explicit RsHttpServer(ResourceServer& core, PayloadFn payload = {});
  ~RsHttpServer();

  int start(const std::string& host, int port);
  void stop();

 private:
  ResourceServer& core_;
  PayloadFn payload_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

// Background Transfer-event consumer: periodically replays new events from
// the persisted cursor so sessions die when their token moves.
class RsEventPump {
 public:
  RsEventPump(ResourceServer& core, std::int64_t poll_interval_ms);
  ~RsEventPump();

  void stop();

 private:
  ResourceServer& core_;
  std::int64_t interval_ms_;
  std::atomic<bool> running_{true};
  std::thread thread_;
};

}  // namespace chainauth
