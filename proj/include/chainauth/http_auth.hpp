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
#include <thread>

#include "chainauth/auth_server.hpp"

namespace httplib {
class Server;
}

namespace chainauth {

// HTTP front of the authorization server: /register, /grant, /token/nonce,
// /token, /revoke, /reserve.
class AuthHttpServer {
 public:
  explicit AuthHttpServer(AuthServer& core);
  ~AuthHttpServer();

  int start(const std::string& host, int port);
  void stop();

 private:
  AuthServer& core_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace chainauth
