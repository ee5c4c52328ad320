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

#include "chainauth/ledger_access.hpp"
#include "chainauth/node.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace chainauth {

// Ledger RPC: /submit, /call/{view}, /events, /block, /receipt, /accounts.
class LedgerHttpServer {
 public:
  explicit LedgerHttpServer(Node& node);
  ~LedgerHttpServer();

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port. Throws BindError.
  int start(const std::string& host, int port);
  void stop();

 private:
  Node& node_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

// LedgerHandle backed by the ledger RPC. The resource server receives it
// sliced to LedgerReader.
class HttpLedgerHandle : public LedgerHandle {
 public:
  explicit HttpLedgerHandle(const std::string& base_url);
  ~HttpLedgerHandle() override;

  Address owner_of(const std::string& token_id) override;
  std::string token_uri(const std::string& token_id) override;
  std::optional<Address> get_approved(const std::string& token_id) override;
  std::uint64_t get_balance(const Address& addr) override;
  std::int64_t head() override;
  std::vector<LedgerEvent> get_events(const EventFilter& filter,
                                      std::int64_t from_block,
                                      std::int64_t to_block) override;
  Address contract_address() override;
  PendingReceipt submit(const Transaction& tx) override;
  std::optional<TxReceipt> receipt(const std::string& tx_hash) override;
  std::uint64_t next_nonce(const Address& addr) override;
  void register_account(const Address& addr) override;

  // Manual block production, used by drivers and tests.
  std::int64_t advance_block();

 private:
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace chainauth
