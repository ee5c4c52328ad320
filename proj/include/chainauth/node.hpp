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
#include <memory>
#include <thread>

#include "chainauth/ledger.hpp"
#include "chainauth/registry.hpp"

namespace chainauth {

struct NodeConfig {
  Address root;
  Address operator_addr;
  std::uint64_t gas_price = 0;
  std::vector<std::pair<Address, std::uint64_t>> faucet;
  std::string data_dir;
  std::int64_t genesis_time = 0;
  // Seal a block right after every accepted submission (block interval 0).
  bool auto_seal = false;
};

// One ledger node hosting the token registry. Deployment of the registry is
// part of genesis and is metered at the schedule's deploy cost.
class Node {
 public:
  explicit Node(NodeConfig config);

  Ledger& ledger() { return *ledger_; }
  const Ledger& ledger() const { return *ledger_; }
  Registry& registry() { return *registry_; }

  // Registry views under the ledger's sealed-state lock (zero gas).
  Address owner_of(const std::string& token_id) const;
  std::string token_uri(const std::string& token_id) const;
  std::optional<Address> get_approved(const std::string& token_id) const;
  std::optional<TokenRecord> find_token(const std::string& token_id) const;
  Address operator_address() const;
  Address contract_address() const;

  PendingReceipt submit(const Transaction& tx);
  Block advance_block(std::int64_t now);

  // Sum of all account balances; conservation checks pair this with
  // Ledger::fees_burned and faucet_total.
  std::uint64_t total_balance() const;

 private:
  NodeConfig config_;
  std::unique_ptr<Registry> registry_;
  std::unique_ptr<Ledger> ledger_;
};

// Timed block production (~13 s per block by default, configurable).
class BlockProducer {
 public:
  BlockProducer(Node& node, std::int64_t interval_ms);
  ~BlockProducer();

  void stop();

 private:
  Node& node_;
  std::int64_t interval_ms_;
  std::atomic<bool> running_{true};
  std::thread thread_;
};

std::int64_t unix_now();

}  // namespace chainauth
