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
#include <optional>
#include <string>

#include "chainauth/ledger.hpp"
#include "chainauth/node.hpp"

namespace chainauth {

// Read-only view of the ledger and registry. The resource server is handed
// only this interface: it has no signing account and no way to write.
class LedgerReader {
 public:
  virtual ~LedgerReader() = default;

  virtual Address owner_of(const std::string& token_id) = 0;
  virtual std::string token_uri(const std::string& token_id) = 0;
  virtual std::optional<Address> get_approved(const std::string& token_id) = 0;
  virtual std::uint64_t get_balance(const Address& addr) = 0;
  virtual std::int64_t head() = 0;
  virtual std::vector<LedgerEvent> get_events(const EventFilter& filter,
                                              std::int64_t from_block,
                                              std::int64_t to_block) = 0;
  virtual Address contract_address() = 0;
};

// Full handle: reads plus transaction submission and account management.
class LedgerHandle : public LedgerReader {
 public:
  virtual PendingReceipt submit(const Transaction& tx) = 0;
  virtual std::optional<TxReceipt> receipt(const std::string& tx_hash) = 0;
  virtual std::uint64_t next_nonce(const Address& addr) = 0;
  virtual void register_account(const Address& addr) = 0;

  // Polls until the transaction is sealed; throws Timeout after timeout_ms.
  TxReceipt wait_for_receipt(const std::string& tx_hash,
                             std::int64_t timeout_ms = 30000);
};

class InProcessLedgerHandle : public LedgerHandle {
 public:
  explicit InProcessLedgerHandle(Node& node) : node_(node) {}

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

 private:
  Node& node_;
};

}  // namespace chainauth
