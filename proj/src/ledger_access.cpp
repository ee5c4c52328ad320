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

#include "chainauth/ledger_access.hpp"

#include <chrono>
#include <thread>

namespace chainauth {

TxReceipt LedgerHandle::wait_for_receipt(const std::string& tx_hash,
                                         std::int64_t timeout_ms) {
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(timeout_ms);
  while (true) {
    if (auto r = receipt(tx_hash)) return *r;
    if (std::chrono::steady_clock::now() >= deadline)
      fail(Err::Timeout, "transaction not sealed within timeout: " + tx_hash);
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

Address InProcessLedgerHandle::owner_of(const std::string& token_id) {
  return node_.owner_of(token_id);
}

std::string InProcessLedgerHandle::token_uri(const std::string& token_id) {
  return node_.token_uri(token_id);
}

std::optional<Address> InProcessLedgerHandle::get_approved(
    const std::string& token_id) {
  return node_.get_approved(token_id);
}

std::uint64_t InProcessLedgerHandle::get_balance(const Address& addr) {
  return node_.ledger().get_balance(addr);
}

std::int64_t InProcessLedgerHandle::head() { return node_.ledger().head(); }

std::vector<LedgerEvent> InProcessLedgerHandle::get_events(
    const EventFilter& filter, std::int64_t from_block, std::int64_t to_block) {
  return node_.ledger().get_events(filter, from_block, to_block);
}

Address InProcessLedgerHandle::contract_address() {
  return node_.contract_address();
}

PendingReceipt InProcessLedgerHandle::submit(const Transaction& tx) {
  return node_.submit(tx);
}

std::optional<TxReceipt> InProcessLedgerHandle::receipt(
    const std::string& tx_hash) {
  return node_.ledger().receipt(tx_hash);
}

std::uint64_t InProcessLedgerHandle::next_nonce(const Address& addr) {
  return node_.ledger().next_nonce(addr);
}

void InProcessLedgerHandle::register_account(const Address& addr) {
  node_.ledger().register_account(addr);
}

}  // namespace chainauth
