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

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "chainauth/address.hpp"
#include "chainauth/crypto.hpp"
#include "chainauth/errors.hpp"

namespace chainauth {

// Fixed per-operation cost in gas units. View calls never pass through a
// transaction and cost 0.
struct GasSchedule {
  std::map<std::string, std::uint64_t, std::less<>> units_by_op;

  static GasSchedule standard();
  std::uint64_t units(std::string_view op) const;
};

struct Transaction {
  Address sender;
  std::uint64_t nonce = 0;
  std::uint64_t value = 0;
  std::string call;  // operation name + args, opaque to the ledger
  PublicKey pubkey{};
  Signature signature{};

  std::string signing_payload() const;
  std::string hash() const;

  static Transaction make_signed(const KeyPair& keys, std::uint64_t nonce,
                                 std::uint64_t value, std::string call);
};

struct LedgerEvent {
  std::string name;  // Transfer | Approval
  Address a;         // Transfer: from;  Approval: owner
  Address b;         // Transfer: to;    Approval: approved
  std::string token_id;
  std::int64_t block_number = 0;
  std::uint32_t event_index = 0;
};

struct AppliedTransaction {
  Transaction tx;
  bool success = false;
  std::string error;  // error code name, empty on success
  std::uint64_t gas_units = 0;
};

struct Block {
  std::int64_t number = 0;
  std::int64_t timestamp = 0;
  std::vector<AppliedTransaction> transactions;
  std::vector<LedgerEvent> events;
};

struct PendingReceipt {
  std::string tx_hash;
  bool accepted = false;
};

struct TxReceipt {
  std::int64_t block_number = 0;
  bool success = false;
  std::string error;
  std::uint64_t gas_units = 0;
};

// Per-transaction execution context handed to the processor. Credits are
// paid out of the transaction's attached value; the unspent remainder is
// refunded to the sender when the call succeeds.
struct TxContext {
  Address sender;
  std::uint64_t value = 0;
  std::vector<std::pair<Address, std::uint64_t>> credits;
  std::vector<LedgerEvent> events;

  void credit(const Address& to, std::uint64_t amount) {
    credits.emplace_back(to, amount);
  }
  void emit(std::string name, const Address& a, const Address& b,
            std::string token_id) {
    events.push_back({std::move(name), a, b, std::move(token_id), 0, 0});
  }
};

// State machine driven by sealed transactions; the registry implements this.
class TransactionProcessor {
 public:
  virtual ~TransactionProcessor() = default;
  // Must either complete fully or throw without mutating state.
  virtual void apply_call(const std::string& call, TxContext& ctx) = 0;
  virtual std::vector<std::uint8_t> serialize_state() const = 0;
  virtual void restore_state(const std::vector<std::uint8_t>& bytes) = 0;
};

struct EventFilter {
  std::optional<std::string> name;
  std::optional<std::string> token_id;

  bool matches(const LedgerEvent& ev) const {
    if (name && ev.name != *name) return false;
    if (token_id && ev.token_id != *token_id) return false;
    return true;
  }
};

// Exactly-once ordered delivery of sealed events; the consumer drains on its
// own thread via poll(). A consumer that lost its handle resumes through
// get_events from a persisted cursor.
class Subscription {
 public:
  std::vector<LedgerEvent> poll();

 private:
  friend class Ledger;
  std::mutex mu_;
  std::deque<LedgerEvent> queue_;
  EventFilter filter_;
};

struct LedgerConfig {
  std::uint64_t gas_price = 0;
  std::vector<std::pair<Address, std::uint64_t>> faucet;
  std::string data_dir;  // empty: no persistence
  std::int64_t genesis_time = 0;
};

// Deterministic single-node append-only ledger. Writes (submit,
// advance_block) serialize through one writer lock; reads run concurrently
// and observe only sealed-block state.
class Ledger {
 public:
  Ledger(LedgerConfig config, TransactionProcessor* processor,
         std::uint64_t deployment_gas_units);
  ~Ledger();

  PendingReceipt submit_transaction(const Transaction& tx);
  Block advance_block(std::int64_t now);

  std::vector<LedgerEvent> get_events(const EventFilter& filter,
                                      std::int64_t from_block,
                                      std::int64_t to_block) const;
  std::uint64_t get_balance(const Address& addr) const;
  std::uint64_t next_nonce(const Address& addr) const;
  std::int64_t head() const;
  Block get_block(std::int64_t number) const;
  std::optional<TxReceipt> receipt(std::string_view tx_hash) const;
  std::size_t mempool_size() const;

  std::shared_ptr<Subscription> subscribe(EventFilter filter);

  void register_account(const Address& addr);
  bool account_exists(const Address& addr) const;

  std::uint64_t total_gas_used() const;
  std::uint64_t fees_burned() const;
  std::uint64_t total_balance() const;  // sum over all accounts
  std::uint64_t deployment_gas() const { return deployment_gas_; }
  std::uint64_t faucet_total() const { return faucet_total_; }
  const GasSchedule& gas_schedule() const { return schedule_; }

  // Writes the state snapshot; the block log is appended continuously.
  void checkpoint();

  // Guards all mutable state; exposed so composed views (registry reads)
  // share the same sealed-state guarantee.
  std::shared_mutex& state_mutex() const { return mu_; }

 private:
  struct Account {
    std::uint64_t balance = 0;
    std::uint64_t nonce = 0;  // next expected
  };

  void apply_one(AppliedTransaction& applied, Block& block);
  void seal_locked(Block&& block, bool persist);
  void restore();
  void append_block_log(const Block& block);

  LedgerConfig config_;
  TransactionProcessor* processor_;
  GasSchedule schedule_ = GasSchedule::standard();
  std::uint64_t deployment_gas_ = 0;
  std::uint64_t faucet_total_ = 0;

  mutable std::shared_mutex mu_;
  std::map<Address, Account> accounts_;
  std::map<Address, std::uint64_t> admitted_nonce_;  // incl. pending txs
  std::deque<AppliedTransaction> mempool_;
  std::vector<Block> blocks_;
  std::map<std::string, TxReceipt> receipts_;
  std::uint64_t total_gas_ = 0;
  std::uint64_t fees_burned_ = 0;

  std::mutex subs_mu_;
  std::vector<std::weak_ptr<Subscription>> subscriptions_;
};

std::vector<std::uint8_t> serialize_block(const Block& block);
Block deserialize_block(const std::vector<std::uint8_t>& bytes);

}  // namespace chainauth
