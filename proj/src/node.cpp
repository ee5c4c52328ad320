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

#include "chainauth/node.hpp"

#include <chrono>

namespace chainauth {

std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Node::Node(NodeConfig config) : config_(std::move(config)) {
  registry_ = std::make_unique<Registry>(config_.root, config_.operator_addr);
  LedgerConfig lc;
  lc.gas_price = config_.gas_price;
  lc.faucet = config_.faucet;
  lc.data_dir = config_.data_dir;
  lc.genesis_time = config_.genesis_time;
  ledger_ = std::make_unique<Ledger>(lc, registry_.get(),
                                     GasSchedule::standard().units("deploy"));
  ledger_->register_account(config_.root);
  ledger_->register_account(config_.operator_addr);
}

Address Node::owner_of(const std::string& token_id) const {
  std::shared_lock lk(ledger_->state_mutex());
  return registry_->owner_of(token_id);
}

std::string Node::token_uri(const std::string& token_id) const {
  std::shared_lock lk(ledger_->state_mutex());
  return registry_->token_uri(token_id);
}

std::optional<Address> Node::get_approved(const std::string& token_id) const {
  std::shared_lock lk(ledger_->state_mutex());
  return registry_->get_approved(token_id);
}

std::optional<TokenRecord> Node::find_token(const std::string& token_id) const {
  std::shared_lock lk(ledger_->state_mutex());
  return registry_->find_token(token_id);
}

Address Node::operator_address() const {
  std::shared_lock lk(ledger_->state_mutex());
  return registry_->operator_address();
}

Address Node::contract_address() const {
  return registry_->contract_address();
}

PendingReceipt Node::submit(const Transaction& tx) {
  PendingReceipt receipt = ledger_->submit_transaction(tx);
  if (config_.auto_seal) ledger_->advance_block(unix_now());
  return receipt;
}

Block Node::advance_block(std::int64_t now) {
  return ledger_->advance_block(now);
}

std::uint64_t Node::total_balance() const { return ledger_->total_balance(); }

BlockProducer::BlockProducer(Node& node, std::int64_t interval_ms)
    : node_(node), interval_ms_(interval_ms) {
  thread_ = std::thread([this] {
    auto next = std::chrono::steady_clock::now() +
                std::chrono::milliseconds(interval_ms_);
    while (running_.load()) {
      std::this_thread::sleep_until(next);
      if (!running_.load()) break;
      node_.advance_block(unix_now());
      next += std::chrono::milliseconds(interval_ms_);
    }
  });
}

BlockProducer::~BlockProducer() { stop(); }

void BlockProducer::stop() {
  bool expected = true;
  if (running_.compare_exchange_strong(expected, false)) {
    if (thread_.joinable()) thread_.join();
  }
}

}  // namespace chainauth
