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

#include <map>
#include <optional>
#include <set>
#include <string>

#include "chainauth/address.hpp"
#include "chainauth/ledger.hpp"

namespace chainauth {

struct Reservation {
  Address beneficiary;
  std::uint64_t price = 0;
};

struct TokenRecord {
  std::string token_id;  // 64 lowercase hex chars
  Address owner;
  std::string metadata;  // compact JWT, immutable after mint
  std::optional<Address> approved;
  std::optional<Reservation> reservation;
};

// ERC-721-style token registry with restricted permissions: only the
// operator mints, burns, and transfers; approval is owner- or
// operator-initiated; metadata is write-once. State mutates only while the
// ledger seals a block, so views are safe under concurrent reads as long as
// callers hold the ledger's shared state lock.
class Registry : public TransactionProcessor {
 public:
  Registry(Address root, Address operator_addr);

  // Views (zero gas).
  Address owner_of(const std::string& token_id) const;      // UnknownToken
  std::string token_uri(const std::string& token_id) const;  // UnknownToken
  std::optional<Address> get_approved(const std::string& token_id) const;
  std::optional<TokenRecord> find_token(const std::string& token_id) const;
  std::size_t token_count() const { return tokens_.size(); }

  Address root_address() const { return root_; }
  Address operator_address() const { return operator_; }
  Address contract_address() const { return contract_address_; }

  // TransactionProcessor
  void apply_call(const std::string& call, TxContext& ctx) override;
  std::vector<std::uint8_t> serialize_state() const override;
  void restore_state(const std::vector<std::uint8_t>& bytes) override;

  // Wire call builders (space-separated canonical text tuples; see the
  // wire appendix in the README).
  static std::string mint_call(const std::string& token_id,
                               const std::string& metadata, const Address& to);
  static std::string mint_reserved_call(const std::string& token_id,
                                        const std::string& metadata,
                                        const Address& beneficiary,
                                        std::uint64_t price);
  static std::string burn_call(const std::string& token_id);
  static std::string transfer_from_call(const Address& from, const Address& to,
                                        const std::string& token_id);
  static std::string approve_call(const Address& approved,
                                  const std::string& token_id);
  static std::string claim_call(const std::string& token_id);
  static std::string set_operator_call(const Address& new_operator);

 private:
  const TokenRecord& require_token(const std::string& token_id) const;
  void require_operator(const Address& caller) const;
  void require_fresh_id(const std::string& token_id) const;

  Address root_;
  Address operator_;
  Address contract_address_;
  std::map<std::string, TokenRecord> tokens_;
  std::set<std::string> used_ids_;  // includes burned ids, never reminted
};

}  // namespace chainauth
