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

#include "chainauth/registry.hpp"

#include <sstream>

#include "chainauth/token_format.hpp"
#include "chainauth/wire.hpp"

namespace chainauth {

namespace {

std::vector<std::string> split_call(const std::string& call) {
  std::vector<std::string> parts;
  std::istringstream in(call);
  std::string part;
  while (in >> part) parts.push_back(part);
  return parts;
}

std::uint64_t parse_amount(const std::string& s) {
  if (s.empty()) fail(Err::Malformed, "empty amount");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') fail(Err::Malformed, "amount is not a decimal");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

std::string normalize_token_id(const std::string& id) {
  std::string out = id;
  for (char& c : out)
    if (c >= 'A' && c <= 'F') c += 'a' - 'A';
  if (!is_valid_token_id(out))
    fail(Err::Malformed, "token id must be 64 hex characters");
  return out;
}

}  // namespace

Registry::Registry(Address root, Address operator_addr)
    : root_(root), operator_(operator_addr) {
  // The simulated contract gets a stable address of its own, derived from
  // the deployer; operator rotation does not change it.
  auto digest = sha256("contract:" + root_.to_hex());
  std::copy(digest.begin() + (digest.size() - Address::kSize), digest.end(),
            contract_address_.bytes().begin());
}

const TokenRecord& Registry::require_token(const std::string& token_id) const {
  auto it = tokens_.find(token_id);
  if (it == tokens_.end())
    fail(Err::UnknownToken, "no such token: " + token_id);
  return it->second;
}

void Registry::require_operator(const Address& caller) const {
  if (caller != operator_)
    fail(Err::NotOperator, "caller is not the contract operator");
}

void Registry::require_fresh_id(const std::string& token_id) const {
  if (used_ids_.count(token_id))
    fail(Err::DuplicateTokenId, "token id already used: " + token_id);
}

Address Registry::owner_of(const std::string& token_id) const {
  return require_token(normalize_token_id(token_id)).owner;
}

std::string Registry::token_uri(const std::string& token_id) const {
  return require_token(normalize_token_id(token_id)).metadata;
}

std::optional<Address> Registry::get_approved(
    const std::string& token_id) const {
  return require_token(normalize_token_id(token_id)).approved;
}

std::optional<TokenRecord> Registry::find_token(
    const std::string& token_id) const {
  auto it = tokens_.find(normalize_token_id(token_id));
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

void Registry::apply_call(const std::string& call, TxContext& ctx) {
  auto parts = split_call(call);
  if (parts.empty()) fail(Err::Malformed, "empty call");
  const std::string& op = parts[0];

  if (op == "mint" || op == "mint_reserved") {
    if (parts.size() != (op == "mint" ? 4u : 5u))
      fail(Err::Malformed, "wrong argument count for " + op);
    require_operator(ctx.sender);
    std::string id = normalize_token_id(parts[1]);
    require_fresh_id(id);
    TokenRecord rec;
    rec.token_id = id;
    rec.metadata = parts[2];
    if (op == "mint") {
      rec.owner = Address::from_hex(parts[3]);
    } else {
      rec.owner = operator_;
      rec.reservation =
          Reservation{Address::from_hex(parts[3]), parse_amount(parts[4])};
    }
    used_ids_.insert(id);
    Address owner = rec.owner;
    tokens_.emplace(id, std::move(rec));
    ctx.emit("Transfer", Address::zero(), owner, id);
    return;
  }

  if (op == "burn") {
    if (parts.size() != 2) fail(Err::Malformed, "wrong argument count for burn");
    require_operator(ctx.sender);
    std::string id = normalize_token_id(parts[1]);
    const TokenRecord& rec = require_token(id);
    Address owner = rec.owner;
    tokens_.erase(id);
    ctx.emit("Transfer", owner, Address::zero(), id);
    return;
  }

  if (op == "transfer_from") {
    if (parts.size() != 4)
      fail(Err::Malformed, "wrong argument count for transfer_from");
    require_operator(ctx.sender);
    Address from = Address::from_hex(parts[1]);
    Address to = Address::from_hex(parts[2]);
    std::string id = normalize_token_id(parts[3]);
    TokenRecord& rec = tokens_.at(require_token(id).token_id);
    if (rec.owner != from)
      fail(Err::FromMismatch, "from does not match current owner");
    rec.owner = to;
    rec.approved.reset();  // approval never survives a transfer
    rec.reservation.reset();
    ctx.emit("Transfer", from, to, id);
    return;
  }

  if (op == "approve") {
    if (parts.size() != 3)
      fail(Err::Malformed, "wrong argument count for approve");
    Address approved = Address::from_hex(parts[1]);
    std::string id = normalize_token_id(parts[2]);
    TokenRecord& rec = tokens_.at(require_token(id).token_id);
    if (ctx.sender != rec.owner && ctx.sender != operator_)
      fail(Err::NotAuthorized, "only the owner or the operator may approve");
    rec.approved = approved;
    ctx.emit("Approval", rec.owner, approved, id);
    return;
  }

  if (op == "claim") {
    if (parts.size() != 2) fail(Err::Malformed, "wrong argument count for claim");
    std::string id = normalize_token_id(parts[1]);
    TokenRecord& rec = tokens_.at(require_token(id).token_id);
    if (!rec.reservation)
      fail(Err::NotReserved, "token has no reservation");
    if (ctx.sender != rec.reservation->beneficiary)
      fail(Err::NotBeneficiary, "caller is not the reserved beneficiary");
    if (ctx.value < rec.reservation->price)
      fail(Err::InsufficientPayment, "attached value below reservation price");
    Address from = rec.owner;
    ctx.credit(operator_, rec.reservation->price);
    rec.owner = rec.reservation->beneficiary;
    rec.approved.reset();
    rec.reservation.reset();
    ctx.emit("Transfer", from, rec.owner, id);
    return;
  }

  if (op == "set_operator") {
    if (parts.size() != 2)
      fail(Err::Malformed, "wrong argument count for set_operator");
    if (ctx.sender != root_)
      fail(Err::NotRoot, "only the deployer may rotate the operator");
    operator_ = Address::from_hex(parts[1]);
    return;
  }

  fail(Err::Malformed, "unknown registry operation: " + op);
}

std::vector<std::uint8_t> Registry::serialize_state() const {
  ByteWriter w;
  w.raw(root_.bytes().data(), Address::kSize);
  w.raw(operator_.bytes().data(), Address::kSize);
  w.raw(contract_address_.bytes().data(), Address::kSize);
  w.u32(static_cast<std::uint32_t>(tokens_.size()));
  for (const auto& [id, rec] : tokens_) {
    w.str(id);
    w.raw(rec.owner.bytes().data(), Address::kSize);
    w.str(rec.metadata);
    w.u8(rec.approved ? 1 : 0);
    if (rec.approved) w.raw(rec.approved->bytes().data(), Address::kSize);
    w.u8(rec.reservation ? 1 : 0);
    if (rec.reservation) {
      w.raw(rec.reservation->beneficiary.bytes().data(), Address::kSize);
      w.u64(rec.reservation->price);
    }
  }
  w.u32(static_cast<std::uint32_t>(used_ids_.size()));
  for (const auto& id : used_ids_) w.str(id);
  return w.bytes();
}

void Registry::restore_state(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes.data(), bytes.size());
  r.raw(root_.bytes().data(), Address::kSize);
  r.raw(operator_.bytes().data(), Address::kSize);
  r.raw(contract_address_.bytes().data(), Address::kSize);
  tokens_.clear();
  used_ids_.clear();
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    TokenRecord rec;
    rec.token_id = r.str();
    r.raw(rec.owner.bytes().data(), Address::kSize);
    rec.metadata = r.str();
    if (r.u8()) {
      Address a;
      r.raw(a.bytes().data(), Address::kSize);
      rec.approved = a;
    }
    if (r.u8()) {
      Reservation res;
      r.raw(res.beneficiary.bytes().data(), Address::kSize);
      res.price = r.u64();
      rec.reservation = res;
    }
    tokens_.emplace(rec.token_id, std::move(rec));
  }
  std::uint32_t m = r.u32();
  for (std::uint32_t i = 0; i < m; ++i) used_ids_.insert(r.str());
}

std::string Registry::mint_call(const std::string& token_id,
                                const std::string& metadata,
                                const Address& to) {
  return "mint " + token_id + " " + metadata + " " + to.to_hex();
}

std::string Registry::mint_reserved_call(const std::string& token_id,
                                         const std::string& metadata,
                                         const Address& beneficiary,
                                         std::uint64_t price) {
  return "mint_reserved " + token_id + " " + metadata + " " +
         beneficiary.to_hex() + " " + std::to_string(price);
}

std::string Registry::burn_call(const std::string& token_id) {
  return "burn " + token_id;
}

std::string Registry::transfer_from_call(const Address& from, const Address& to,
                                         const std::string& token_id) {
  return "transfer_from " + from.to_hex() + " " + to.to_hex() + " " + token_id;
}

std::string Registry::approve_call(const Address& approved,
                                   const std::string& token_id) {
  return "approve " + approved.to_hex() + " " + token_id;
}

std::string Registry::claim_call(const std::string& token_id) {
  return "claim " + token_id;
}

std::string Registry::set_operator_call(const Address& new_operator) {
  return "set_operator " + new_operator.to_hex();
}

}  // namespace chainauth
