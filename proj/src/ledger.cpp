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

#include "chainauth/ledger.hpp"

#include <filesystem>
#include <fstream>

#include "chainauth/wire.hpp"

namespace chainauth {

namespace fs = std::filesystem;

namespace {

constexpr char kBlockLogMagic[4] = {'C', 'A', 'B', 'L'};
constexpr char kSnapshotMagic[4] = {'C', 'A', 'S', 'N'};
constexpr std::uint32_t kFormatVersion = 1;

std::string op_name(const std::string& call) {
  auto sp = call.find(' ');
  return sp == std::string::npos ? call : call.substr(0, sp);
}

void write_event(ByteWriter& w, const LedgerEvent& ev) {
  w.str(ev.name);
  w.raw(ev.a.bytes().data(), Address::kSize);
  w.raw(ev.b.bytes().data(), Address::kSize);
  w.str(ev.token_id);
  w.i64(ev.block_number);
  w.u32(ev.event_index);
}

LedgerEvent read_event(ByteReader& r) {
  LedgerEvent ev;
  ev.name = r.str();
  r.raw(ev.a.bytes().data(), Address::kSize);
  r.raw(ev.b.bytes().data(), Address::kSize);
  ev.token_id = r.str();
  ev.block_number = r.i64();
  ev.event_index = r.u32();
  return ev;
}

}  // namespace

GasSchedule GasSchedule::standard() {
  GasSchedule s;
  s.units_by_op = {
      {"deploy", 1585444},      {"mint", 254141},
      {"mint_reserved", 254141}, {"burn", 85791},
      {"transfer_from", 63858}, {"claim", 63858},
      {"approve", 45735},       {"set_operator", 45735},
  };
  return s;
}

std::uint64_t GasSchedule::units(std::string_view op) const {
  auto it = units_by_op.find(op);
  return it == units_by_op.end() ? 0 : it->second;
}

std::string Transaction::signing_payload() const {
  return "tx|" + sender.to_hex() + "|" + std::to_string(nonce) + "|" +
         std::to_string(value) + "|" + call;
}

std::string Transaction::hash() const {
  auto digest = sha256(signing_payload() + "|" +
                       to_hex(signature.data(), signature.size()));
  return to_hex(digest.data(), digest.size());
}

Transaction Transaction::make_signed(const KeyPair& keys, std::uint64_t nonce,
                                     std::uint64_t value, std::string call) {
  Transaction tx;
  tx.sender = Address::from_public_key(keys.public_key);
  tx.nonce = nonce;
  tx.value = value;
  tx.call = std::move(call);
  tx.pubkey = keys.public_key;
  tx.signature = keys.sign(tx.signing_payload());
  return tx;
}

std::vector<LedgerEvent> Subscription::poll() {
  std::lock_guard lk(mu_);
  std::vector<LedgerEvent> out(queue_.begin(), queue_.end());
  queue_.clear();
  return out;
}

std::vector<std::uint8_t> serialize_block(const Block& block) {
  ByteWriter w;
  w.i64(block.number);
  w.i64(block.timestamp);
  w.u32(static_cast<std::uint32_t>(block.transactions.size()));
  for (const auto& at : block.transactions) {
    w.raw(at.tx.sender.bytes().data(), Address::kSize);
    w.u64(at.tx.nonce);
    w.u64(at.tx.value);
    w.str(at.tx.call);
    w.raw(at.tx.pubkey.data(), at.tx.pubkey.size());
    w.raw(at.tx.signature.data(), at.tx.signature.size());
    w.u8(at.success ? 1 : 0);
    w.str(at.error);
    w.u64(at.gas_units);
  }
  w.u32(static_cast<std::uint32_t>(block.events.size()));
  for (const auto& ev : block.events) write_event(w, ev);
  return w.bytes();
}

Block deserialize_block(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes.data(), bytes.size());
  Block block;
  block.number = r.i64();
  block.timestamp = r.i64();
  std::uint32_t ntx = r.u32();
  block.transactions.resize(ntx);
  for (auto& at : block.transactions) {
    r.raw(at.tx.sender.bytes().data(), Address::kSize);
    at.tx.nonce = r.u64();
    at.tx.value = r.u64();
    at.tx.call = r.str();
    r.raw(at.tx.pubkey.data(), at.tx.pubkey.size());
    r.raw(at.tx.signature.data(), at.tx.signature.size());
    at.success = r.u8() != 0;
    at.error = r.str();
    at.gas_units = r.u64();
  }
  std::uint32_t nev = r.u32();
  block.events.resize(nev);
  for (auto& ev : block.events) ev = read_event(r);
  return block;
}

Ledger::Ledger(LedgerConfig config, TransactionProcessor* processor,
               std::uint64_t deployment_gas_units)
    : config_(std::move(config)),
      processor_(processor),
      deployment_gas_(deployment_gas_units) {
  for (const auto& [addr, amount] : config_.faucet) {
    accounts_[addr].balance += amount;
    faucet_total_ += amount;
  }
  bool restored = false;
  if (!config_.data_dir.empty()) {
    fs::create_directories(config_.data_dir);
    if (fs::exists(fs::path(config_.data_dir) / "blocklog.bin")) {
      restore();
      restored = true;
    }
  }
  if (!restored) {
    Block genesis;
    genesis.number = 0;
    genesis.timestamp = config_.genesis_time;
    std::unique_lock lk(mu_);
    seal_locked(std::move(genesis), /*persist=*/true);
  }
}

Ledger::~Ledger() {
  if (!config_.data_dir.empty()) {
    try {
      checkpoint();
    } catch (...) {
      // best effort on shutdown; the block log is already durable
    }
  }
}

PendingReceipt Ledger::submit_transaction(const Transaction& tx) {
  std::unique_lock lk(mu_);
  auto acct_it = accounts_.find(tx.sender);
  if (acct_it == accounts_.end())
    fail(Err::UnknownSender, "sender account does not exist: " + tx.sender.to_hex());
  if (Address::from_public_key(tx.pubkey) != tx.sender ||
      !verify_signature(tx.pubkey, tx.signing_payload(), tx.signature))
    fail(Err::BadTxSignature, "transaction signature verification failed");

  std::uint64_t expected = acct_it->second.nonce;
  if (auto it = admitted_nonce_.find(tx.sender); it != admitted_nonce_.end())
    expected = it->second;
  if (tx.nonce != expected)
    fail(Err::BadNonce, "expected nonce " + std::to_string(expected) +
                            ", got " + std::to_string(tx.nonce));

  std::uint64_t cost = schedule_.units(op_name(tx.call)) * config_.gas_price;
  if (acct_it->second.balance < tx.value + cost)
    fail(Err::InsufficientFunds, "balance does not cover value plus gas");

  admitted_nonce_[tx.sender] = expected + 1;
  AppliedTransaction at;
  at.tx = tx;
  mempool_.push_back(std::move(at));
  return {tx.hash(), true};
}

void Ledger::apply_one(AppliedTransaction& applied, Block& block) {
  const Transaction& tx = applied.tx;
  std::uint64_t gas = schedule_.units(op_name(tx.call));
  applied.gas_units = gas;
  std::uint64_t cost = gas * config_.gas_price;
  Account& acct = accounts_[tx.sender];

  bool gas_charged = false;
  bool value_debited = false;
  try {
    if (acct.balance < cost)
      fail(Err::InsufficientFunds, "balance does not cover gas");
    acct.balance -= cost;
    fees_burned_ += cost;
    gas_charged = true;
    if (acct.balance < tx.value)
      fail(Err::InsufficientFunds, "balance does not cover attached value");
    acct.balance -= tx.value;
    value_debited = true;

    TxContext ctx;
    ctx.sender = tx.sender;
    ctx.value = tx.value;
    processor_->apply_call(tx.call, ctx);

    std::uint64_t paid = 0;
    for (const auto& [to, amount] : ctx.credits) paid += amount;
    if (paid > tx.value) fail(Err::Internal, "credits exceed attached value");
    for (const auto& [to, amount] : ctx.credits) accounts_[to].balance += amount;
    acct.balance += tx.value - paid;
    value_debited = false;

    for (auto& ev : ctx.events) {
      ev.block_number = block.number;
      ev.event_index = static_cast<std::uint32_t>(block.events.size());
      block.events.push_back(std::move(ev));
    }
    applied.success = true;
  } catch (const Error& e) {
    if (value_debited) acct.balance += tx.value;
    applied.success = false;
    applied.error = std::string(to_string(e.code()));
  } catch (const std::exception&) {
    if (value_debited) acct.balance += tx.value;
    applied.success = false;
    applied.error = std::string(to_string(Err::Internal));
  }
  (void)gas_charged;
  acct.nonce = tx.nonce + 1;
  total_gas_ += gas;
}

void Ledger::seal_locked(Block&& block, bool persist) {
  for (const auto& at : block.transactions)
    receipts_[at.tx.hash()] =
        TxReceipt{block.number, at.success, at.error, at.gas_units};
  blocks_.push_back(std::move(block));
  if (persist && !config_.data_dir.empty()) append_block_log(blocks_.back());
}

Block Ledger::advance_block(std::int64_t now) {
  Block sealed;
  {
    std::unique_lock lk(mu_);
    Block block;
    block.number = blocks_.back().number + 1;
    block.timestamp = now;
    while (!mempool_.empty()) {
      AppliedTransaction at = std::move(mempool_.front());
      mempool_.pop_front();
      apply_one(at, block);
      block.transactions.push_back(std::move(at));
    }
    admitted_nonce_.clear();
    sealed = block;
    seal_locked(std::move(block), /*persist=*/true);
  }
  {
    std::lock_guard lk(subs_mu_);
    std::erase_if(subscriptions_, [&](std::weak_ptr<Subscription>& weak) {
      auto sub = weak.lock();
      if (!sub) return true;
      std::lock_guard sl(sub->mu_);
      for (const auto& ev : sealed.events)
        if (sub->filter_.matches(ev)) sub->queue_.push_back(ev);
      return false;
    });
  }
  return sealed;
}

std::vector<LedgerEvent> Ledger::get_events(const EventFilter& filter,
                                            std::int64_t from_block,
                                            std::int64_t to_block) const {
  std::shared_lock lk(mu_);
  std::int64_t head = blocks_.back().number;
  if (from_block < 0 || from_block > to_block || to_block > head)
    fail(Err::RangeBeyondHead, "event range outside sealed chain");
  std::vector<LedgerEvent> out;
  for (std::int64_t n = from_block; n <= to_block; ++n)
    for (const auto& ev : blocks_[static_cast<std::size_t>(n)].events)
      if (filter.matches(ev)) out.push_back(ev);
  return out;
}

std::uint64_t Ledger::get_balance(const Address& addr) const {
  std::shared_lock lk(mu_);
  auto it = accounts_.find(addr);
  return it == accounts_.end() ? 0 : it->second.balance;
}

std::uint64_t Ledger::next_nonce(const Address& addr) const {
  std::shared_lock lk(mu_);
  if (auto it = admitted_nonce_.find(addr); it != admitted_nonce_.end())
    return it->second;
  auto it = accounts_.find(addr);
  return it == accounts_.end() ? 0 : it->second.nonce;
}

std::int64_t Ledger::head() const {
  std::shared_lock lk(mu_);
  return blocks_.back().number;
}

Block Ledger::get_block(std::int64_t number) const {
  std::shared_lock lk(mu_);
  if (number < 0 || number > blocks_.back().number)
    fail(Err::RangeBeyondHead, "block number beyond head");
  return blocks_[static_cast<std::size_t>(number)];
}

std::optional<TxReceipt> Ledger::receipt(std::string_view tx_hash) const {
  std::shared_lock lk(mu_);
  auto it = receipts_.find(std::string(tx_hash));
  if (it == receipts_.end()) return std::nullopt;
  return it->second;
}

std::size_t Ledger::mempool_size() const {
  std::shared_lock lk(mu_);
  return mempool_.size();
}

std::shared_ptr<Subscription> Ledger::subscribe(EventFilter filter) {
  auto sub = std::shared_ptr<Subscription>(new Subscription());
  sub->filter_ = std::move(filter);
  std::lock_guard lk(subs_mu_);
  subscriptions_.push_back(sub);
  return sub;
}

void Ledger::register_account(const Address& addr) {
  std::unique_lock lk(mu_);
  accounts_.try_emplace(addr);
}

bool Ledger::account_exists(const Address& addr) const {
  std::shared_lock lk(mu_);
  return accounts_.count(addr) != 0;
}

std::uint64_t Ledger::total_gas_used() const {
  std::shared_lock lk(mu_);
  return total_gas_;
}

std::uint64_t Ledger::fees_burned() const {
  std::shared_lock lk(mu_);
  return fees_burned_;
}

std::uint64_t Ledger::total_balance() const {
  std::shared_lock lk(mu_);
  std::uint64_t sum = 0;
  for (const auto& [addr, acct] : accounts_) sum += acct.balance;
  return sum;
}

void Ledger::append_block_log(const Block& block) {
  fs::path path = fs::path(config_.data_dir) / "blocklog.bin";
  bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) fail(Err::Internal, "cannot open block log for append");
  if (fresh) {
    out.write(kBlockLogMagic, 4);
    std::uint32_t v = kFormatVersion;
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  auto bytes = serialize_block(block);
  std::uint32_t len = static_cast<std::uint32_t>(bytes.size());
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
}

void Ledger::checkpoint() {
  if (config_.data_dir.empty()) return;
  std::shared_lock lk(mu_);
  ByteWriter w;
  w.raw(reinterpret_cast<const std::uint8_t*>(kSnapshotMagic), 4);
  w.u32(kFormatVersion);
  w.i64(blocks_.back().number);
  w.u32(static_cast<std::uint32_t>(accounts_.size()));
  for (const auto& [addr, acct] : accounts_) {
    w.raw(addr.bytes().data(), Address::kSize);
    w.u64(acct.balance);
    w.u64(acct.nonce);
  }
  w.u64(total_gas_);
  w.u64(fees_burned_);
  w.u64(faucet_total_);
  auto state = processor_->serialize_state();
  w.u32(static_cast<std::uint32_t>(state.size()));
  w.raw(state.data(), state.size());

  fs::path tmp = fs::path(config_.data_dir) / "snapshot.bin.tmp";
  fs::path final_path = fs::path(config_.data_dir) / "snapshot.bin";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::Internal, "cannot write snapshot");
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
  }
  fs::rename(tmp, final_path);
}

void Ledger::restore() {
  // Read the whole block log.
  fs::path log_path = fs::path(config_.data_dir) / "blocklog.bin";
  std::ifstream in(log_path, std::ios::binary);
  if (!in) fail(Err::Internal, "cannot open block log");
  char magic[4];
  std::uint32_t version = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  if (!in || std::memcmp(magic, kBlockLogMagic, 4) != 0 ||
      version != kFormatVersion)
    fail(Err::Malformed, "block log header mismatch");
  std::vector<Block> log;
  while (true) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    if (!in) break;
    std::vector<std::uint8_t> bytes(len);
    in.read(reinterpret_cast<char*>(bytes.data()), len);
    if (!in) fail(Err::Malformed, "truncated block log record");
    log.push_back(deserialize_block(bytes));
  }
  if (log.empty()) fail(Err::Malformed, "empty block log");

  // Try the snapshot; fall back to replay from genesis.
  std::int64_t snap_head = -1;
  fs::path snap_path = fs::path(config_.data_dir) / "snapshot.bin";
  if (fs::exists(snap_path)) {
    std::ifstream sin(snap_path, std::ios::binary);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(sin)),
                                    std::istreambuf_iterator<char>());
    try {
      ByteReader r(bytes.data(), bytes.size());
      std::uint8_t m[4];
      r.raw(m, 4);
      if (std::memcmp(m, kSnapshotMagic, 4) != 0 || r.u32() != kFormatVersion)
        fail(Err::Malformed, "snapshot header mismatch");
      std::int64_t h = r.i64();
      if (h > log.back().number) fail(Err::Malformed, "snapshot ahead of log");
      std::map<Address, Account> accounts;
      std::uint32_t n = r.u32();
      for (std::uint32_t i = 0; i < n; ++i) {
        Address addr;
        r.raw(addr.bytes().data(), Address::kSize);
        Account a;
        a.balance = r.u64();
        a.nonce = r.u64();
        accounts[addr] = a;
      }
      std::uint64_t tg = r.u64();
      std::uint64_t fb = r.u64();
      std::uint64_t ft = r.u64();
      std::uint32_t slen = r.u32();
      std::vector<std::uint8_t> state(slen);
      r.raw(state.data(), slen);
      processor_->restore_state(state);
      accounts_ = std::move(accounts);
      total_gas_ = tg;
      fees_burned_ = fb;
      faucet_total_ = ft;
      snap_head = h;
    } catch (const Error&) {
      snap_head = -1;  // corrupt snapshot, replay everything
    }
  }

  std::unique_lock lk(mu_);
  for (const auto& block : log) {
    if (block.number <= snap_head) {
      Block copy = block;
      seal_locked(std::move(copy), /*persist=*/false);
      continue;
    }
    // Deterministic re-execution of the recorded transactions.
    Block replay;
    replay.number = block.number;
    replay.timestamp = block.timestamp;
    for (const auto& recorded : block.transactions) {
      AppliedTransaction at;
      at.tx = recorded.tx;
      apply_one(at, replay);
      replay.transactions.push_back(std::move(at));
    }
    seal_locked(std::move(replay), /*persist=*/false);
  }
}

}  // namespace chainauth
