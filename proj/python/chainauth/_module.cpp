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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "chainauth/auth_server.hpp"
#include "chainauth/client_sdk.hpp"
#include "chainauth/ledger_access.hpp"
#include "chainauth/node.hpp"
#include "chainauth/registry.hpp"
#include "chainauth/resource_server.hpp"
#include "chainauth/token_format.hpp"

namespace py = pybind11;
using namespace chainauth;

namespace {

std::array<std::uint8_t, 32> seed_from_bytes(const py::bytes& b) {
  std::string s = b;
  if (s.size() != 32) throw py::value_error("seed must be 32 bytes");
  std::array<std::uint8_t, 32> out{};
  std::copy(s.begin(), s.end(), out.begin());
  return out;
}

py::dict claims_to_dict(const ClaimSet& c) {
  py::dict d;
  d["iss"] = c.iss;
  d["sub"] = c.sub;
  d["aud"] = c.aud;
  d["jti"] = c.jti;
  d["exp"] = c.exp;
  if (c.cnf_kid) d["cnf_kid"] = *c.cnf_kid;
  return d;
}

// Whole stack in one object, sealed block per transaction: enough to walk
// the issue/access/revoke/delegate flows from Python.
class Simulation {
 public:
  explicit Simulation(std::string resource_uri)
      : resource_uri_(std::move(resource_uri)) {
    NodeConfig nc;
    nc.root = root_.address;
    nc.operator_addr = op_.address;
    nc.gas_price = 1;
    nc.faucet = {{client_.address, 10'000'000}, {op_.address, 10'000'000}};
    nc.auto_seal = true;
    node_ = std::make_unique<Node>(nc);
    handle_ = std::make_shared<InProcessLedgerHandle>(*node_);

    AuthServerConfig ac;
    ac.resource_owner_credential = "owner";
    ac.admin_credential = "admin";
    ac.token_lifetime_s = 600;
    as_ = std::make_unique<AuthServer>(ac, op_.keys, handle_);

    ResourceConfig rc;
    rc.contract_address = node_->contract_address();
    rc.resources = {resource_uri_};
    rs_ = std::make_unique<ResourceServer>(rc, handle_);
  }

  std::string client_address() const { return client_.address.to_hex(); }
  std::string contract_address() const {
    return node_->contract_address().to_hex();
  }

  py::dict issue_token() {
    std::int64_t now = unix_now();
    as_->register_client(client_.keys.public_key_hex(), now);
    auto grant = as_->issue_grant("owner", client_.address, resource_uri_, 600,
                                  now);
    std::string nonce = as_->pop_nonce(now);
    IssuedToken tok = as_->request_token(grant.grant_id,
                                         client_.keys.public_key_hex(),
                                         resource_uri_, nonce,
                                         client_.keys.sign(nonce), now);
    py::dict d;
    d["jwt"] = tok.jwt;
    d["token_id"] = tok.token_id;
    d["block"] = tok.included_block;
    return d;
  }

  py::dict verify(const std::string& jwt) {
    py::dict d;
    try {
      rs_->verify_access_request(jwt, unix_now());
      d["ok"] = true;
    } catch (const Error& e) {
      d["ok"] = false;
      d["error"] = std::string(to_string(e.code()));
    }
    return d;
  }

  std::string access(const std::string& jwt) {
    std::int64_t now = unix_now();
    Challenge ch = rs_->issue_challenge(jwt, now);
    Signature sig = client_.keys.sign(ch.nonce + ch.aud);
    Session s = rs_->verify_challenge_response(
        ch.challenge_id, sig, client_.keys.public_key_hex(), now);
    return s.session_id;
  }

  bool session_alive(const std::string& session_id) {
    return rs_->access_with_session(session_id, resource_uri_, unix_now())
        .allowed;
  }

  std::int64_t revoke(const std::string& token_id) {
    std::int64_t block = as_->revoke_token("admin", token_id);
    rs_->recover_missed_events();
    return block;
  }

  std::string owner_of(const std::string& token_id) {
    return node_->owner_of(token_id).to_hex();
  }
  std::string token_uri(const std::string& token_id) {
    return node_->token_uri(token_id);
  }
  std::int64_t head() const { return node_->ledger().head(); }
  std::uint64_t total_gas_used() const {
    return node_->ledger().total_gas_used();
  }
  std::uint64_t deployment_gas() const {
    return node_->ledger().deployment_gas();
  }

 private:
  std::string resource_uri_;
  ClientKeys root_ = ClientKeys::generate();
  ClientKeys op_ = ClientKeys::generate();
  ClientKeys client_ = ClientKeys::generate();
  std::unique_ptr<Node> node_;
  std::shared_ptr<InProcessLedgerHandle> handle_;
  std::unique_ptr<AuthServer> as_;
  std::unique_ptr<ResourceServer> rs_;
};

}  // namespace

PYBIND11_MODULE(_chainauth, m) {
  m.doc() = "Blockchain-anchored OAuth 2.0 tokens";

  py::register_exception<Error>(m, "ChainAuthError");

  m.def("encode_jwt",
        [](const std::string& iss, const std::string& sub,
           const std::string& aud, const std::string& jti, std::int64_t exp,
           const std::optional<std::string>& cnf_kid) {
          ClaimSet c{iss, sub, aud, jti, exp, cnf_kid};
          return encode_jwt(c);
        },
        py::arg("iss"), py::arg("sub"), py::arg("aud"), py::arg("jti"),
        py::arg("exp"), py::arg("cnf_kid") = std::nullopt);
  m.def("decode_jwt",
        [](const std::string& jwt) { return claims_to_dict(decode_jwt(jwt)); });
  m.def("strip_cnf", [](const std::string& jwt) { return strip_cnf(jwt); });
  m.def("is_valid_token_id",
        [](const std::string& id) { return is_valid_token_id(id); });
  m.def("address_from_public_key", [](const std::string& pub_hex) {
    return Address::from_public_key(public_key_from_hex(pub_hex)).to_hex();
  });

  py::class_<ClientKeys>(m, "Keys")
      .def_static("generate", &ClientKeys::generate)
      .def_static("from_seed",
                  [](const py::bytes& b) {
                    return ClientKeys::from_seed(seed_from_bytes(b));
                  })
      .def_property_readonly("public_key",
                             [](const ClientKeys& k) {
                               return k.keys.public_key_hex();
                             })
      .def_property_readonly("address",
                             [](const ClientKeys& k) {
                               return k.address.to_hex();
                             })
      .def("sign", [](const ClientKeys& k, const std::string& msg) {
        return to_hex(k.keys.sign(msg));
      });

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<std::string>(), py::arg("resource_uri"))
      .def_property_readonly("client_address", &Simulation::client_address)
      .def_property_readonly("contract_address", &Simulation::contract_address)
      .def("issue_token", &Simulation::issue_token)
      .def("verify", &Simulation::verify)
      .def("access", &Simulation::access)
      .def("session_alive", &Simulation::session_alive)
      .def("revoke", &Simulation::revoke)
      .def("owner_of", &Simulation::owner_of)
      .def("token_uri", &Simulation::token_uri)
      .def("head", &Simulation::head)
      .def("total_gas_used", &Simulation::total_gas_used)
      .def("deployment_gas", &Simulation::deployment_gas);
}
