# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import pytest

import chainauth


def test_jwt_round_trip():
    jwt = chainauth.encode_jwt(
        iss="0x" + "ab" * 20,
        sub="1" * 64,
        aud="https://gw.example/things/lamp",
        jti="7f" * 32,
        exp=1735689600,
    )
    assert jwt.endswith(".")  # unsecured JWT: empty signature segment
    claims = chainauth.decode_jwt(jwt)
    assert claims["sub"] == "1" * 64
    assert claims["exp"] == 1735689600
    assert "cnf" not in claims

    delegated = chainauth.encode_jwt(
        iss=claims["iss"],
        sub=claims["sub"],
        aud=claims["aud"],
        jti=claims["jti"],
        exp=claims["exp"],
        cnf_kid="2" * 64,
    )
    assert chainauth.strip_cnf(delegated) == jwt


def test_keys_are_deterministic_from_seed():
    a = chainauth.Keys.from_seed(b"\x01" * 32)
    b = chainauth.Keys.from_seed(b"\x01" * 32)
    assert a.public_key == b.public_key
    assert a.address == b.address
    assert a.address == chainauth.address_from_public_key(a.public_key)
    assert chainauth.Keys.generate().address != a.address


def test_token_id_validation():
    assert chainauth.is_valid_token_id("ab" * 32)
    assert not chainauth.is_valid_token_id("AB" * 32)
    assert not chainauth.is_valid_token_id("ab" * 31)


def test_simulation_issue_access_revoke():
    sim = chainauth.Simulation("https://gw.example/things/lamp")
    assert sim.deployment_gas() == 1585444

    tok = sim.issue_token()
    assert sim.owner_of(tok["token_id"]) == sim.client_address
    assert sim.token_uri(tok["token_id"]) == tok["jwt"]
    assert sim.verify(tok["jwt"])["ok"]

    session = sim.access(tok["jwt"])
    assert sim.session_alive(session)

    sim.revoke(tok["token_id"])
    assert not sim.session_alive(session)
    denied = sim.verify(tok["jwt"])
    assert not denied["ok"]
    assert denied["error"] == "OwnerMismatch"


def test_simulation_errors_surface_as_exceptions():
    sim = chainauth.Simulation("https://gw.example/things/lamp")
    with pytest.raises(chainauth.ChainAuthError):
        sim.owner_of("f" * 64)
