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

"""Blockchain-anchored OAuth 2.0 tokens."""

from ._chainauth import (
    ChainAuthError,
    Keys,
    Simulation,
    address_from_public_key,
    decode_jwt,
    encode_jwt,
    is_valid_token_id,
    strip_cnf,
)

__all__ = [
    "ChainAuthError",
    "Keys",
    "Simulation",
    "address_from_public_key",
    "decode_jwt",
    "encode_jwt",
    "is_valid_token_id",
    "strip_cnf",
]
