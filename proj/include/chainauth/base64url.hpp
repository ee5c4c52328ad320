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

#include <string>
#include <string_view>

namespace chainauth {

// RFC 4648 §5 base64url, unpadded.
std::string base64url_encode(std::string_view data);

// Rejects padding, whitespace, and characters outside the base64url
// alphabet. Throws Error(Err::Malformed).
std::string base64url_decode(std::string_view text);

}  // namespace chainauth
