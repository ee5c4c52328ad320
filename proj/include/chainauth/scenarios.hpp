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

#include <iosfwd>
#include <string>
#include <vector>

namespace chainauth {

// Names of the built-in end-to-end scenarios.
std::vector<std::string> demo_scenarios();

// Spins up a full in-process stack (ledger node + RPC, authorization
// server, resource server, HTTP clients), runs the named scenario, and
// prints a transcript with block numbers. Returns 0 exactly when every
// expected outcome held.
int run_demo(const std::string& name, std::ostream& out);

}  // namespace chainauth
