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

#include "doctest.h"

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "chainauth/registry.hpp"
#include "registry_model.hpp"

using namespace chainauth;
using namespace chainauth::testmodel;

TEST_CASE("randomized histories: registry agrees with the reference model") {
  std::mt19937 rng(20240817);
  for (int history = 0; history < 300; ++history) {
    std::string trace = run_random_history(rng, 24);
    INFO("history ", history, ":\n", trace);
    CHECK(trace.empty());
  }
}

TEST_CASE("a long single history stays consistent") {
  std::mt19937 rng(7);
  std::string trace = run_random_history(rng, 500);
  INFO(trace);
  CHECK(trace.empty());
}
